# -*- coding: utf-8 -*-
"""Algebraic connectivity, covering options and random-walk cover times."""
import math
from collections import namedtuple

import networkx as nx
import numpy as np
from scipy.stats import spearmanr

from ..errors import ArgumentError, ConvergenceError, ModelError
from ..graphs import TransitionGraph, shortest_path_policy
from ..logging import get_logger
from ..mdp import FiniteMdp, Policy
from ..options.core import PointOption
from ..seeding import derive_rng, derive_seed, make_rng

__all__ = [
    'Spectrum', 'normalized_laplacian', 'combinatorial_laplacian', 'laplacian', 'LAPLACIANS',
    'eigen_symmetric', 'graph_spectrum', 'walk_loops', 'expected_hitting_times',
    'covering_options', 'CoveringResult', 'eigenoptions', 'fiedler_improvement',
    'CoverTime', 'estimate_cover_time', 'cover_time_bound', 'random_connected_graph',
    'correlation_study', 'JACOBI_TOLERANCE', 'CONNECTED_TOLERANCE',
]

JACOBI_TOLERANCE = 1e-10
CONNECTED_TOLERANCE = 1e-8
MAX_SWEEPS = 100
Z_95 = 1.96


class Spectrum(object):
    """Ascending eigenvalues and matching orthonormal eigenvectors (columns)."""

    def __init__(self, values, vectors, sweeps=0):
        self.values = values
        self.vectors = vectors
        self.sweeps = sweeps

    @property
    def lambda2(self):
        return float(self.values[1]) if len(self.values) > 1 else 0.0

    @property
    def fiedler(self):
        return self.vectors[:, 1]

    @property
    def connected(self):
        return self.lambda2 > CONNECTED_TOLERANCE

    def reconstruct(self):
        return (self.vectors * self.values).dot(self.vectors.T)

    def __repr__(self):
        return "<Spectrum n=%d lambda2=%g>" % (len(self.values), self.lambda2)


def normalized_laplacian(graph):
    """I - D^(-1/2) A D^(-1/2) as a dense array."""
    if isinstance(graph, TransitionGraph):
        graph = graph.graph
    nodes = sorted(graph.nodes())
    return nx.normalized_laplacian_matrix(graph, nodelist=nodes).toarray()


def combinatorial_laplacian(graph):
    """D - A as a dense array."""
    if isinstance(graph, TransitionGraph):
        graph = graph.graph
    nodes = sorted(graph.nodes())
    return nx.laplacian_matrix(graph, nodelist=nodes).toarray().astype(float)


LAPLACIANS = {
    'normalized': normalized_laplacian,
    'combinatorial': combinatorial_laplacian,
}


def laplacian(graph, kind='normalized'):
    try:
        build = LAPLACIANS[kind]
    except KeyError:
        raise ArgumentError("unknown Laplacian '%s' (known: %s)"
                            % (kind, ', '.join(sorted(LAPLACIANS))))
    return build(graph)


def _orient(vectors):
    """Makes the first entry of clearly nonzero magnitude positive in each column."""
    for column in range(vectors.shape[1]):
        entries = vectors[:, column]
        index = np.flatnonzero(np.abs(entries) > 1e-12)
        if len(index) and entries[index[0]] < 0:
            vectors[:, column] = -entries
    return vectors


def eigen_symmetric(matrix, tol=JACOBI_TOLERANCE, max_sweeps=MAX_SWEEPS):
    """Cyclic Jacobi rotations until the off-diagonal norm drops below `tol`."""
    a = np.array(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ArgumentError("a square matrix is required")
    if not np.allclose(a, a.T, atol=1e-12):
        raise ArgumentError("the matrix is not symmetric")
    n = a.shape[0]
    vectors = np.eye(n)

    for sweep in range(1, max_sweeps + 1):
        off = math.sqrt(2.0 * (np.triu(a, 1) ** 2).sum())
        if off < tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if abs(a[p, q]) < 1e-300:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * a[p, q])
                t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                column_p, column_q = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * column_p - s * column_q
                a[:, q] = s * column_p + c * column_q
                row_p, row_q = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                vector_p, vector_q = vectors[:, p].copy(), vectors[:, q].copy()
                vectors[:, p] = c * vector_p - s * vector_q
                vectors[:, q] = s * vector_p + c * vector_q
    else:
        raise ConvergenceError("Jacobi rotations did not converge in %d sweeps" % max_sweeps,
                               iterations=max_sweeps)

    values = np.diag(a).copy()
    order = np.argsort(values, kind='stable')
    return Spectrum(values[order], _orient(vectors[:, order]), sweep)


def graph_spectrum(graph, tol=JACOBI_TOLERANCE, kind='normalized'):
    spectrum = eigen_symmetric(laplacian(graph, kind), tol)
    if len(spectrum.values) > 2 and spectrum.values[2] - spectrum.values[1] < 1e-8:
        get_logger().warning("lambda2 = %g has multiplicity above one; the Fiedler vector is "
                             "not unique", spectrum.lambda2)
    return spectrum


def fiedler_improvement(spectrum, i, j):
    """Lower bound on the gain in lambda2 from joining i and j."""
    if len(spectrum.values) < 3:
        raise ArgumentError("the bound needs at least three eigenvalues")
    gap = spectrum.values[2] - spectrum.values[1]
    if gap <= 0:
        raise ArgumentError("lambda2 must have multiplicity one")
    v = spectrum.fiedler
    return float((v[i] - v[j]) ** 2 / (6.0 / gap + 1.5))


def _as_graph(source, threshold=0.0):
    if isinstance(source, FiniteMdp):
        return TransitionGraph.from_mdp(source, threshold), source
    if isinstance(source, TransitionGraph):
        return source, None
    if isinstance(source, nx.Graph):
        return TransitionGraph(source), None
    raise ArgumentError("expected a FiniteMdp or a graph, got %r" % (source,))


def _pair_options(mdp, pairs):
    if mdp is None:
        return None
    options = []
    for i, j in pairs:
        for start, end in ((i, j), (j, i)):
            actions = shortest_path_policy(mdp, end)
            options.append(PointOption(
                start, end, Policy.deterministic(actions, mdp.n_actions), n_states=mdp.n_states,
                name='%s->%s' % (mdp.label(start), mdp.label(end)),
            ))
    return options


CoveringResult = namedtuple('CoveringResult', [
    'options', 'pairs', 'graph', 'lambda2_before', 'lambda2_after', 'history',
])


def covering_options(source, k, mdp=None, threshold=0.0, kind='normalized'):
    """Adds k/2 option pairs, each joining the states with the largest and
    smallest Fiedler-vector entries of the current graph.

    `source` is an MDP or a graph; with an MDP the options follow
    shortest paths between their endpoints, with a bare graph only the
    pairs are returned. `history` lists lambda2 after every pair. `kind`
    picks the Laplacian whose spectrum drives the choice and is reported."""
    if k < 0 or k % 2:
        raise ArgumentError("k must be a nonnegative even number")
    graph, built_from = _as_graph(source, threshold)
    mdp = mdp or built_from
    graph.check_connected()
    spectrum = graph_spectrum(graph, kind=kind)
    before = spectrum.lambda2
    pairs, history = [], []
    for _ in range(k // 2):
        fiedler = spectrum.fiedler
        i, j = int(np.argmax(fiedler)), int(np.argmin(fiedler))
        pairs.append((i, j))
        graph = graph.with_edges([(i, j)])
        previous = spectrum.lambda2
        spectrum = graph_spectrum(graph, kind=kind)
        if spectrum.lambda2 < previous - 1e-9:
            get_logger().warning("lambda2 fell from %g to %g after joining %d and %d",
                                 previous, spectrum.lambda2, i, j)
        history.append(spectrum.lambda2)
    get_logger().info("covering options: lambda2 %g -> %g with %d options", before,
                      spectrum.lambda2, k)
    return CoveringResult(_pair_options(mdp, pairs), pairs, graph, before, spectrum.lambda2,
                          history)


def eigenoptions(source, k, mdp=None, threshold=0.0, kind='normalized'):
    """Joins the extreme states of each of the first k/2 non-trivial
    eigenvectors, all from the original spectrum."""
    if k < 0 or k % 2:
        raise ArgumentError("k must be a nonnegative even number")
    graph, built_from = _as_graph(source, threshold)
    mdp = mdp or built_from
    graph.check_connected()
    spectrum = graph_spectrum(graph, kind=kind)
    if k // 2 >= graph.n:
        raise ArgumentError("the graph has only %d non-trivial eigenvectors" % (graph.n - 1))
    pairs = []
    for column in range(1, k // 2 + 1):
        vector = spectrum.vectors[:, column]
        pairs.append((int(np.argmax(vector)), int(np.argmin(vector))))
    augmented = graph.with_edges(pairs)
    after = graph_spectrum(augmented, kind=kind).lambda2
    return CoveringResult(_pair_options(mdp, pairs), pairs, augmented, spectrum.lambda2, after,
                          [after])


CoverTime = namedtuple('CoverTime', ['mean', 'half_width', 'start', 'n_trajectories', 'hitting'])


def walk_loops(graph, n_actions):
    """Stay choices per vertex for a walk that picks one of `n_actions`
    actions uniformly, where a blocked action leaves the state unchanged."""
    graph, _ = _as_graph(graph)
    return np.maximum(0, int(n_actions) - graph.degrees())


def _walk_cover_times(table, degrees, loops, start, n_trajectories, rng, max_steps):
    """Cover steps per trajectory and the step each vertex was first visited."""
    n = len(degrees)
    choices = degrees + loops
    position = np.full(n_trajectories, start, dtype=int)
    first_visit = np.full((n_trajectories, n), -1, dtype=int)
    first_visit[:, start] = 0
    count = np.ones(n_trajectories, dtype=int)
    steps = np.zeros(n_trajectories, dtype=int)
    active = count < n
    rows = np.arange(n_trajectories)
    last_column = table.shape[1] - 1
    for step in range(1, max_steps + 1):
        if not active.any():
            return steps, first_visit
        walkers = rows[active]
        here = position[walkers]
        choice = (rng.random(len(walkers)) * choices[here]).astype(int)
        moving = choice < degrees[here]
        position[walkers] = np.where(moving, table[here, np.minimum(choice, last_column)], here)
        fresh = first_visit[walkers, position[walkers]] < 0
        first_visit[walkers[fresh], position[walkers[fresh]]] = step
        count[walkers] += fresh
        steps[walkers] = step
        active[walkers] = count[walkers] < n
    raise ConvergenceError("random walks did not cover the graph in %d steps" % max_steps,
                           iterations=max_steps)


def estimate_cover_time(graph, n_trajectories=10000, seed=0, start=0, max_steps=10 ** 7,
                        loops=None):
    """Monte-Carlo cover time of the random walk over neighbours.

    `start` is a vertex, or 'max' for the largest estimate over every
    start vertex (each with its own stream). `loops` adds stay choices
    per vertex (see `walk_loops`); without it the walk always moves.
    `hitting` is the largest mean first-visit time over the vertices."""
    graph, _ = _as_graph(graph)
    graph.check_connected()
    if n_trajectories < 1:
        raise ArgumentError("n_trajectories must be positive")
    table, degrees = graph.neighbour_table()
    loops = _loops(graph, loops)
    if graph.n == 1:
        return CoverTime(0.0, 0.0, 0, n_trajectories, 0.0)

    def estimate(vertex, rng):
        times, first_visit = _walk_cover_times(table, degrees, loops, vertex, n_trajectories,
                                               rng, max_steps)
        half = Z_95 * times.std(ddof=1) / math.sqrt(n_trajectories) if n_trajectories > 1 else 0.0
        hitting = float(first_visit.mean(axis=0).max())
        return CoverTime(float(times.mean()), float(half), vertex, n_trajectories, hitting)

    if start == 'max':
        estimates = [estimate(v, derive_rng(seed, v)) for v in range(graph.n)]
        return max(estimates, key=lambda item: item.mean)
    if not 0 <= int(start) < graph.n:
        raise ArgumentError("start vertex %r is not in the graph" % start)
    return estimate(int(start), make_rng(seed))


def _loops(graph, loops):
    if loops is None:
        return np.zeros(graph.n, dtype=int)
    loops = np.asarray(loops, dtype=int)
    if loops.shape != (graph.n,) or (loops < 0).any():
        raise ArgumentError("loops must be %d nonnegative counts" % graph.n)
    return loops


def expected_hitting_times(graph, loops=None):
    """Exact expected first-visit times H[i, j] of the walk, from the
    fundamental matrix of its reversible chain."""
    graph, _ = _as_graph(graph)
    graph.check_connected()
    weights = graph.adjacency() + np.diag(_loops(graph, loops))
    volume = weights.sum(axis=1)
    walk = weights / volume[:, None]
    pi = volume / volume.sum()
    n = graph.n
    fundamental = np.linalg.inv(np.eye(n) - walk + np.outer(np.ones(n), pi))
    hitting = (np.diag(fundamental)[None, :] - fundamental) / pi[None, :]
    np.fill_diagonal(hitting, 0.0)
    return hitting


def cover_time_bound(lambda2, n):
    """n^2 ln n / lambda2."""
    if lambda2 <= 0:
        raise ArgumentError("lambda2 must be positive")
    return n * n * math.log(n) / lambda2


def random_connected_graph(n, density, rng=None):
    """A random spanning tree plus random extra edges until the edge count
    reaches `density` times n (n - 1) / 2."""
    if n < 1:
        raise ArgumentError("n must be positive")
    if not 0.0 <= density <= 1.0:
        raise ArgumentError("density must lie in [0, 1]")
    rng = make_rng(rng)
    order = rng.permutation(n)
    edges = set()
    for index in range(1, n):
        parent = order[int(rng.integers(index))]
        edges.add(tuple(sorted((int(order[index]), int(parent)))))
    target = int(math.ceil(density * n * (n - 1) / 2.0))
    missing = [(i, j) for i in range(n) for j in range(i + 1, n) if (i, j) not in edges]
    extra = max(0, target - len(edges))
    if extra:
        for index in rng.choice(len(missing), size=min(extra, len(missing)), replace=False):
            edges.add(missing[int(index)])
    return TransitionGraph.from_edges(n, sorted(edges))


def correlation_study(n_graphs=100, n=10, density=0.3, n_trajectories=1000, seed=0):
    """Returns (lambda2 values, cover times, Spearman correlation)."""
    if n_graphs < 3:
        raise ArgumentError("a correlation needs at least three graphs")
    lambdas, covers = [], []
    for index in range(n_graphs):
        graph = random_connected_graph(n, density, derive_rng(seed, 0, index))
        lambdas.append(graph_spectrum(graph).lambda2)
        walk_seed = derive_seed(seed, 1, index)
        covers.append(estimate_cover_time(graph, n_trajectories, walk_seed, start='max').mean)
    rho = spearmanr(lambdas, covers).correlation
    get_logger().info("lambda2 / cover time Spearman correlation over %d graphs: %.3f",
                      n_graphs, rho)
    if np.isnan(rho):
        raise ModelError("the correlation is undefined for constant samples")
    return lambdas, covers, float(rho)
