# -*- coding: utf-8 -*-
"""Undirected state graphs of finite MDPs."""
import networkx as nx
import numpy as np

from .errors import ModelError

__all__ = ['TransitionGraph', 'transition_graph', 'shortest_path_policy']


class TransitionGraph(object):
    """Unweighted undirected graph over the states 0..n-1.

    Self-loops are never stored."""

    def __init__(self, graph):
        nodes = sorted(graph.nodes())
        if nodes != list(range(len(nodes))):
            graph = nx.convert_node_labels_to_integers(graph, ordering='sorted')
        graph = nx.Graph(graph)
        graph.remove_edges_from(list(nx.selfloop_edges(graph)))
        self.graph = graph

    @classmethod
    def from_mdp(cls, mdp, threshold=0.0):
        """Joins u and v when some action moves u to v with probability
        above `threshold`."""
        graph = nx.Graph()
        graph.add_nodes_from(range(mdp.n_states))
        reachable = (mdp.transition > threshold).any(axis=1)
        np.fill_diagonal(reachable, False)
        graph.add_edges_from(zip(*np.nonzero(reachable)))
        return cls(graph)

    @classmethod
    def from_edges(cls, n, edges):
        graph = nx.Graph()
        graph.add_nodes_from(range(n))
        graph.add_edges_from(edges)
        return cls(graph)

    @property
    def n(self):
        return self.graph.number_of_nodes()

    @property
    def n_edges(self):
        return self.graph.number_of_edges()

    def degrees(self):
        return np.array([self.graph.degree(v) for v in range(self.n)])

    def adjacency(self):
        return nx.to_numpy_array(self.graph, nodelist=range(self.n))

    def is_connected(self):
        return self.n > 0 and nx.is_connected(self.graph)

    def check_connected(self):
        if not self.is_connected():
            raise ModelError("the graph has %d connected components"
                             % nx.number_connected_components(self.graph))

    def neighbour_table(self):
        """(n, max degree) neighbour array padded with -1, and the degrees."""
        degrees = self.degrees()
        table = np.full((self.n, max(1, degrees.max() if self.n else 1)), -1, dtype=int)
        for v in range(self.n):
            neighbours = sorted(self.graph.neighbors(v))
            table[v, :len(neighbours)] = neighbours
        return table, degrees

    def with_edges(self, edges):
        graph = self.graph.copy()
        graph.add_edges_from(edges)
        return TransitionGraph(graph)

    def __repr__(self):
        return "<TransitionGraph n=%d edges=%d>" % (self.n, self.n_edges)


def transition_graph(mdp, threshold=0.0):
    return TransitionGraph.from_mdp(mdp, threshold)


def shortest_path_policy(mdp, target):
    """Deterministic policy moving along shortest paths to `target` in the
    graph of most likely successors; ties go to the lowest action.

    States that cannot reach `target` take action 0."""
    likely = np.argmax(mdp.transition, axis=2)
    skeleton = nx.DiGraph()
    skeleton.add_nodes_from(range(mdp.n_states))
    for s in range(mdp.n_states):
        for a in range(mdp.n_actions):
            if likely[s, a] != s:
                skeleton.add_edge(s, int(likely[s, a]))
    distance = nx.single_target_shortest_path_length(skeleton, int(target))
    distance = dict(distance)
    actions = np.zeros(mdp.n_states, dtype=int)
    for s in range(mdp.n_states):
        if s == target or s not in distance:
            continue
        costs = [distance.get(int(likely[s, a]), np.inf) for a in range(mdp.n_actions)]
        actions[s] = int(np.argmin(costs))
    return actions
