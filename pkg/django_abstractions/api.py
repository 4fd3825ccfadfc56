# -*- coding: utf-8 -*-
from rest_framework.views import APIView
from rest_framework import permissions
from rest_framework.response import Response
from rest_framework.exceptions import ParseError

from django.conf import settings
from django.http import Http404
from django.core.exceptions import ImproperlyConfigured

from . import __version__
from .errors import (
    AbstractionError, NoSuchEnvironmentError, NoSuchExperimentError, NoSuchTargetError,
)
from .logging import get_logger
from .workspace import Workspace

API_VERSION = 1

__all__ = [
    'ApiVersion', 'Info', 'ListEnvironments', 'EnvModel', 'EnvPlan', 'EnvMap',
    'ListExperiments', 'ExperimentDetail', 'ListTargets', 'TargetDetail',
]


class ApiVersion(APIView):
    permission_classes = (permissions.IsAuthenticated,)

    def get(self, request):
        info = {
            "version": __version__,
            "api_version": API_VERSION
        }
        return Response(info)


class AbstractionsView(APIView):
    permission_classes = (permissions.IsAuthenticated,)
    workspace = None

    def initialize_workspace(self):
        if self.workspace is None:
            try:
                config = settings.ABSTRACTIONS_CONFIG_FILE
                experiments_dir = settings.ABSTRACTIONS_EXPERIMENTS_DIR
            except AttributeError:
                raise ImproperlyConfigured(
                    'settings.ABSTRACTIONS_CONFIG_FILE and '
                    'settings.ABSTRACTIONS_EXPERIMENTS_DIR are not set.'
                )

            try:
                self.workspace = Workspace(config=config, experiments_dir=experiments_dir)
            except AbstractionError as e:
                raise ImproperlyConfigured(str(e))
        return self.workspace

    def fail(self, error):
        message = str(error)
        get_logger().error(message)
        raise ParseError(detail=message)

    def call(self, method, *args):
        """Runs a workspace method, turning unknown names into 404 and every
        other toolkit error into 400."""
        workspace = self.initialize_workspace()
        try:
            return getattr(workspace, method)(*args)
        except (NoSuchEnvironmentError, NoSuchExperimentError, NoSuchTargetError):
            raise Http404
        except AbstractionError as e:
            self.fail(e)

    def get_spec(self, request, variant):
        options = dict(request.query_params.items())
        return self.call('env_spec', variant, options)


class Info(AbstractionsView):

    def get(self, request):
        return Response(self.call('info'))


class ListEnvironments(AbstractionsView):

    def get(self, request):
        return Response(self.call('list_environments'))


class EnvModel(AbstractionsView):

    def get(self, request, variant):
        spec = self.get_spec(request, variant)
        return Response(self.call('model', spec))


class EnvPlan(AbstractionsView):

    def get(self, request, variant):
        spec = self.get_spec(request, variant)
        return Response(self.call('plan', spec))


class EnvMap(AbstractionsView):

    def get(self, request, variant):
        spec = self.get_spec(request, variant)
        text = self.call('ascii_map', spec)
        return Response({"env": spec.to_dict(), "map": text.split('\n')})


class ListExperiments(AbstractionsView):

    def get(self, request):
        return Response(self.call('list_experiments'))


class ExperimentDetail(AbstractionsView):

    def get(self, request, name):
        return Response(self.call('experiment', name).to_dict())


class ListTargets(AbstractionsView):

    def get(self, request):
        return Response(self.call('list_targets'))


class TargetDetail(AbstractionsView):

    def get(self, request, target_id):
        return Response(self.call('target', target_id))
