# -*- coding: utf-8 -*-
from django.urls import re_path

from .api import (
    ApiVersion, Info, ListEnvironments,
    EnvModel, EnvPlan, EnvMap,
    ListExperiments, ExperimentDetail,
    ListTargets, TargetDetail
)

urlpatterns = [
    re_path(r'^version/$', ApiVersion.as_view(), name='version'),
    re_path(r'^info/$', Info.as_view(), name='info'),
    re_path(r'^envs/$', ListEnvironments.as_view(), name='envs'),
    re_path(r'^env/(?P<variant>[\w-]+)/model/$', EnvModel.as_view(), name='env_model'),
    re_path(r'^env/(?P<variant>[\w-]+)/plan/$', EnvPlan.as_view(), name='env_plan'),
    re_path(r'^env/(?P<variant>[\w-]+)/map/$', EnvMap.as_view(), name='env_map'),
    re_path(r'^experiments/$', ListExperiments.as_view(), name='experiments'),
    re_path(r'^experiment/(?P<name>[\w.-]+)/$', ExperimentDetail.as_view(), name='experiment'),
    re_path(r'^targets/$', ListTargets.as_view(), name='targets'),
    re_path(r'^target/(?P<target_id>[\w-]+)/$', TargetDetail.as_view(), name='target'),
]
