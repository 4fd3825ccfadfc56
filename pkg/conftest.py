# Test wiring for running the suite under pytest: mirrors what runtests.py
# does for the Django test runner (settings, app registry, test database).
import django
import pytest

from runtests import configure_settings

configure_settings(None)
django.setup()


@pytest.fixture(scope='session', autouse=True)
def _django_test_environment():
    from django.test.utils import (
        setup_databases, setup_test_environment, teardown_databases,
        teardown_test_environment)
    setup_test_environment()
    old_config = setup_databases(verbosity=0, interactive=False)
    yield
    teardown_databases(old_config, verbosity=0)
    teardown_test_environment()
