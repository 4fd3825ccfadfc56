# -*- coding: utf-8 -*-
"""`abstractions` console script: the management command without a
Django project."""
import os
import sys

__all__ = ['main']


def main(argv=None):
    import django
    from django.conf import settings
    from django.core.management import execute_from_command_line

    if not os.environ.get('DJANGO_SETTINGS_MODULE') and not settings.configured:
        settings.configure(
            INSTALLED_APPS=('django_abstractions',),
            ABSTRACTIONS_CONFIG_FILE=os.environ.get('ABSTRACTIONS_CONFIG_FILE'),
            ABSTRACTIONS_EXPERIMENTS_DIR=os.environ.get('ABSTRACTIONS_EXPERIMENTS_DIR'),
        )
        django.setup()

    argv = sys.argv[1:] if argv is None else list(argv)
    execute_from_command_line(['abstractions', 'abstractions'] + argv)


if __name__ == '__main__':
    main()
