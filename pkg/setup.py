#!/usr/bin/env python
# -*- coding: utf-8 -*-
import os
import re
from setuptools import setup, find_packages
from setuptools.command.test import test as TestCommand
import sys


class Tox(TestCommand):
    user_options = TestCommand.user_options + [
        ('environment=', 'e', "Run 'test_suite' in specified environment")
    ]
    environment = None

    def finalize_options(self):
        TestCommand.finalize_options(self)
        self.test_args = []
        self.test_suite = True

    def run_tests(self):
        #import here, cause outside the eggs aren't loaded
        import tox
        if self.environment:
            self.test_args.append('-e{0}'.format(self.environment))
        errno = tox.cmdline(self.test_args)
        sys.exit(errno)


def read_file(filename):
    """Read a file into a string"""
    path = os.path.abspath(os.path.dirname(__file__))
    filepath = os.path.join(path, filename)
    try:
        return open(filepath).read()
    except IOError:
        return ''


def get_readme():
    """Return the README file contents. Supports text,rst, and markdown"""
    for name in ('README', 'README.rst', 'README.md'):
        if os.path.exists(name):
            return read_file(name)
    return ''


def get_version():
    match = re.search(r"__version__ = '([^']+)'",
                      read_file(os.path.join('django_abstractions', '__init__.py')))
    return match.group(1) if match else '0.0.0'


def install_requires():
    return [line for line in read_file('requirements.txt').splitlines() if line.strip()]


setup(
    name="django-abstractions",
    version=get_version(),
    description='State abstractions, information bottlenecks and options for tabular MDPs',
    long_description=get_readme(),
    packages=find_packages(exclude=["*.tests", "*.tests.*", "tests.*", "tests"]),
    package_data={'django_abstractions.envs': ['layouts/*.txt']},
    include_package_data=True,
    install_requires=install_requires(),
    tests_require=['mock>=3.0', 'tox>=3.0', ],
    cmdclass={'test': Tox},
    test_suite='django_abstractions.tests',
    entry_points={
        'console_scripts': ['abstractions=django_abstractions.cli:main'],
    },
    classifiers=[
        'Framework :: Django',
        'Topic :: Scientific/Engineering :: Artificial Intelligence',
    ],
    license="MIT",
)
