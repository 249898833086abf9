#!/usr/bin/env python

"""
Setup script for the Python package.
"""

import setuptools

PKG = 'algkit'


def read_file(filename: str) -> str:
    """Returns the full contents of the given file."""
    with open(filename, encoding='utf-8') as f:
        return f.read()


setuptools.setup(
    name=PKG,
    # This tag is automatically updated by bump2version
    version='0.1.0',
    description='Exact symbolic verifier for Lie algebroids, lifts and Poisson-Nijenhuis structures',
    long_description=read_file('README.md'),
    long_description_content_type='text/markdown',
    license='MIT',
    packages=['algkit'],
    include_package_data=True,
    zip_safe=False,
    python_requires='>=3.10',
    install_requires=[
        'cpg-utils>=5.0.0',
        'sympy>=1.12',
        'tabulate',
        'toml',
    ],
    entry_points={
        'console_scripts': ['algkit=algkit.cli:main_from_args'],
    },
    keywords='differential-geometry',
    classifiers=[
        'Environment :: Console',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: MIT License',
        'Natural Language :: English',
        'Operating System :: MacOS :: MacOS X',
        'Operating System :: POSIX',
        'Operating System :: Unix',
        'Programming Language :: Python',
        'Topic :: Scientific/Engineering',
        'Topic :: Scientific/Engineering :: Mathematics',
    ],
)
