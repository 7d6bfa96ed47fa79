#!/usr/bin/env python
#
# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at http://mozilla.org/MPL/2.0/.
from setuptools import setup


with open('README.rst') as f:
    readme = f.read()


setup(
    name="workmeter",
    version='0.1.0',
    description='Work measured on a quantum control device, with the '
                'fluctuation relations it gives rise to',
    long_description=readme,
    license='Mozilla',
    platforms=['linux'],
    packages=[
        'workmeter',
    ],
    entry_points={
        'console_scripts': [
            'workmeter = workmeter.cli:main',
        ]
    },
    python_requires='>=3.7',
    install_requires=[
        'numpy>=1.17',
        'scipy>=1.4',
        'plumbum>=1.7',
    ],
    tests_require=['pytest'],
    classifiers=[
        'Development Status :: 3 - Alpha',
        'License :: OSI Approved :: Mozilla Public License 2.0 (MPL 2.0)',
        'Operating System :: POSIX :: Linux',
        'Programming Language :: Python :: 3',
        'Intended Audience :: Science/Research',
        'Topic :: Scientific/Engineering :: Physics',
        'Environment :: Console',
    ],
)
