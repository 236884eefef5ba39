#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""The setup script."""

from setuptools import find_packages, setup

with open("README.md") as readme_file:
    readme = readme_file.read()

requirements = [
    "mergedeep >= 1.3.4",
    "numpy >= 1.22",
    "sympy >= 1.10",
    "aiounittest >= 1.4.1",
]

setup(
    author="Jan Silhan",
    author_email="silhan.it@gmail.com",
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Natural Language :: English",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
    description="Exact-arithmetic reproduction of fatness, free-action and Pontryagin class computations",
    entry_points={"console_scripts": ["fatlab=fatlab.cli:main"]},
    install_requires=requirements,
    setup_requires=["pytest-runner"],
    tests_require=["pytest", "hypothesis"],
    license="MIT license",
    long_description=readme,
    include_package_data=True,
    package_data={"fatlab": ["data/*.json"]},
    keywords="fatlab",
    name="fatlab",
    packages=find_packages(include=["fatlab"]),
    python_requires=">=3.9",
    version="0.1.0",
    zip_safe=False,
)
