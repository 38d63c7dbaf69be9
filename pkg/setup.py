# -*- coding: utf-8 -*-
"""
Setup Module
"""
from setuptools import find_packages, setup

with open("README.md", "r") as fh:
    long_description = fh.read()

setup(
    name="pystein-bounds",
    version="0.3.0",
    description="Exact Berry-Esseen audits of Stein's method bounds at critical points",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=find_packages(exclude=["test"]),
    include_package_data=True,
    package_data={"pystein": ["settings/*.json"]},
    classifiers=[
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: GNU General Public License v3 (GPLv3)",
    ],
    python_requires=">=3.8",
    install_requires=[
        "numpy",
        "scipy",
        "joblib",
        "jsonschema>=3.0.1",
        "tqdm",
        "colorlog",
    ],
    entry_points={"console_scripts": ["pystein=pystein.__main__:main"]},
)
