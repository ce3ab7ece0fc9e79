#! /usr/bin/env python3

from setuptools import find_packages, setup

setup(
    name="esdlab",
    version="1.0.0",
    packages=find_packages(where="packaging"),
    package_dir={"": "packaging"},
    package_data={
        "esdlab": ["esdlab_settings.py"],
    },
    entry_points={"console_scripts": ["esdlab = esdlab.cli:main"]},
    python_requires=">=3.12",
)
