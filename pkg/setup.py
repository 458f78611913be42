from setuptools import setup

import sys
import os

import k3glue

sys.path.append(os.path.dirname(os.path.abspath(__file__)))

setup(
    name="K3GLUE",
    version=k3glue.version,
    description="Exact and numerical checks for symmetric K3 surfaces glued from two blown-up projective planes",
    license="MIT",
    keywords="K3 surfaces, elliptic curves, Weierstrass functions, Diophantine approximation, Kähler metrics",
    packages=["k3glue"],
    package_data={"k3glue": ["schemas/*.json"]},
    include_package_data=True,
    python_requires=">=3.9",
    entry_points={
        "console_scripts": [
            "k3glue = k3glue.app:execute_script",
        ]
    },
    install_requires=["pytest", "hypothesis", "numpy", "scipy", "sympy", "jsonschema"]
)
