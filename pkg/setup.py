"""
Package metadata and the ``rebsim`` console script
"""
from pathlib import Path

from setuptools import find_packages, setup

HERE = Path(__file__).parent


def read_requirements():
    """Runtime requirements; test tooling stays out of install_requires"""
    lines = (HERE / "requirements.txt").read_text().splitlines()
    runtime = []
    for line in lines:
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith(("pytest", "hypothesis")):
            continue
        runtime.append(line)
    return runtime


setup(
    name="rebsim",
    version="1.0.0",
    description="Simulator for photon-mediated remote-entanglement protocols between spins",
    packages=find_packages(exclude=("tests", "tests.*")),
    python_requires=">=3.10",
    install_requires=read_requirements(),
    extras_require={"test": ["pytest>=7.4", "hypothesis>=6.90"]},
    entry_points={"console_scripts": ["rebsim=rebsim.main:main"]},
)
