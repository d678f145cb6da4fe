from setuptools import setup, find_packages

setup(
    name="topols",
    version="0.1.0",
    packages=find_packages(exclude=["tests"]),
    install_requires=[
        "numpy>=1.22.0",
        "networkx>=2.8",
        "pyparsing>=3.0.0",
        "pydantic>=2.0.0",
    ],
    extras_require={
        "test": [
            "pytest>=7.0.0",
            "pytest-cov>=4.0.0",
        ],
    },
    entry_points={
        "console_scripts": [
            "topols=topols.cli:main",
        ],
    },
)
