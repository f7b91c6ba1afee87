from setuptools import find_packages, setup

setup(
    name="spps",
    version="1.0.0",
    description="SPPS: spectral parameter power series solvers for Sturm-Liouville type problems",
    author="SPPS Team",
    packages=find_packages(exclude=["tests", "tests.*"]),
    package_data={
        "spps.config": ["config.yaml"],
        "spps.evaluation": ["reference_values.yaml"],
    },
    install_requires=[
        "numpy>=1.24.0",
        "scipy>=1.12.0",  # 1.12+ required for cumulative_simpson
        "pydantic>=2.0.0",
        "pyyaml>=6.0.0",
        "python-dotenv>=1.0.0",
    ],
    python_requires=">=3.10",
    classifiers=[
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "Programming Language :: Python :: 3.10",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
    entry_points={
        "console_scripts": [
            "spps=spps.cli:main",
        ],
    },
)
