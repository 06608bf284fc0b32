import os

import setuptools

version_info = {}
with open(os.path.join("src", "dodiff", "__version__.py"), "r", encoding="utf-8") as fh:
    exec(fh.read(), version_info)

with open("README.md", "r", encoding="utf-8") as fh:
    long_description = fh.read()

setuptools.setup(
    name=version_info["PROJECT_NAME"],
    version=version_info["__version__"],
    description="Spectral kernels, boundary-value solutions and decay bounds "
                "for distributed-order time-fractional sub-diffusion",
    long_description=long_description,
    long_description_content_type="text/markdown",
    classifiers=[
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
    package_dir={"": "src"},
    packages=setuptools.find_packages(where="src"),
    python_requires=">=3.8",
    install_requires=[
        "numpy>=1.20",
        "scipy>=1.6",
        "mpmath>=1.2",
    ],
    extras_require={
        "test": ["pytest>=6.2"],
    },
    entry_points={
        "console_scripts": [
            "dodiff=dodiff.cli:main",
        ],
    },
)
