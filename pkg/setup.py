from setuptools import find_packages, setup

FRACTAL_SPECTRA_VERSION = "0.1.0"

INSTALL_REQUIRES = [
    # Numerical core
    "numpy",
    "scipy>=1.6",
    # Hydra
    "hydra_colorlog",
    "hydra-core",
    "omegaconf",
    # CPU info
    "psutil",
    # Reporting
    "typing-extensions",
    "flatten_dict",
    "pandas>=1.5",
]

EXTRAS_REQUIRE = {
    "quality": ["ruff"],
    "testing": ["pytest"],
}


setup(
    packages=find_packages(include=["fractal_spectra", "fractal_spectra.*"]),
    name="fractal-spectra",
    version=FRACTAL_SPECTRA_VERSION,
    install_requires=INSTALL_REQUIRES,
    extras_require=EXTRAS_REQUIRE,
    entry_points={"console_scripts": ["fractal-spectra=fractal_spectra.cli:main"]},
)
