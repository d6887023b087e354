import importlib.metadata
import importlib.util
from typing import Any, Dict, Optional

_numpy_available = importlib.util.find_spec("numpy") is not None
_scipy_available = importlib.util.find_spec("scipy") is not None
_pandas_available = importlib.util.find_spec("pandas") is not None
_hydra_available = importlib.util.find_spec("hydra") is not None
_fractal_spectra_available = importlib.util.find_spec("fractal_spectra") is not None


def _get_version(distribution: str) -> Optional[str]:
    try:
        return importlib.metadata.version(distribution)
    except importlib.metadata.PackageNotFoundError:
        return None


def numpy_version():
    if _numpy_available:
        return _get_version("numpy")


def scipy_version():
    if _scipy_available:
        return _get_version("scipy")


def pandas_version():
    if _pandas_available:
        return _get_version("pandas")


def hydra_version():
    if _hydra_available:
        return _get_version("hydra-core")


def fractal_spectra_version():
    if _fractal_spectra_available:
        return _get_version("fractal-spectra")


def get_scientific_libs_info() -> Dict[str, Any]:
    return {
        "fractal_spectra_version": fractal_spectra_version(),
        "numpy_version": numpy_version(),
        "scipy_version": scipy_version(),
        "pandas_version": pandas_version(),
        "hydra_version": hydra_version(),
    }
