"""Generalized Drazin-Riesz inverses of finite-dimensional operator models."""

import json as _json

from ._core import *  # noqa: F401,F403
from ._core import DrazinkitError, analyze_drazin as _analyze_drazin


def analyze_drazin(model_path, sigma_index, xi=None):
    """Drazin analysis report as a dict (timestamp omitted)."""
    return _json.loads(_analyze_drazin(str(model_path), sigma_index, xi))


__all__ = [name for name in dir() if not name.startswith("_")]
