"""Volterra multifractional Gaussian process: kernel, covariance, sampling, checks."""

import json as _json

from ._core import *  # noqa: F401,F403
from ._core import verify as _verify

__all__ = [name for name in dir() if not name.startswith("_")]


def verify_report(config, suite):
    """Runs a verification suite; `config` is a dict or JSON string. Returns a dict."""
    text = config if isinstance(config, str) else _json.dumps(config)
    return _json.loads(_verify(text, suite))
