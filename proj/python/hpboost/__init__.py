"""Boosting randomized online algorithms from expected to high-probability guarantees."""

import json as _json

from ._core import *  # noqa: F401,F403
from ._core import __version__, cli, run_oracle_suite as _run_oracle_suite


def oracle_suite(name, seed=1):
    """Result of one oracle-equivalence suite as a dict."""
    return _json.loads(_run_oracle_suite(name, seed))


def run_config(path, *extra):
    """Runs `hpboost run --config path` in-process; returns (exit code, stdout, stderr)."""
    return cli(["run", "--config", str(path), *map(str, extra)])
