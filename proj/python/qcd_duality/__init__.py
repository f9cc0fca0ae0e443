"""Python bindings for the qcd_duality library."""

import json

from ._core import (
    RNG_NAME,
    Error,
    draw_chain,
    lax_from_momenta,
    predicted_strings,
    r_matrix,
    rs_evolve,
    solve_bae,
    verify_duality,
    verify_lemma1,
)
from . import _core

__all__ = [
    "RNG_NAME",
    "Error",
    "draw_chain",
    "lax_from_momenta",
    "payload",
    "predicted_strings",
    "r_matrix",
    "rs_evolve",
    "run_command",
    "solve_bae",
    "verify_duality",
    "verify_lemma1",
]


def run_command(command, config=None, *, seed=None, tol=None, trials=None):
    """Run a CLI command in process.

    ``config`` is a dict or a JSON string; ``schema_version`` defaults to "1".
    Returns ``(exit_code, report, message)`` with the report as a dict, or
    None when no report was produced.
    """
    if config is None:
        config = {}
    if isinstance(config, dict):
        config = json.dumps({"schema_version": "1", **config})
    code, report, message = _core.run_command(command, config, seed, tol, trials)
    return code, (json.loads(report) if report else None), message


def payload(report):
    """Serialized report without the timestamp, for byte comparisons."""
    return _core.payload(json.dumps(report))
