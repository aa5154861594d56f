"""Porous-medium stiff-pressure limit simulations.

Thin wrapper over the native ``_core`` module. Configs are plain dicts with
the same layout as the JSON files the command-line tool reads; reports come
back as the dicts written to ``summary.json`` and ``refinement.json``.
"""

from __future__ import annotations

import json
from typing import Any, Iterable, Mapping

import numpy as np

from . import _core
from ._core import (
    Error,
    barenblatt,
    gradient,
    identity_check_fund1,
    integrate,
    laplacian,
    operator_checks,
    pressure,
    read_snapshot,
    solve_newtonian,
)

SUMMARY_SCHEMA_VERSION = _core.SUMMARY_SCHEMA_VERSION

__all__ = [
    "Error",
    "SUMMARY_SCHEMA_VERSION",
    "barenblatt",
    "default_config",
    "gradient",
    "identity_check_fund1",
    "integrate",
    "laplacian",
    "normalize_config",
    "operator_checks",
    "pressure",
    "read_snapshot",
    "refine",
    "run",
    "solve_newtonian",
    "sweep",
]


def _dump(config: Mapping[str, Any] | None) -> str:
    return json.dumps(dict(config or {}))


def default_config() -> dict:
    """The default scenario as a config dict."""
    return json.loads(_core.default_config_json())


def normalize_config(config: Mapping[str, Any]) -> dict:
    """Validate ``config`` and return it with every default filled in."""
    return json.loads(_core.normalize_config_json(_dump(config)))


def run(config: Mapping[str, Any], m: float) -> tuple[list[dict], np.ndarray, int]:
    """Single run at exponent ``m``: (diagnostics records, density at T, steps)."""
    records, rho, steps = _core.run_single(_dump(config), float(m))
    return json.loads(records), rho, steps


def sweep(config: Mapping[str, Any], threads: int = 1, out: str | None = None) -> dict:
    """m-sweep; returns the summary dict and optionally writes the full report."""
    return json.loads(_core.run_sweep_json(_dump(config), threads, out or ""))


def refine(config: Mapping[str, Any], N_list: Iterable[int] = (), out: str | None = None) -> dict:
    """Grid refinement study; an empty ``N_list`` uses the config's list."""
    return json.loads(_core.run_refinement_json(_dump(config), list(N_list), out or ""))
