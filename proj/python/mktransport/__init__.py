"""Anisotropic distance functions, transport densities and minimizers on planar domains."""

import json as _json

from ._core import (
    ConfigurationError,
    ConvexBody,
    DistanceField,
    DomainBoundary,
    InputError,
    Region,
    SourceField,
    growth_factor,
    h3_threshold,
    is_unique,
    minimal_minimizer,
    transport_density,
)
from ._core import _run_json as _core_run

__all__ = [
    "ConfigurationError",
    "ConvexBody",
    "DistanceField",
    "DomainBoundary",
    "InputError",
    "Region",
    "SourceField",
    "growth_factor",
    "h3_threshold",
    "is_unique",
    "minimal_minimizer",
    "run_scenario",
    "transport_density",
]


def run_scenario(config, output=None, seed=None, tasks=()):
    """Run a scenario given as a dict or JSON text; returns (exit_code, summary_or_error)."""
    text = config if isinstance(config, str) else _json.dumps(config)
    code, payload = _core_run(text, None if output is None else str(output), seed, list(tasks))
    return code, _json.loads(payload)

