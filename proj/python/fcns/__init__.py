"""Python front end to the fcns library."""

import json as _json
from os import fspath as _fspath

from ._core import (  # noqa: F401
    ConfigError,
    ConstraintViolation,
    DomainError,
    EndStates,
    EpsProfile,
    InvalidEndStates,
    LimitProfile,
    PressureLaw,
    SolverError,
    __version__,
    eps_profile,
    eps_speed,
    eps_speed_printed,
    fit_loglog_slope,
    free_boundary_oracle,
    p_eval,
    scenarios,
    stability,
    three_zone,
    validate_hypotheses,
)
from . import _core


def resolve_config(scenario, **values):
    """Fully resolved configuration of a scenario as a dict."""
    return _json.loads(_core._resolve(scenario, _json.dumps(values)))


def run_scenario(scenario, out, **values):
    """Run a CLI scenario into ``out``; returns (exit_code, log)."""
    return _core._run(scenario, _json.dumps(values), _fspath(out))
