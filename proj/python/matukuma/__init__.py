"""Radial solutions of u'' + (n-1)/r u' + f(r) u^p = 0 by shooting.

Problems, tolerances and reports are plain dictionaries with the same layout
as the JSON configs and outputs of the ``matukuma`` command-line tool.
"""

import json

from . import _core
from ._core import (
    ConfigError,
    DomainError,
    NumericError,
    ValidationError,
    critical_exponent,
    critical_profile,
    example_iii_solution,
    gamma_star,
)

__all__ = [
    "ConfigError",
    "DomainError",
    "NumericError",
    "ValidationError",
    "critical_exponent",
    "critical_profile",
    "example_iii_solution",
    "gamma_star",
    "problem",
    "weight_f",
    "phi_closed_form",
    "hypotheses",
    "shoot",
    "trajectory",
    "pohozaev",
    "sweep",
    "theorem5",
    "small_alpha",
    "oracles",
]


def _dump(obj):
    return json.dumps(obj)


def _tol(tol):
    return "" if tol is None else json.dumps(tol)


def problem(spec):
    """Validated problem with defaults filled in (p defaults to p*)."""
    return json.loads(_core.normalize_problem(_dump(spec)))


def weight_f(spec, r):
    """Weight f evaluated at each radius in ``r``."""
    return _core.weight_f(_dump(spec), [float(x) for x in r])


def phi_closed_form(spec, alpha, r):
    return _core.phi_closed_form(_dump(spec), alpha, r)


def hypotheses(spec):
    return json.loads(_core.hypotheses(_dump(spec)))


def shoot(spec, alpha, tol=None):
    """Classification of the solution with u(0) = alpha."""
    return json.loads(_core.shoot(_dump(spec), alpha, _tol(tol)))


def trajectory(spec, alpha, horizon, tol=None):
    """Integrator samples as columns r, u, du, w, dw, plus the events."""
    return json.loads(_core.trajectory(_dump(spec), alpha, horizon, _tol(tol)))


def pohozaev(spec, alpha, radii, horizon=None, tol=None):
    radii = [float(R) for R in radii]
    horizon = max(radii) if horizon is None else horizon
    return json.loads(_core.pohozaev(_dump(spec), alpha, radii, horizon, _tol(tol)))


def sweep(spec, alphas, tol=None, jobs=1):
    return json.loads(_core.sweep(_dump(spec), [float(a) for a in alphas], _tol(tol), jobs))


def theorem5(bump, spec, epsilon=0.1, alpha_star=1.0, r_star=2.1, delta=0.2, tol=None, jobs=1):
    return json.loads(
        _core.theorem5(_dump(bump), _dump(spec), epsilon, alpha_star, r_star, delta, _tol(tol), jobs)
    )


def small_alpha(spec, tol=None):
    return json.loads(_core.small_alpha(_dump(spec), _tol(tol)))


def oracles(tol=None):
    return json.loads(_core.oracles(_tol(tol)))
