"""Named scheme registry shared by the CLI and the benchmarks.

Labels follow the convention BE<q>/HM<q> where q is the claimed order after
recursive conjugate-pair composition of the order-1 backward Euler or the
order-2 Heun base flow.  The *S suffix denotes the symmetric average of the
two substep orderings, which gains two orders.
"""

from __future__ import annotations

from .composition import (
    FlowStep,
    pair_coefficients,
    recursive_composition,
    symmetric_average_step,
)
from .errors import ConfigError
from .integrators import BackwardEulerFlow, HeunFlow, OdeSystem
from .fem.stepping import BackwardEulerFemFlow, HeunFemFlow

#: label -> (base family, base order, claimed order, symmetric-average flag)
SCHEMES = {
    "BE1": ("BE", 1, 1, False),
    "BE2": ("BE", 1, 2, False),
    "BE3": ("BE", 1, 3, False),
    "BE4": ("BE", 1, 4, False),
    "HM1": ("HM", 2, 2, False),
    "HM2": ("HM", 2, 3, False),
    "HM4": ("HM", 2, 4, False),
    "BE1S": ("BE", 1, 3, True),
    "HM1S": ("HM", 2, 4, True),
}


def scheme_order(label: str) -> int:
    if label not in SCHEMES:
        raise ConfigError(f"unknown scheme label {label!r}")
    return SCHEMES[label][2]


def _wrap(base: FlowStep, label: str) -> FlowStep:
    family, p, q, symmetric = SCHEMES[label]
    if symmetric:
        return symmetric_average_step(base, pair_coefficients(p, 0))
    return recursive_composition(base, p, q)


def build_ode_flow(label: str, system: OdeSystem) -> FlowStep:
    """Instantiate a named scheme over an ODE system."""
    if label not in SCHEMES:
        raise ConfigError(f"unknown scheme label {label!r}")
    family = SCHEMES[label][0]
    base = BackwardEulerFlow(system) if family == "BE" else HeunFlow(system)
    return _wrap(base, label)


def build_fem_flow(label: str, space, velocity, C=0.5, tol=1e-10) -> FlowStep:
    """Instantiate a named scheme over the semi-discrete level-set system."""
    if label not in SCHEMES:
        raise ConfigError(f"unknown scheme label {label!r}")
    family = SCHEMES[label][0]
    if family == "BE":
        base = BackwardEulerFemFlow(space, velocity, C=C, tol=tol)
    else:
        base = HeunFemFlow(space, velocity, C=C, tol=tol)
    return _wrap(base, label)
