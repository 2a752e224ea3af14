"""Complex-coefficient composition of one-step flows.

A one-step scheme of order p can be promoted to order p+1 by chaining two
applications of itself with conjugate complex substep fractions, taking the
real part of the state once per macro step.  Repeating the construction
doubles the substep count and gains one order per level.  The real
"triple jump" (three substeps, one negative) is available for even base
orders, and the symmetric average of the two substep orderings gains two
orders at twice the cost.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DomainError, ScheduleError, SingularBranchError

#: Residual tolerance for the affine condition (sum of coefficients = 1).
SUM_TOL = 1e-13
#: Residual tolerance for the order-raising power condition.
POWER_TOL = 1e-12


def admissible_branches(p: int) -> range:
    """Admissible branch indices l for a conjugate pair at base order p."""
    if p <= 0:
        raise DomainError(f"base order must be positive, got {p}")
    if p % 2 == 0:
        return range(-p // 2, p // 2)
    return range(-(p + 1) // 2, (p - 1) // 2 + 1)


@dataclass(frozen=True)
class ComplexCoefficientPair:
    """Conjugate substep fractions raising a flow of order p to order p+1."""

    a1: complex
    a2: complex
    base_order: int
    branch: int

    def __post_init__(self):
        if abs(self.a2 - self.a1.conjugate()) > 1e-15:
            raise ScheduleError("a2 must be the conjugate of a1")
        if abs(self.a1 + self.a2 - 1.0) > 1e-15:
            raise ScheduleError("substep fractions must sum to 1")
        p = self.base_order
        if abs(self.a1 ** (p + 1) + self.a2 ** (p + 1)) > 1e-13:
            raise ScheduleError("power condition a1^(p+1) + a2^(p+1) = 0 violated")
        if self.branch not in admissible_branches(p):
            raise DomainError(
                f"branch l={self.branch} outside admissible range for p={p}"
            )


def pair_coefficients(p: int, l: int = 0) -> ComplexCoefficientPair:
    """Closed-form conjugate pair for base order p and branch index l.

    a1 = 1/2 + (i/2) sin(theta) / (1 + cos(theta)) with
    theta = (2l+1) pi / (p+1); a2 is the conjugate.
    """
    if l not in admissible_branches(p):
        raise DomainError(
            f"branch l={l} outside admissible range {list(admissible_branches(p))}"
            f" for p={p}"
        )
    theta = (2 * l + 1) * math.pi / (p + 1)
    den = 1.0 + math.cos(theta)
    if abs(den) < 1e-14:
        raise SingularBranchError(
            f"denominator 1 + cos((2l+1)pi/(p+1)) vanishes for p={p}, l={l}"
        )
    a1 = complex(0.5, 0.5 * math.sin(theta) / den)
    return ComplexCoefficientPair(a1=a1, a2=a1.conjugate(), base_order=p, branch=l)


def validate_conditions(
    coefficients: Sequence[complex], p: int
) -> tuple[float, float]:
    """Residuals of the two order-raising conditions.

    Returns (|sum a_i - 1|, |sum a_i^(p+1)|).
    """
    if len(coefficients) == 0:
        raise DomainError("coefficient list must be nonempty")
    coeffs = [complex(a) for a in coefficients]
    residual_sum = abs(sum(coeffs) - 1.0)
    residual_power = abs(sum(a ** (p + 1) for a in coeffs))
    return residual_sum, residual_power


def triple_jump_coefficients(p: int) -> tuple[float, float, float]:
    """Real symmetric three-substep solution for even base order p.

    a1 = a3 = 1/(2 - 2^(1/(p+1))), a2 = 1 - 2 a1.  The middle substep is
    negative, which is intrinsic to real solutions.
    """
    if p <= 0 or p % 2 != 0:
        raise DomainError(
            f"triple jump requires an even positive base order, got {p}"
        )
    a1 = 1.0 / (2.0 - 2.0 ** (1.0 / (p + 1)))
    a2 = 1.0 - 2.0 * a1
    return a1, a2, a1


@dataclass(frozen=True)
class CompositionSchedule:
    """Ordered substep fractions applied within one macro step.

    Coefficients are stored in application order: the first entry scales
    the first substep.  The real projection happens once, at the end of
    the macro step.
    """

    coefficients: tuple[complex, ...]
    base_order: int
    claimed_order: int

    def __post_init__(self):
        object.__setattr__(
            self, "coefficients", tuple(complex(a) for a in self.coefficients)
        )
        if self.claimed_order < self.base_order:
            raise ScheduleError("claimed order cannot be below the base order")
        rs, rp = validate_conditions(self.coefficients, self.base_order)
        if rs > SUM_TOL:
            raise ScheduleError(f"coefficient sum residual {rs:.3e} exceeds {SUM_TOL}")
        if len(self.coefficients) in (2, 3) and rp > POWER_TOL:
            raise ScheduleError(
                f"power condition residual {rp:.3e} exceeds {POWER_TOL}"
            )

    @classmethod
    def from_pair(cls, pair: ComplexCoefficientPair) -> "CompositionSchedule":
        return cls(
            coefficients=(pair.a1, pair.a2),
            base_order=pair.base_order,
            claimed_order=pair.base_order + 1,
        )

    @classmethod
    def triple_jump(cls, p: int) -> "CompositionSchedule":
        return cls(
            coefficients=tuple(triple_jump_coefficients(p)),
            base_order=p,
            claimed_order=p + 1,
        )


class FlowStep:
    """One-step map y -> Phi(t, y, dt) over complex-capable state.

    ``advance`` carries complex state through and never projects;
    ``step`` is the macro-step entry point and returns the real part.
    Instances are immutable once built (step counters aside) and safe to
    share across threads.
    """

    order: int = 0

    def advance(self, t: complex, y: np.ndarray, dt: complex) -> np.ndarray:
        raise NotImplementedError

    def step(self, t: float, y: np.ndarray, dt: float) -> np.ndarray:
        out = self.advance(complex(t), np.asarray(y, dtype=complex), dt)
        return np.real(out)

    def stability_factors(self, z: complex) -> list[complex]:
        """Base-scheme stability values whose product amplifies y' = lambda*y."""
        raise NotImplementedError

    def base_applications(self) -> int:
        """Number of elementary base-scheme applications per macro step."""
        return 1


@dataclass(frozen=True)
class StabilitySample:
    """One evaluation of a scheme's amplification factor S(z)."""

    z: complex
    value: complex
    in_region: bool


def stability_sample(flow: FlowStep, z: complex) -> StabilitySample:
    """Evaluate the stability function of ``flow`` at z = lambda*dt.

    For composed flows the value is the product of the base factors and
    region membership requires every factor to be bounded by 1 (the
    intersection of the translated base regions).  A pole in any factor
    yields an unbounded sample outside the region.
    """
    factors = flow.stability_factors(z)
    if any(not np.isfinite(f) for f in factors):
        return StabilitySample(z=z, value=complex(np.inf), in_region=False)
    value = complex(np.prod(factors))
    in_region = all(abs(f) <= 1.0 for f in factors)
    return StabilitySample(z=z, value=value, in_region=in_region)


class ComposedStep(FlowStep):
    """Successive application of a base flow with scaled complex substeps."""

    def __init__(self, base: FlowStep, schedule: CompositionSchedule):
        if schedule.base_order != base.order:
            raise ScheduleError(
                f"schedule base order {schedule.base_order} does not match "
                f"flow order {base.order}"
            )
        self.base = base
        self.schedule = schedule
        self.order = schedule.claimed_order

    def advance(self, t, y, dt):
        tc = complex(t)
        state = np.asarray(y, dtype=complex)
        for a in self.schedule.coefficients:
            state = self.base.advance(tc, state, a * dt)
            tc = tc + a * dt
        return state

    def stability_factors(self, z):
        factors = []
        for a in self.schedule.coefficients:
            factors.extend(self.base.stability_factors(a * z))
        return factors

    def base_applications(self):
        return len(self.schedule.coefficients) * self.base.base_applications()


def compose(base: FlowStep, schedule: CompositionSchedule) -> ComposedStep:
    """Wrap ``base`` with the substeps of ``schedule``."""
    return ComposedStep(base, schedule)


def recursive_composition(
    base: FlowStep,
    base_order: int,
    target_order: int,
    branch_policy=None,
) -> FlowStep:
    """Raise the order one conjugate-pair level at a time.

    ``branch_policy`` maps the current order to a branch index l;
    the default always picks l = 0.  Each level doubles the number of
    base applications per macro step.
    """
    if base.order != base_order:
        raise ScheduleError(
            f"declared base order {base_order} does not match flow order {base.order}"
        )
    if target_order < base_order:
        raise DomainError("target order must be at least the base order")
    if branch_policy is None:
        branch_policy = lambda p: 0
    flow = base
    for p in range(base_order, target_order):
        pair = pair_coefficients(p, branch_policy(p))
        flow = compose(flow, CompositionSchedule.from_pair(pair))
    return flow


class SymmetricAverageStep(FlowStep):
    """Half-sum of the two substep orderings; gains two orders.

    The imaginary parts of the two orderings are conjugate and cancel in
    the sum, so the averaged state is real up to rounding even before the
    macro-step projection.
    """

    def __init__(self, base: FlowStep, pair: ComplexCoefficientPair):
        if pair.base_order != base.order:
            raise ScheduleError(
                f"pair base order {pair.base_order} does not match "
                f"flow order {base.order}"
            )
        self.base = base
        self.pair = pair
        self.order = base.order + 2

    def _chain(self, t, y, dt, first, second):
        mid = self.base.advance(t, y, first * dt)
        return self.base.advance(t + first * dt, mid, second * dt)

    def advance(self, t, y, dt):
        tc = complex(t)
        state = np.asarray(y, dtype=complex)
        a1, a2 = self.pair.a1, self.pair.a2
        forward = self._chain(tc, state, dt, a1, a2)
        reverse = self._chain(tc, state, dt, a2, a1)
        return 0.5 * (forward + reverse)

    def stability_factors(self, z):
        # Both orderings share the same factor multiset.
        f1 = self.base.stability_factors(self.pair.a1 * z)
        f2 = self.base.stability_factors(self.pair.a2 * z)
        return f1 + f2

    def base_applications(self):
        return 4 * self.base.base_applications()


def symmetric_average_step(
    base: FlowStep, pair: ComplexCoefficientPair
) -> SymmetricAverageStep:
    """Build the order p+2 symmetric average of the two pair orderings."""
    return SymmetricAverageStep(base, pair)


class IdentityFlow(FlowStep):
    """Trivial flow used in tests and as a composition sanity anchor."""

    order = 1

    def advance(self, t, y, dt):
        return np.asarray(y, dtype=complex)

    def stability_factors(self, z):
        return [1.0 + 0.0j]
