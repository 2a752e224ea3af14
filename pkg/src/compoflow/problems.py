"""Lotka-Volterra benchmark problem, its first integral, and error metrics."""

from __future__ import annotations

import functools
import io
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .errors import DomainError
from .integrators import OdeSystem, TrajectoryRecord


@dataclass(frozen=True)
class LotkaVolterraParams:
    """Predator-prey rates and initial populations, all strictly positive."""

    alpha: float = 2.0 / 3.0
    beta: float = 4.0 / 3.0
    gamma: float = 1.0
    delta: float = 2.0 / 3.0
    u0: float = 2.0
    v0: float = 1.0

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma", "delta", "u0", "v0"):
            if getattr(self, name) <= 0:
                raise DomainError(f"{name} must be strictly positive")


def lv_system(params: LotkaVolterraParams) -> OdeSystem:
    """Two-species system u' = au - buv, v' = -dv + guv with its Jacobian."""
    a, b, g, d = params.alpha, params.beta, params.gamma, params.delta

    def rhs(t, y):
        u, v = y
        return np.array([a * u - b * u * v, -d * v + g * u * v])

    def jacobian(t, y):
        u, v = y
        return np.array([[a - b * v, -b * u], [g * v, -d + g * u]])

    return OdeSystem(dimension=2, rhs=rhs, jacobian=jacobian)


def lv_invariant(params: LotkaVolterraParams, u: float, v: float) -> float:
    """First integral F(u, v) = beta*v + gamma*u - alpha*log(v) - delta*log(u)."""
    if u <= 0 or v <= 0:
        raise DomainError(f"invariant requires positive populations, got ({u}, {v})")
    return (
        params.beta * v
        + params.gamma * u
        - params.alpha * np.log(v)
        - params.delta * np.log(u)
    )


@functools.lru_cache(maxsize=8)
def lv_period(params: LotkaVolterraParams, t_max: float = 100.0) -> float:
    """Orbit period through (u0, v0), found from a high-accuracy reference run.

    Detects the first return to the initial point: the event u = u0 with the
    crossing direction of the initial velocity, accepted when v is back at v0.
    """
    system = lv_system(params)
    du0 = system.rhs(0.0, np.array([params.u0, params.v0]))[0]
    direction = 1.0 if du0 > 0 else -1.0

    def crossing(t, y):
        return y[0] - params.u0

    crossing.direction = direction
    sol = solve_ivp(
        system.rhs,
        [0.0, t_max],
        [params.u0, params.v0],
        rtol=1e-12,
        atol=1e-14,
        events=crossing,
        dense_output=True,
    )
    for te in sol.t_events[0]:
        if te > 1e-8 and abs(sol.sol(te)[1] - params.v0) < 1e-6:
            return float(te)
    raise DomainError("no orbit return detected; increase t_max")


def lv_reference_trajectory(
    params: LotkaVolterraParams, times: np.ndarray
) -> np.ndarray:
    """High-accuracy oracle states at the given times (independent solver)."""
    system = lv_system(params)
    sol = solve_ivp(
        system.rhs,
        [float(times[0]), float(times[-1])],
        [params.u0, params.v0],
        rtol=1e-12,
        atol=1e-14,
        dense_output=True,
    )
    return sol.sol(times).T


def relative_invariant_error(
    params: LotkaVolterraParams, trajectory: TrajectoryRecord
) -> float:
    """Root-mean relative drift of the first integral over the samples n >= 1."""
    states = np.asarray(trajectory.states)
    u = states[1:, 0]
    v = states[1:, 1]
    bad = np.where((u <= 0) | (v <= 0))[0]
    if bad.size:
        raise DomainError(
            f"non-positive population at trajectory step {int(bad[0]) + 1}"
        )
    f0 = lv_invariant(params, params.u0, params.v0)
    fn = (
        params.beta * v
        + params.gamma * u
        - params.alpha * np.log(v)
        - params.delta * np.log(u)
    )
    num = np.sum(np.abs(f0 - fn) ** 2)
    den = np.sum(np.full(fn.shape, abs(f0) ** 2))
    return float(np.sqrt(num / den))


def roc(errors: Sequence[float], dts: Sequence[float]) -> list[float]:
    """Observed convergence rates between consecutive (dt, error) pairs."""
    errors = list(errors)
    dts = list(dts)
    if len(errors) != len(dts) or len(errors) < 2:
        raise DomainError("need equal-length lists with at least two entries")
    if any(e <= 0 for e in errors) or any(d <= 0 for d in dts):
        raise DomainError("errors and time steps must be strictly positive")
    return [
        np.log10(errors[i] / errors[i - 1]) / np.log10(dts[i] / dts[i - 1])
        for i in range(1, len(errors))
    ]


@dataclass
class ConvergenceTable:
    """Per-scheme rows of (dt, error, roc) with dt strictly decreasing."""

    scheme: str
    dts: list[float]
    errors: list[float]

    def __post_init__(self):
        if any(b >= a for a, b in zip(self.dts, self.dts[1:])):
            raise DomainError("dt column must be strictly decreasing")

    @property
    def rocs(self) -> list[Optional[float]]:
        if len(self.errors) < 2:
            return [None] * len(self.errors)
        return [None] + roc(self.errors, self.dts)

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write(f"# compoflow convergence table v1, scheme={self.scheme}\n")
        out.write("dt,error,roc\n")
        for dt, err, r in zip(self.dts, self.errors, self.rocs):
            rtxt = "--" if r is None else f"{r:.6g}"
            out.write(f"{dt:.6g},{err:.6g},{rtxt}\n")
        return out.getvalue()

    def write_csv(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_csv())


def asymptotic_roc(
    errors: Sequence[float], dts: Sequence[float], floor: float = 1e-12
) -> float:
    """Last observed rate whose error pair sits above the rounding floor."""
    rates = roc(errors, dts)
    for i in range(len(rates) - 1, -1, -1):
        if errors[i + 1] > floor and errors[i] > floor:
            return rates[i]
    return rates[-1]
