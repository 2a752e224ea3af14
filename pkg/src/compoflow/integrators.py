"""Base one-step flows for ODE systems and a fixed-step trajectory driver.

Backward Euler is solved with a damped-free Newton iteration (analytic
Jacobian when supplied, central finite differences otherwise); Heun is the
explicit two-stage second-order Runge-Kutta scheme.  Both accept complex
step scalings and complex state so they can serve as composition bases.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .composition import FlowStep
from .errors import LinearSolveError, NewtonConvergenceError, StepFailureError


@dataclass(frozen=True)
class OdeSystem:
    """Right-hand side f(t, y) with an optional analytic Jacobian."""

    dimension: int
    rhs: Callable[[complex, np.ndarray], np.ndarray]
    jacobian: Optional[Callable[[complex, np.ndarray], np.ndarray]] = None

    def jac(self, t, y):
        if self.jacobian is not None:
            return np.asarray(self.jacobian(t, y), dtype=complex)
        return finite_difference_jacobian(self.rhs, t, y)


def finite_difference_jacobian(rhs, t, y):
    """Central-difference Jacobian with perturbation sqrt(eps)*(1+|y_j|)."""
    y = np.asarray(y, dtype=complex)
    n = y.size
    J = np.empty((n, n), dtype=complex)
    scale = np.sqrt(np.finfo(float).eps)
    for j in range(n):
        h = scale * (1.0 + abs(y[j]))
        yp = y.copy()
        ym = y.copy()
        yp[j] += h
        ym[j] -= h
        J[:, j] = (np.asarray(rhs(t, yp)) - np.asarray(rhs(t, ym))) / (2.0 * h)
    return J


@dataclass(frozen=True)
class NewtonOptions:
    tol: float = 1e-12
    max_iter: int = 25


def backward_euler_step(
    system: OdeSystem,
    t: complex,
    y: np.ndarray,
    step: complex,
    options: NewtonOptions = NewtonOptions(),
) -> np.ndarray:
    """Solve y+ = y + step*f(t+step, y+) by Newton iteration from y."""
    y = np.asarray(y, dtype=complex)
    if step == 0:
        return y.copy()
    t_next = t + step
    x = y.copy()
    eye = np.eye(system.dimension, dtype=complex)
    residual = np.inf
    for _ in range(options.max_iter):
        g = x - y - step * np.asarray(system.rhs(t_next, x), dtype=complex)
        residual = np.max(np.abs(g))
        if residual < options.tol * (1.0 + np.max(np.abs(x))):
            return x
        J = eye - step * system.jac(t_next, x)
        try:
            dx = np.linalg.solve(J, g)
        except np.linalg.LinAlgError as exc:
            raise LinearSolveError(
                f"singular Newton matrix at t={t_next}", residual=residual
            ) from exc
        x = x - dx
    # accept a last-iterate that meets the tolerance after the final update
    g = x - y - step * np.asarray(system.rhs(t_next, x), dtype=complex)
    residual = np.max(np.abs(g))
    if residual < options.tol * (1.0 + np.max(np.abs(x))):
        return x
    raise NewtonConvergenceError(
        f"Newton failed to converge in {options.max_iter} iterations "
        f"(residual {residual:.3e})",
        residual=residual,
    )


def heun_step(system: OdeSystem, t: complex, y: np.ndarray, step: complex) -> np.ndarray:
    """Explicit trapezoidal predictor-corrector (second-order RK)."""
    y = np.asarray(y, dtype=complex)
    k1 = np.asarray(system.rhs(t, y), dtype=complex)
    k2 = np.asarray(system.rhs(t + step, y + step * k1), dtype=complex)
    return y + (step / 2.0) * (k1 + k2)


class BackwardEulerFlow(FlowStep):
    """Order-1 implicit flow; counts nonlinear solves for cost reporting."""

    order = 1

    def __init__(self, system: OdeSystem, newton: NewtonOptions = NewtonOptions()):
        self.system = system
        self.newton = newton
        self.solve_count = 0

    def advance(self, t, y, dt):
        self.solve_count += 1
        return backward_euler_step(self.system, t, y, dt, self.newton)

    def stability_factors(self, z):
        den = 1.0 - z
        if den == 0:
            return [complex(np.inf)]
        return [1.0 / den]


class HeunFlow(FlowStep):
    """Order-2 explicit flow."""

    order = 2

    def __init__(self, system: OdeSystem):
        self.system = system
        self.eval_count = 0

    def advance(self, t, y, dt):
        self.eval_count += 2
        return heun_step(self.system, t, y, dt)

    def stability_factors(self, z):
        return [1.0 + z + 0.5 * z * z]


@dataclass
class TrajectoryRecord:
    """Uniformly sampled times, post-projection states, and diagnostics."""

    times: np.ndarray
    states: np.ndarray
    invariant_values: Optional[np.ndarray] = None
    wall_clock_seconds: float = 0.0

    def __post_init__(self):
        if len(self.times) != len(self.states):
            raise ValueError("times and states lengths disagree")


def integrate(
    flow: FlowStep,
    y0: np.ndarray,
    t0: float,
    T: float,
    N: int,
    observer: Optional[Callable[[float, np.ndarray], None]] = None,
) -> TrajectoryRecord:
    """Apply ``flow`` N times with uniform step (T - t0)/N.

    States are stored after the per-macro-step real projection; the
    observer sees each (t_n, y_n) as it is produced.
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    dt = (T - t0) / N
    y = np.asarray(y0, dtype=float)
    times = t0 + dt * np.arange(N + 1)
    states = np.empty((N + 1, y.size), dtype=float)
    states[0] = y
    start = time.perf_counter()
    for n in range(1, N + 1):
        t_prev = t0 + (n - 1) * dt
        try:
            y = flow.step(t_prev, y, dt)
        except StepFailureError as exc:
            exc.step_index = n
            raise
        states[n] = y
        if observer is not None:
            observer(times[n], y)
    elapsed = time.perf_counter() - start
    return TrajectoryRecord(times=times, states=states, wall_clock_seconds=elapsed)
