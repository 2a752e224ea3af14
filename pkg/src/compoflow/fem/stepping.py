"""Matrix-form one-step flows for the semi-discrete level-set system.

Both flows accept complex step scalings so they can serve as composition
bases.  Matrices stay real: they are assembled at the real part of the
accumulated complex time, and complexity enters only through the step
scaling (and hence the factorized system matrix for the implicit flow).
"""

from __future__ import annotations

from collections import OrderedDict
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from ..composition import FlowStep
from ..errors import LinearSolveError
from .assembly import FemOperators, assemble_operators
from .fields import VelocityField
from .mesh import FemSpace


@dataclass
class LevelSetState:
    """Degrees of freedom of the level-set field at a (possibly complex) time."""

    dofs: np.ndarray
    space: FemSpace
    t: complex = 0.0

    def projected(self) -> "LevelSetState":
        return LevelSetState(dofs=np.real(self.dofs), space=self.space, t=self.t)


class _BoundedDict(OrderedDict):
    def __init__(self, max_entries):
        super().__init__()
        self.max_entries = max_entries

    def put(self, key, value):
        self[key] = value
        if len(self) > self.max_entries:
            self.popitem(last=False)


class OperatorCache:
    """Memoized assemblies and factorizations for one (space, velocity) run.

    Time-independent velocities collapse every assembly key to a single
    entry, so frozen-operator runs factorize once per distinct step scaling.
    """

    def __init__(
        self,
        space: FemSpace,
        velocity: VelocityField,
        C: float = 0.5,
        tol: float = 1e-10,
        max_entries: int = 12,
    ):
        self.space = space
        self.velocity = velocity
        self.C = C
        self.tol = tol
        self._ops = _BoundedDict(max_entries)
        self._system_lu = _BoundedDict(max_entries)
        self._mass_lu = _BoundedDict(max_entries)
        self.assembly_count = 0
        self.factorization_count = 0

    def _key(self, t: float):
        if not self.velocity.time_dependent:
            return 0.0
        return round(float(t), 12)

    def operators(self, t: float) -> FemOperators:
        key = self._key(t)
        ops = self._ops.get(key)
        if ops is None:
            ops = assemble_operators(
                self.space, self.velocity, t, C=self.C, tol=self.tol
            )
            self.assembly_count += 1
            self._ops.put(key, ops)
        return ops

    def system_solve(self, t: float, dt: complex, rhs: np.ndarray) -> np.ndarray:
        """Solve (M(t) + dt K(t)) x = rhs with a cached factorization."""
        dt = complex(dt)
        scale = dt.real if dt.imag == 0.0 else dt
        key = (self._key(t), round(dt.real, 15), round(dt.imag, 15))
        entry = self._system_lu.get(key)
        if entry is None:
            ops = self.operators(t)
            A = ops.M + scale * ops.K
            try:
                lu = spla.splu(sp.csc_matrix(A))
            except RuntimeError as exc:
                raise LinearSolveError(
                    f"singular system matrix at t={t}, dt={dt}"
                ) from exc
            self.factorization_count += 1
            entry = (lu, np.iscomplexobj(A.data) if sp.issparse(A) else False)
            self._system_lu.put(key, entry)
        lu, is_complex = entry
        if np.iscomplexobj(rhs) and not is_complex:
            return lu.solve(np.real(rhs)) + 1j * lu.solve(np.imag(rhs))
        if is_complex and not np.iscomplexobj(rhs):
            rhs = rhs.astype(complex)
        return lu.solve(rhs)

    def mass_solve(self, t: float, rhs: np.ndarray) -> np.ndarray:
        """Apply M(t)^{-1}; the real factorization handles complex sides."""
        key = self._key(t)
        lu = self._mass_lu.get(key)
        if lu is None:
            ops = self.operators(t)
            lu = spla.splu(sp.csc_matrix(ops.M))
            self.factorization_count += 1
            self._mass_lu.put(key, lu)
        if np.iscomplexobj(rhs):
            return lu.solve(rhs.real) + 1j * lu.solve(rhs.imag)
        return lu.solve(rhs)


def _be1_advance(cache: OperatorCache, t: complex, a: np.ndarray, dt: complex):
    t_next = t + dt
    m_prev = cache.operators(complex(t).real).M
    rhs = m_prev @ a
    return cache.system_solve(complex(t_next).real, dt, rhs), t_next


def _hm1_advance(cache: OperatorCache, t: complex, a: np.ndarray, dt: complex):
    t_next = t + dt
    k_prev = cache.operators(complex(t).real).K
    k_next = cache.operators(complex(t_next).real).K
    w1 = cache.mass_solve(complex(t_next).real, k_prev @ a)
    inner = a - dt * w1
    w2 = cache.mass_solve(complex(t_next).real, k_next @ inner)
    return a - (dt / 2.0) * (w1 + w2), t_next


def be1_fem_step(
    state: LevelSetState, cache: OperatorCache, dt: complex
) -> LevelSetState:
    """One implicit Euler step of M a' + K a = 0 in matrix form."""
    dofs, t_next = _be1_advance(cache, state.t, state.dofs, dt)
    return LevelSetState(dofs=dofs, space=state.space, t=t_next)


def hm1_fem_step(
    state: LevelSetState, cache: OperatorCache, dt: complex
) -> LevelSetState:
    """One explicit Heun step of M a' + K a = 0 in matrix form."""
    dofs, t_next = _hm1_advance(cache, state.t, state.dofs, dt)
    return LevelSetState(dofs=dofs, space=state.space, t=t_next)


class BackwardEulerFemFlow(FlowStep):
    """Order-1 implicit flow over the semi-discrete level-set system."""

    order = 1

    def __init__(self, space, velocity, C=0.5, tol=1e-10, cache=None):
        self.cache = cache or OperatorCache(space, velocity, C=C, tol=tol)

    def advance(self, t, y, dt):
        dofs, _ = _be1_advance(self.cache, t, np.asarray(y, dtype=complex), dt)
        return dofs

    def stability_factors(self, z):
        den = 1.0 - z
        if den == 0:
            return [complex(np.inf)]
        return [1.0 / den]


class HeunFemFlow(FlowStep):
    """Order-2 explicit flow over the semi-discrete level-set system."""

    order = 2

    def __init__(self, space, velocity, C=0.5, tol=1e-10, cache=None):
        self.cache = cache or OperatorCache(space, velocity, C=C, tol=tol)

    def advance(self, t, y, dt):
        dofs, _ = _hm1_advance(self.cache, t, np.asarray(y, dtype=complex), dt)
        return dofs

    def stability_factors(self, z):
        return [1.0 + z + 0.5 * z * z]
