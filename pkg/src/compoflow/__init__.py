"""compoflow: higher-order time integration by complex-coefficient composition.

Composition of simple one-step schemes (implicit backward Euler, explicit
Heun) with conjugate complex substep fractions, benchmarked on the
Lotka-Volterra system and on SUPG-stabilized finite-element level-set
advection.
"""

from .composition import (
    ComplexCoefficientPair,
    CompositionSchedule,
    ComposedStep,
    FlowStep,
    StabilitySample,
    compose,
    pair_coefficients,
    recursive_composition,
    stability_sample,
    symmetric_average_step,
    triple_jump_coefficients,
    validate_conditions,
)
from .integrators import (
    BackwardEulerFlow,
    HeunFlow,
    NewtonOptions,
    OdeSystem,
    TrajectoryRecord,
    backward_euler_step,
    heun_step,
    integrate,
)
from .problems import (
    ConvergenceTable,
    LotkaVolterraParams,
    lv_invariant,
    lv_period,
    lv_system,
    relative_invariant_error,
    roc,
)
from .schemes import SCHEMES, build_fem_flow, build_ode_flow, scheme_order

__version__ = "0.1.0"
