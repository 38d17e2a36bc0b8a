"""Mixed Nash equilibria of continuous zero-sum games via interacting Langevin particles.

Subpackages: games (losses and gradients), particles (descent-ascent SDE
simulation), measures (measure containers and transport metrics), meanfield
(Fokker-Planck limit and controlled variants), ni (Nikaido-Isoda error),
ldp (path-space rate functionals and deviation probabilities), cli (batch
experiments).
"""

__version__ = "0.1.0"

from .games import (  # noqa: F401
    Game,
    RegularityConstants,
    bilinear,
    quadratic_bilinear,
    sine_cosine,
    constant,
    make_game,
    check_gradients,
    regularity_constants,
)
from .measures import (  # noqa: F401
    EmpiricalMeasure,
    GridMeasure,
    MeasurePath,
    gaussian_grid,
    uniform_grid,
    grid_from_function,
    point_mass_grid,
    w1_1d,
    sliced_wp,
    dbl_lower_bound,
    kde_lift,
)
from .particles import (  # noqa: F401
    InitSpec,
    SimConfig,
    ParticleState,
    TrajectoryRecording,
    drift,
    em_step,
    simulate,
    empirical_marginals,
    empirical_joint,
)
from .meanfield import (  # noqa: F401
    PdeConfig,
    ControlPotential,
    potentials,
    pde_step,
    solve_meanfield,
    controlled_pde_step,
    solve_controlled,
    stationarity_residual,
)
from .ni import (  # noqa: F401
    SearchConfig,
    best_response_x,
    best_response_y,
    ni_error,
    ni_trajectory,
    ni_lipschitz_check,
)
from .ldp import (  # noqa: F401
    TestBasis,
    RateReport,
    DeviationEvent,
    DeviationTable,
    adjoint_apply,
    rayleigh_sup,
    rate_integrand,
    rate_functional,
    control_cost,
    deviation_probability,
    ni_rate_pairs,
)
