"""Linear-system, ODE and PDE solvers."""
from .linear import LinearSystemProblem, SolveReport, hhl, qlsa_chebyshev, qlsa_pd, qlsa_qsp
from .ode import ClockSystem, ODEProblem, ode_clock_build, ode_solve
from .pde import kron_sum_exp, kron_sum_laplacian, laplacian_1d, wave_lift

__all__ = [
    "LinearSystemProblem", "SolveReport", "hhl", "qlsa_chebyshev", "qlsa_pd", "qlsa_qsp",
    "ClockSystem", "ODEProblem", "ode_clock_build", "ode_solve",
    "kron_sum_exp", "kron_sum_laplacian", "laplacian_1d", "wave_lift",
]
