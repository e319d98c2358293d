"""Exact solutions of Chiellini-integrable Lienard equations.

``x'' + f(x) x' + g(x) = 0`` is exactly integrable when
``d/dx (g/f) = k f``; its trajectories are then given in parametric form
with ``g/f = C^{-1} exp(F(w, k))``. The package builds such systems,
produces their exact solutions, and checks them against a Runge-Kutta
reference.
"""
from .exceptions import (
    BracketError,
    DomainError,
    IntegrationError,
    LienardError,
    PoleError,
    QuadratureError,
    SingularCoefficientError,
    TimeRangeError,
    WindowError,
)
from .funcmodel import BlackBox, Polynomial, antiderivative, derivative, evaluate, parse_poly
from .integrability import (
    ChielliniCertificate,
    GeneralAbel,
    LienardSystem,
    StandardAbelPair,
    check_chiellini,
    check_lemma2,
    construct_f_from_g,
    construct_g_from_f,
    reduce_levinson_smith,
)
from .kernel import G0, F_closed, F_prime, F_quadrature, KernelRegime, RegimeTag, kernel_poles
from .families import generalized_vdp, invert_cubic_vdp, linear_f, linear_g
from .solver import (
    ChielliniParams,
    InitialConditions,
    KZeroParams,
    ParametricSolution,
    characteristic_time,
    emit_time_series,
    fit_initial_conditions,
    solve_k_zero,
    solve_parametric,
    solve_trajectory,
)
from .verify import ComparisonReport, ReferenceTrajectory, abel_residual, compare, integrate_reference
from .asymptotics import (
    approx_large_w,
    approx_linear_f_large_x,
    approx_linear_f_small_x,
    approx_small_w,
    erfi,
)
from .estimators import ExactLienardSolver, ReferenceIntegrator

__version__ = "0.1.0"
