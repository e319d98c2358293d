"""Estimator-style wrappers around the exact solver and the RK reference.

``fit`` takes the initial state ``[x0, xdot0]``; ``predict(t)`` returns
``x(t)`` and ``transform(t)`` returns ``[x(t), xdot(t)]`` columns.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .families import BUILTINS
from .integrability import LienardSystem, check_chiellini
from .solver import InitialConditions, characteristic_time, fit_initial_conditions, solve_trajectory
from .verify import integrate_reference

__all__ = ["ExactLienardSolver", "ReferenceIntegrator", "resolve_system"]


def resolve_system(system, system_params=None) -> LienardSystem:
    """A built-in family name (``eq48``, ``eq53``, ``gvdp``) or a ready :class:`LienardSystem`."""
    if isinstance(system, LienardSystem):
        return system
    try:
        factory = BUILTINS[system]
    except KeyError:
        raise ValueError(f"unknown system {system!r}; expected one of {sorted(BUILTINS)}") from None
    return factory(**(system_params or {}))


def _initial_state(X):
    X = check_array(X, ensure_2d=False, dtype=np.float64)
    X = X.reshape(-1)
    if X.shape != (2,):
        raise ValueError(f"expected the initial state [x0, xdot0], got shape {X.shape}")
    return InitialConditions(float(X[0]), float(X[1]))


def _times(t):
    return check_array(np.asarray(t, dtype=float).reshape(-1, 1), dtype=np.float64).ravel()


class ExactLienardSolver(BaseEstimator):
    """Exact solution of a Chiellini-integrable Lienard system.

    Parameters
    ----------
    system : str or LienardSystem, default="eq48"
    system_params : dict, optional
        Keyword arguments of the built-in family.
    t_end : float, optional
        Final time; defaults to ``n_tau`` characteristic times ``1/|f(x0)|``.
    n_tau : float, default=5.0
    samples_per_piece : int, default=128
    """

    def __init__(self, system="eq48", system_params=None, t_end=None, n_tau=5.0, samples_per_piece=128):
        self.system = system
        self.system_params = system_params
        self.t_end = t_end
        self.n_tau = n_tau
        self.samples_per_piece = samples_per_piece

    def fit(self, X, y=None):
        ic = _initial_state(X)
        sys = resolve_system(self.system, self.system_params)
        cert = check_chiellini(sys)
        if not cert.holds:
            raise ValueError(f"system is not Chiellini-integrable: {cert}")
        k = sys.k if sys.k is not None else cert.k
        self.system_ = sys
        self.certificate_ = cert
        self.params_ = fit_initial_conditions(sys, k, ic)
        t_end = self.t_end if self.t_end is not None else self.n_tau * characteristic_time(sys, ic.x0)
        self.solution_ = solve_trajectory(sys, self.params_, t_end, self.samples_per_piece)
        return self

    def transform(self, t):
        check_is_fitted(self, "solution_")
        x, v = self.solution_.evaluate(_times(t))
        return np.column_stack([x, v])

    def predict(self, t):
        return self.transform(t)[:, 0]


class ReferenceIntegrator(BaseEstimator):
    """Adaptive DOP853 integration of the same system (the verification oracle)."""

    def __init__(self, system="eq48", system_params=None, t_end=5.0, tol=1e-12):
        self.system = system
        self.system_params = system_params
        self.t_end = t_end
        self.tol = tol

    def fit(self, X, y=None):
        ic = _initial_state(X)
        self.system_ = resolve_system(self.system, self.system_params)
        self.trajectory_ = integrate_reference(self.system_, ic, (0.0, self.t_end), self.tol)
        return self

    def transform(self, t):
        check_is_fitted(self, "trajectory_")
        x, v = self.trajectory_.evaluate(_times(t))
        return np.column_stack([x, v])

    def predict(self, t):
        return self.transform(t)[:, 0]
