"""Exact solver for the simplex-constrained convex quadratic program

    minimize  w' Q w - 2 w' f   subject to  sum(w) = 1,  w >= 0.

The view count m is tiny (a handful), so the primary solver enumerates all
2^m - 1 support sets, solves each equality-constrained KKT system exactly,
and keeps the feasible candidate with the lowest objective.  This is fully
deterministic and yields the global optimum of the convex problem together
with a checkable KKT certificate.  An accelerated projected-gradient
solver is provided as a fallback for m beyond the enumeration budget and
as an independent route for cross-checking objectives.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import DataError, NumericalError

_ENUM_BUDGET = 16
_PRIMAL_TOL = 1e-12
_DUAL_TOL = 1e-8


@dataclass(frozen=True)
class SimplexQp:
    """Problem data: symmetric PSD matrix Q and linear term f.

    Eigenvalues of Q in [-1e-8, 0) are treated as zero (clipped); anything
    more negative is rejected rather than silently convexified.
    """

    Q: np.ndarray
    f: np.ndarray

    def __post_init__(self):
        Q = np.asarray(self.Q, dtype=float)
        f = np.asarray(self.f, dtype=float)
        if Q.ndim != 2 or Q.shape[0] != Q.shape[1]:
            raise DataError("Q must be square")
        if f.shape != (Q.shape[0],):
            raise DataError("f length must match Q")
        if np.abs(Q - Q.T).max() > 1e-10:
            raise DataError("Q must be symmetric within 1e-10")
        w = np.linalg.eigvalsh(Q)
        if w[0] < -1e-8:
            raise DataError(f"Q is not PSD: min eigenvalue {w[0]:.3e} < -1e-8")
        if w[0] < 0.0:
            vals, vecs = np.linalg.eigh(Q)
            Q = (vecs * np.maximum(vals, 0.0)) @ vecs.T
            Q = (Q + Q.T) / 2.0
        object.__setattr__(self, "Q", Q)
        object.__setattr__(self, "f", f)

    @property
    def m(self) -> int:
        return self.f.shape[0]

    def objective(self, w: np.ndarray) -> float:
        w = np.asarray(w, dtype=float)
        return float(w @ self.Q @ w - 2.0 * (self.f @ w))


@dataclass(frozen=True)
class ViewWeights:
    """Simplex weight vector with solver diagnostics."""

    omega: np.ndarray
    objective: float
    active_support: tuple

    def __post_init__(self):
        omega = np.asarray(self.omega, dtype=float)
        if omega.min() < 0:
            raise DataError("weights must be nonnegative")
        if abs(omega.sum() - 1.0) > 1e-12:
            raise DataError("weights must sum to 1 within 1e-12")
        object.__setattr__(self, "omega", omega)


def project_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto the probability simplex (sorted-threshold rule)."""
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise DataError("project_simplex expects a nonempty vector")
    u = np.sort(v)[::-1]
    cumulative = np.cumsum(u)
    ranks = np.arange(1, v.size + 1)
    support = np.flatnonzero(u - (cumulative - 1.0) / ranks > 0.0)
    rho = support[-1]
    theta = (cumulative[rho] - 1.0) / (rho + 1.0)
    w = np.maximum(v - theta, 0.0)
    return w / w.sum()


def _clean_weights(problem: SimplexQp, omega: np.ndarray) -> ViewWeights:
    omega = np.maximum(np.asarray(omega, dtype=float), 0.0)
    omega = omega / omega.sum()
    support = tuple(int(i) for i in np.flatnonzero(omega > 0.0))
    return ViewWeights(
        omega=omega, objective=problem.objective(omega), active_support=support
    )


def solve(problem: SimplexQp) -> ViewWeights:
    """Global minimizer by support enumeration.

    For each nonempty support T the equality-constrained KKT system

        [2 Q_TT  1] [w_T ]   [2 f_T]
        [1'      0] [mu  ] = [1    ]

    is solved (pseudoinverse on singular systems).  A candidate is
    accepted when the primal block is nonnegative (within 1e-12) and the
    off-support duals ``2 (Q w)_i - 2 f_i + mu`` are nonnegative (within
    1e-8); among accepted candidates the lowest objective wins, ties going
    to the lexicographically smallest support.
    """
    m = problem.m
    if m > _ENUM_BUDGET:
        raise DataError(
            f"m = {m} exceeds the enumeration budget {_ENUM_BUDGET}; "
            "use solve_projected_gradient"
        )
    Q, f = problem.Q, problem.f
    dual_scale = max(1.0, 2.0 * np.abs(Q).max() + 2.0 * np.abs(f).max())
    accepted = []     # (objective, support, omega)
    primal_only = []  # fallback pool if dual tolerances reject everything
    for size in range(1, m + 1):
        for support in combinations(range(m), size):
            T = list(support)
            K = np.zeros((size + 1, size + 1))
            K[:size, :size] = 2.0 * Q[np.ix_(T, T)]
            K[:size, size] = 1.0
            K[size, :size] = 1.0
            rhs = np.concatenate([2.0 * f[T], [1.0]])
            try:
                sol = np.linalg.solve(K, rhs)
            except np.linalg.LinAlgError:
                sol = np.linalg.pinv(K) @ rhs
            if not np.isfinite(sol).all():
                continue
            w_T, mu = sol[:size], sol[size]
            if abs(w_T.sum() - 1.0) > 1e-9:
                continue  # pseudoinverse of a singular system missed the constraint
            if w_T.min() <= -_PRIMAL_TOL:
                continue
            omega = np.zeros(m)
            omega[T] = np.maximum(w_T, 0.0)
            omega /= omega.sum()
            entry = (problem.objective(omega), support, omega)
            primal_only.append(entry)
            duals = 2.0 * (Q @ omega) - 2.0 * f + mu
            off = np.setdiff1d(np.arange(m), T)
            if off.size == 0 or duals[off].min() >= -_DUAL_TOL * dual_scale:
                accepted.append(entry)
    pool = accepted if accepted else primal_only
    obj, _, omega = min(pool, key=lambda e: (e[0], e[1]))
    return _clean_weights(problem, omega)


def solve_projected_gradient(
    problem: SimplexQp, tol: float = 1e-12, max_iter: int = 200_000
) -> ViewWeights:
    """Accelerated projected gradient from the barycenter.

    Momentum is restarted whenever it would increase the objective, which
    keeps the iteration monotone; the loop stops once successive
    objectives differ by less than ``tol``.
    """
    if tol <= 0:
        raise DataError("tol must be positive")
    Q, f, m = problem.Q, problem.f, problem.m
    lipschitz = 2.0 * max(float(np.linalg.eigvalsh(Q)[-1]), 0.0)
    if lipschitz <= 1e-300:
        # objective is linear: the optimum is the best vertex
        return _clean_weights(problem, np.eye(m)[int(np.argmax(f))])
    step = 1.0 / lipschitz

    x = np.full(m, 1.0 / m)
    fx = problem.objective(x)
    y = x
    t = 1.0
    for _ in range(max_iter):
        x_new = project_simplex(y - step * (2.0 * (Q @ y) - 2.0 * f))
        f_new = problem.objective(x_new)
        if f_new > fx:
            # momentum overshot; plain descent step from the last iterate
            y, t = x, 1.0
            x_new = project_simplex(x - step * (2.0 * (Q @ x) - 2.0 * f))
            f_new = problem.objective(x_new)
        if abs(fx - f_new) < tol:
            return _clean_weights(problem, x_new)
        t_new = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
        y = x_new + ((t - 1.0) / t_new) * (x_new - x)
        x, fx, t = x_new, f_new, t_new
    raise NumericalError(
        f"projected gradient did not reach tol={tol} within {max_iter} iterations"
    )


def kkt_certificate(problem: SimplexQp, w: ViewWeights, tol: float = 1e-8) -> dict:
    """Evaluate the KKT conditions at a candidate solution.

    Returns the worst violations; ``satisfied`` is True when stationarity,
    complementary slackness, and primal/dual feasibility all hold within
    ``tol`` (scaled by the problem magnitude).
    """
    omega = w.omega
    g = 2.0 * (problem.Q @ omega) - 2.0 * problem.f
    active = omega > tol
    mu = -float(np.mean(g[active])) if active.any() else 0.0
    nu = g + mu
    scale = max(1.0, np.abs(g).max())
    report = {
        "stationarity": float(np.abs(nu[active]).max()) if active.any() else 0.0,
        "dual_feasibility": float(max(0.0, -(nu.min()))),
        "complementarity": float(np.abs(nu * omega).max()),
        "primal_sum": float(abs(omega.sum() - 1.0)),
        "primal_nonneg": float(max(0.0, -(omega.min()))),
    }
    report["satisfied"] = all(
        violation <= tol * scale
        for key, violation in report.items()
        if key != "satisfied"
    )
    return report
