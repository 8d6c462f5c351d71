"""
Augmented-Lagrangian solver for bound-constrained NLPs.

Works on scaled variables y = x / var_scale. Each row is divided by its
constraint scale and by the norm of its scaled Jacobian row at the start
point, so penalized residuals r have comparable sensitivity. Each outer
iteration minimizes

    L(y) = f_s·f(x) + Σ_eq (-λr + μ/2 r²) + Σ_ge ψ(r; λ, μ)

over the box with L-BFGS-B. The multipliers move only after an inner solve
that reached its gradient tolerance; the penalty grows only when the
violation fell by less than ``violation_decrease`` since the last inner
solve. A sparse Gauss-Newton restoration pulls an infeasible start, or a
point where the violation stalls, back onto the constraints.

Reported multipliers refer to c / con_scale and the unscaled objective.
"""

import logging
import time
from typing import Optional, Tuple

import numpy as np
from scipy import sparse
from scipy.optimize import Bounds, least_squares, minimize
from scipy.sparse.linalg import lsqr

from heatnet.core.exceptions import EvaluationDomainError
from heatnet.nlp.model import NlpModel
from heatnet.solver.config import SolverConfig
from heatnet.solver.result import IterationRecord, SolveResult, SolveStatus, WarmStart

logger = logging.getLogger(__name__)

ROW_NORM_MIN = 1e-2
ROW_NORM_MAX = 1e4
MULTIPLIER_BOUND = 1e8
INNER_TOL_INIT = 1e-2
INNER_TOL_DECREASE = 0.1


def scaled_jacobian(model: NlpModel, y: np.ndarray) -> Tuple[np.ndarray, sparse.csr_matrix]:
    """Objective gradient and Jacobian of c / con_scale, both with respect to y"""
    s = model.var_scale
    grad, jac = model.derivatives(model.forward(y * s))
    jac = sparse.diags(1.0 / model.con_scale) @ jac @ sparse.diags(s)
    return grad * s, jac.tocsr()


def row_norms(model: NlpModel, y: np.ndarray) -> np.ndarray:
    """Euclidean norms of the scaled Jacobian rows, clipped to [ROW_NORM_MIN, ROW_NORM_MAX]"""
    if model.n_constraints == 0:
        return np.ones(0)
    _, jac = scaled_jacobian(model, y)
    norms = np.sqrt(np.asarray(jac.multiply(jac).sum(axis=1)).ravel())
    return np.clip(norms, ROW_NORM_MIN, ROW_NORM_MAX)


class _Merit:
    """Merit function for fixed (λ, μ) on equilibrated residuals"""

    def __init__(self, model: NlpModel, objective_scale: float, row_norm: Optional[np.ndarray] = None):
        self.model = model
        self.fs = objective_scale
        self.s = model.var_scale
        self.cs = model.con_scale
        self.row_norm = np.ones(model.n_constraints) if row_norm is None else row_norm
        self.rs = self.cs * self.row_norm
        self.eq = model.is_equality
        self.lam = np.zeros(model.n_constraints)
        self.mu = 1.0
        self.evaluations = 0

    def residuals(self, y: np.ndarray) -> Tuple[float, np.ndarray]:
        """Objective and c / con_scale"""
        ev = self.model.forward(y * self.s)
        return ev.objective, ev.residuals / self.cs

    def __call__(self, y: np.ndarray) -> Tuple[float, np.ndarray]:
        self.evaluations += 1
        ev = self.model.forward(y * self.s)
        r = ev.residuals / self.rs
        lam, mu = self.lam, self.mu
        shifted = lam - mu * r
        active = self.eq | (shifted >= 0.0)
        psi = np.where(active, -lam * r + 0.5 * mu * r * r, -lam * lam / (2.0 * mu))
        dpsi = np.where(active, -shifted, 0.0)
        value = self.fs * ev.objective + float(psi.sum())
        grad = self.model.vjp(ev, self.fs, dpsi / self.rs) * self.s
        return value, grad

    def penalized(self, c_scaled: np.ndarray) -> np.ndarray:
        return c_scaled / self.row_norm

    def updated_multipliers(self, c_scaled: np.ndarray) -> np.ndarray:
        shifted = self.lam - self.mu * self.penalized(c_scaled)
        lam = np.where(self.eq, shifted, np.maximum(shifted, 0.0))
        return np.clip(lam, -MULTIPLIER_BOUND, MULTIPLIER_BOUND)

    def load(self, multipliers: np.ndarray) -> None:
        self.lam = np.clip(np.asarray(multipliers, dtype=float) * self.fs * self.row_norm,
                           -MULTIPLIER_BOUND, MULTIPLIER_BOUND)

    def reported(self) -> np.ndarray:
        return self.lam / (self.fs * self.row_norm)


def _violation(model: NlpModel, c_scaled: np.ndarray) -> float:
    if c_scaled.size == 0:
        return 0.0
    v = np.where(model.is_equality, np.abs(c_scaled), np.maximum(-c_scaled, 0.0))
    return float(v.max())


def _projected_gradient(y: np.ndarray, grad: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> float:
    if y.size == 0:
        return 0.0
    return float(np.max(np.abs(y - np.clip(y - grad, lo, hi))))


def restore(
    model: NlpModel,
    merit: _Merit,
    y: np.ndarray,
    lo: np.ndarray,
    hi: np.ndarray,
    max_evals: int,
) -> Optional[np.ndarray]:
    """
    Gauss-Newton step towards feasibility.

    Minimizes Σ_eq r² + Σ_ge min(r, 0)² over the free variables inside the
    box with the trust-region reflective method and a sparse Jacobian.

    Returns:
        The restored point, or None when restoration is disabled or failed
    """
    free = np.flatnonzero(hi > lo)
    if max_evals <= 0 or free.size == 0 or model.n_constraints == 0:
        return None
    eq = model.is_equality

    def expand(z: np.ndarray) -> np.ndarray:
        full = y.copy()
        full[free] = z
        return full

    def fun(z: np.ndarray) -> np.ndarray:
        _, c = merit.residuals(expand(z))
        r = merit.penalized(c)
        return np.where(eq, r, np.minimum(r, 0.0))

    def jac(z: np.ndarray) -> sparse.csc_matrix:
        full = expand(z)
        _, c = merit.residuals(full)
        keep = (eq | (c < 0.0)).astype(float)
        _, j = scaled_jacobian(model, full)
        j = sparse.diags(keep / merit.row_norm) @ j
        return j.tocsc()[:, free]

    try:
        res = least_squares(
            fun,
            y[free],
            jac=jac,
            bounds=(lo[free], hi[free]),
            method="trf",
            tr_solver="lsmr",
            max_nfev=max_evals,
            xtol=1e-12,
            ftol=1e-12,
            gtol=1e-12,
        )
    except (EvaluationDomainError, ValueError) as exc:
        logger.debug(f"{model.name}: restoration failed: {exc}")
        return None
    return np.clip(expand(res.x), lo, hi)


def least_squares_multipliers(
    model: NlpModel,
    merit: _Merit,
    y: np.ndarray,
    lo: np.ndarray,
    hi: np.ndarray,
    active_tol: float,
) -> np.ndarray:
    """
    Multipliers minimizing ||f_s ∇f - Jᵀλ|| over the variables off their bounds.

    Rows of inactive inequalities get zero; inequality multipliers are
    clipped at zero.
    """
    m = model.n_constraints
    grad, jac = scaled_jacobian(model, y)
    _, c = merit.residuals(y)
    active = model.is_equality | (merit.penalized(c) <= active_tol)
    free = np.flatnonzero((y > lo) & (y < hi))
    if m == 0 or free.size == 0 or not np.any(active):
        return np.zeros(m)
    a = (sparse.diags(active / merit.row_norm) @ jac).tocsc()[:, free].T
    lam = lsqr(a, merit.fs * grad[free], atol=1e-10, btol=1e-10, iter_lim=1000)[0]
    lam = np.where(model.is_equality, lam, np.maximum(lam, 0.0)) * active
    return np.clip(lam, -MULTIPLIER_BOUND, MULTIPLIER_BOUND)


def solve(
    model: NlpModel,
    config: Optional[SolverConfig] = None,
    warm_start: Optional[WarmStart] = None,
) -> SolveResult:
    """
    Solve ``model`` to the KKT tolerance of ``config``.

    Args:
        model: Model with exact first derivatives
        config: Solver parameters, defaults from settings
        warm_start: Point and optionally multipliers, penalty and objective
            scale of a previous solve of the same model

    Returns:
        SolveResult; status optimal guarantees max scaled violation <= kkt_tol
        and projected merit gradient <= optimality_tol
    """
    config = config or SolverConfig()
    started = time.perf_counter()
    s = model.var_scale
    lo, hi = model.lower / s, model.upper / s
    x0 = model.initial if warm_start is None else np.asarray(warm_start.point, dtype=float)
    y = np.clip(x0 / s, lo, hi)

    def result(status: SolveStatus, y_end, merit: _Merit, iterations: int, inner: int,
               history, message: str = "") -> SolveResult:
        x = np.clip(y_end * s, model.lower, model.upper)
        try:
            objective, c = merit.residuals(x / s)
            viol = _violation(model, c)
        except EvaluationDomainError:
            objective, viol = float("nan"), float("inf")
        wall = time.perf_counter() - started
        logger.debug(
            f"{model.name}: {status.value} after {iterations} outer / {inner} inner iterations, "
            f"objective={objective:.6g}, max_viol={viol:.2e}, {wall:.3f}s"
        )
        return SolveResult(
            status=status,
            point=x,
            objective=objective,
            max_constraint_violation=viol,
            iterations=iterations,
            wall_time=wall,
            multipliers=merit.reported(),
            penalty=merit.mu,
            objective_scale=merit.fs,
            message=message,
            inner_iterations=inner,
            history=history,
        )

    try:
        f0, c0 = _Merit(model, 1.0).residuals(y)
        norms = row_norms(model, y)
    except EvaluationDomainError as exc:
        merit = _Merit(model, 1.0)
        return result(SolveStatus.INFEASIBLE, y, merit, 0, 0, [], f"evaluation failed at start: {exc}")

    fs = 1.0 / max(1.0, abs(f0))
    if warm_start is not None and warm_start.objective_scale:
        fs = warm_start.objective_scale
    merit = _Merit(model, fs, norms)
    merit.mu = config.penalty_init
    if warm_start is not None and warm_start.penalty:
        merit.mu = float(warm_start.penalty)
    warm_duals = (
        warm_start is not None
        and warm_start.multipliers is not None
        and warm_start.multipliers.shape == merit.lam.shape
    )

    viol = _violation(model, c0)
    if viol > config.kkt_tol:
        restored = restore(model, merit, y, lo, hi, config.restoration_max_evals)
        if restored is not None:
            _, c = merit.residuals(restored)
            if _violation(model, c) < viol:
                y, viol = restored, _violation(model, c)
                logger.debug(f"{model.name}: start restored to max_viol={viol:.2e}")

    if warm_duals:
        merit.load(warm_start.multipliers)
        omega = config.optimality_tol
    else:
        try:
            merit.lam = least_squares_multipliers(model, merit, y, lo, hi, 10.0 * config.kkt_tol)
        except EvaluationDomainError:
            merit.lam = np.zeros(model.n_constraints)
        omega = max(INNER_TOL_INIT, config.optimality_tol)

    bounds = Bounds(lo, hi)
    history = []
    inner_total = 0
    previous = float("inf")
    status = SolveStatus.ITERATION_LIMIT
    message = ""
    iteration = 0
    for iteration in range(1, config.max_outer + 1):
        try:
            merit_before, _ = merit(y)
            res = minimize(
                merit,
                y,
                jac=True,
                method="L-BFGS-B",
                bounds=bounds,
                options={
                    "maxcor": config.lbfgs_memory,
                    "maxiter": config.max_inner,
                    "maxfun": 20 * config.max_inner,
                    "gtol": omega,
                    "ftol": 1e-15,
                },
            )
            y_new = np.clip(res.x, lo, hi)
            merit_after, _ = merit(y_new)
        except EvaluationDomainError as exc:
            status, message = SolveStatus.INFEASIBLE, f"evaluation failed: {exc}"
            break
        inner_total += int(res.nit)

        accepted = merit_after <= merit_before
        if not accepted:
            y_new, merit_after = y, merit_before
        step = float(np.max(np.abs(y_new - y))) if y.size else 0.0
        y = y_new

        _, c = merit.residuals(y)
        viol = _violation(model, c)
        _, grad = merit(y)
        pg = _projected_gradient(y, grad, lo, hi)
        exhausted = int(res.nit) >= config.max_inner
        converged = accepted and (pg <= omega or (bool(res.success) and not exhausted))
        history.append(
            IterationRecord(iteration, merit_before, merit_after, viol, step, merit.mu, int(res.nit), accepted)
        )
        logger.debug(
            f"{iteration:4d}, {merit_after:.10e}, {viol:.3e}, pg={pg:.3e}, mu={merit.mu:.1e}, "
            f"{'converged' if converged else 'inner limit'}"
        )

        if viol <= config.kkt_tol and pg <= config.optimality_tol:
            merit.lam = merit.updated_multipliers(c)
            status = SolveStatus.OPTIMAL
            break
        if converged:
            merit.lam = merit.updated_multipliers(c)
            omega = max(INNER_TOL_DECREASE * omega, config.optimality_tol)

        if viol > max(config.kkt_tol, config.violation_decrease * previous):
            merit.mu *= config.penalty_growth
            if merit.mu > config.penalty_max:
                status, message = SolveStatus.INFEASIBLE, f"penalty exceeded {config.penalty_max:g}"
                break
            restored = restore(model, merit, y, lo, hi, config.restoration_max_evals)
            if restored is not None:
                _, c_restored = merit.residuals(restored)
                if _violation(model, c_restored) < viol:
                    logger.debug(f"{iteration:4d}, restored to max_viol={_violation(model, c_restored):.3e}")
                    y = restored
        previous = viol

        if time.perf_counter() - started > config.time_limit:
            status, message = SolveStatus.TIME_LIMIT, f"time limit {config.time_limit:g}s reached"
            break

    if status is SolveStatus.ITERATION_LIMIT:
        _, c = merit.residuals(y)
        if _violation(model, c) <= config.kkt_tol:
            message = "feasible within kkt_tol, stationarity not reached"
            status = SolveStatus.FEASIBLE_TOL
    return result(status, y, merit, iteration, inner_total, history, message)
