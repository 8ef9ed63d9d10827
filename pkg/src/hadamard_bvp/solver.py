"""Quadrature plans and the fixed-point solver for the two-point problem.

The solution operator applied on a log-uniform grid is

    (R u)(x_j) = int_a^b G(x_j, tau) F(tau, u(tau)) dtau + B * (t_j/T)^(sigma-1),

and splitting the kernel into its two branches reduces every application to
weighted integrals of the load Y(s) = F(a e^s, u(a e^s)) in the log
coordinate:

    (R u)(x_j) = [ (t_j/T)^(sigma-1) * J(T) - J(t_j) ] / Gamma(sigma)
                 + B * (t_j/T)^(sigma-1),
    J(t) = int_0^t (t - s)^(sigma-1) Y(s) ds.

A plan precomputes, per grid node, panel quadrature points and weights
(panels split at the grid knots, Gauss-Jacobi carrying the kernel weight on
the panel touching s = t_j) together with 4-point Lagrange stencils that
interpolate grid values at the quadrature points.  The interpolation is
piecewise cubic in t, linear in the data, and exact for cubics, so the whole
discrete operator is available as a dense matrix for direct linear solves.

Plans and all config records are immutable; applications are pure functions
with a fixed summation order, so results are reproducible and plans can be
shared across threads.  The Picard loop itself is sequential.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import quadrature
from .core import Interval, Order, SampledFn, gamma_fn, log_uniform_grid, order_value
from .errors import DomainError, EvaluationError, GridMismatchError
from .green import GreenKernel, green_max_integral

_CONTRACTION_FLOOR = 1e-300
# Delta ratios are recorded once start-up transients have passed.
_RATIO_SKIP = 2


@dataclass(frozen=True)
class QuadratureConfig:
    """Discretization knobs: quadrature nodes per panel and solution grid size."""

    node_count: int = 64
    grid_size: int = 129

    def __post_init__(self):
        if self.node_count < 4:
            raise DomainError(f"requires node_count >= 4, got {self.node_count}")
        if self.grid_size < 3:
            raise DomainError(f"requires grid_size >= 3, got {self.grid_size}")


@dataclass(frozen=True)
class SolveConfig:
    """Stopping rule: sup-norm tolerance and iteration budget."""

    tolerance: float = 1e-10
    max_iterations: int = 1000

    def __post_init__(self):
        if not self.tolerance > 0.0:
            raise DomainError(f"requires tolerance > 0, got {self.tolerance}")
        if self.max_iterations < 1:
            raise DomainError(f"requires max_iterations >= 1, got {self.max_iterations}")


@dataclass(frozen=True)
class Problem:
    """The two-point problem: fractional derivative of u equal to -F(x, u) on
    (a, b) with u(a) = 0, u(b) = B.

    ``load`` is F(x, u); it must evaluate elementwise on numpy arrays.
    ``lipschitz_k`` is an optional Lipschitz constant of F in u, enabling the
    a-posteriori stopping rule and convergence guarantees.  ``load_exponent``
    declares that F behaves like (ln(x/a))^beta, beta > -1, near x = a, which
    switches the panel touching a to a matching weighted rule.
    """

    order: Order
    interval: Interval
    boundary_value: float
    load: Callable[[np.ndarray, np.ndarray], np.ndarray]
    lipschitz_k: Optional[float] = None
    load_exponent: Optional[float] = None

    def __post_init__(self):
        if self.lipschitz_k is not None and not self.lipschitz_k > 0.0:
            raise DomainError(f"requires lipschitz_k > 0, got {self.lipschitz_k}")
        if self.load_exponent is not None and not self.load_exponent > -1.0:
            raise DomainError(f"requires load_exponent > -1, got {self.load_exponent}")


@dataclass(frozen=True)
class SolveResult:
    solution: SampledFn
    iterations: int
    final_delta: float
    contraction_estimate: Optional[float]
    converged: bool


def singular_integral(h, sigma, a: float, x: float, *, nodes: int = 64,
                      load_exponent: float | None = None) -> float:
    """int_a^x (ln(x/tau))^(sigma-1) h(tau) dtau/tau with the kernel weight
    handled by Gauss-Jacobi; exact to rounding for h polynomial in ln(tau/a)
    of degree <= 2*nodes - 1.  ``sigma`` may be an Order or any positive real."""
    sig = order_value(sigma, name="sigma")
    return quadrature.log_kernel_integral(h, sig, a, x, nodes=nodes,
                                          load_exponent=load_exponent)


def _lagrange_weights(knots: np.ndarray, pts: np.ndarray) -> np.ndarray:
    """Barycentric-free Lagrange weights; knots (Q, k), pts (Q,) -> (Q, k)."""
    q, k = knots.shape
    w = np.ones((q, k))
    for i in range(k):
        for j in range(k):
            if i == j:
                continue
            w[:, i] *= (pts - knots[:, j]) / (knots[:, i] - knots[:, j])
    return w


class GreenOperatorPlan:
    """Precomputed quadrature and interpolation data for one (kernel, grid) pair.

    Immutable after construction; applications allocate fresh outputs.
    """

    def __init__(self, kernel: GreenKernel, cfg: QuadratureConfig,
                 load_exponent: float | None = None):
        self.kernel = kernel
        self.cfg = cfg
        self.load_exponent = load_exponent
        sig = kernel.order.sigma
        a, b = kernel.interval.a, kernel.interval.b
        m, n = cfg.grid_size, cfg.node_count
        T = kernel.log_length

        self.t = np.linspace(0.0, T, m)
        self.grid = a * np.exp(self.t)
        self.grid[0] = a
        self.grid[-1] = b

        zl, wl = quadrature.legendre_rule(n)
        zj, wj = quadrature.jacobi_rule(n, 0.0, sig - 1.0)
        if load_exponent is not None:
            zload, wload = quadrature.jacobi_rule(n, 0.0, float(load_exponent))
            zboth, wboth = quadrature.jacobi_rule(n, sig - 1.0, float(load_exponent))

        s_parts, w_parts, panel_ids, node_ids = [], [], [], []
        for j in range(1, m):
            tj = self.t[j]
            for p in range(j):
                lo, hi = self.t[p], self.t[p + 1]
                singular = p == j - 1
                first_load = p == 0 and load_exponent is not None
                if singular and first_load:
                    # Single panel carrying both weights (j == 1).
                    beta = float(load_exponent)
                    s = 0.5 * tj * (1.0 + zboth)
                    w = (0.5 * tj) ** (sig + beta) * wboth / s**beta
                elif singular:
                    c = tj - lo
                    s = tj - 0.5 * c * (1.0 + zj)
                    w = (0.5 * c) ** sig * wj
                elif first_load:
                    beta = float(load_exponent)
                    h = hi - lo
                    s = 0.5 * h * (1.0 + zload)
                    w = (0.5 * h) ** (beta + 1.0) * wload * (tj - s) ** (sig - 1.0) / s**beta
                else:
                    mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
                    s = mid + half * zl
                    w = half * wl * (tj - s) ** (sig - 1.0)
                s_parts.append(s)
                w_parts.append(w)
                panel_ids.append(np.full(s.shape, p, dtype=np.intp))
                node_ids.append(np.full(s.shape, j, dtype=np.intp))

        self.s_q = np.concatenate(s_parts)
        self.w_q = np.concatenate(w_parts)
        self.x_q = np.clip(a * np.exp(self.s_q), a, b)
        self._node_id = np.concatenate(node_ids)
        panel = np.concatenate(panel_ids)

        # One contiguous block of quadrature points per grid node j >= 1.
        block = j_sizes = np.bincount(self._node_id, minlength=m)
        self._offsets = np.concatenate(([0], np.cumsum(block[1:-1]))) if m > 2 else np.array([0])
        assert j_sizes[0] == 0

        width = min(4, m)
        base = np.clip(panel - 1, 0, m - width)
        self._stencil_idx = base[:, None] + np.arange(width)[None, :]
        self._stencil_w = _lagrange_weights(self.t[self._stencil_idx], self.s_q)

        self.boundary_shape = (self.t / T) ** (sig - 1.0)
        self._gamma_sig = gamma_fn(sig)

        for arr in (self.t, self.grid, self.s_q, self.w_q, self.x_q,
                    self._node_id, self._offsets, self._stencil_idx,
                    self._stencil_w, self.boundary_shape):
            arr.setflags(write=False)

    def interpolate(self, values: np.ndarray) -> np.ndarray:
        """Grid values -> values at the quadrature points (piecewise cubic in t)."""
        return np.einsum("qk,qk->q", values[self._stencil_idx], self._stencil_w)

    def _node_integrals(self, load_at_q: np.ndarray) -> np.ndarray:
        m = self.grid.size
        out = np.zeros(m)
        out[1:] = np.add.reduceat(self.w_q * load_at_q, self._offsets)
        return out

    def _combine(self, J: np.ndarray, boundary_value: float) -> np.ndarray:
        u = (self.boundary_shape * J[-1] - J) / self._gamma_sig
        u += boundary_value * self.boundary_shape
        u[0] = 0.0
        u[-1] = boundary_value
        return u

    def apply_sampled(self, y_values: np.ndarray, boundary_value: float) -> np.ndarray:
        """Operator applied to a fixed load known by its grid samples."""
        return self._combine(self._node_integrals(self.interpolate(y_values)),
                             boundary_value)

    def apply_load_fn(self, load, u_values: np.ndarray, boundary_value: float) -> np.ndarray:
        """One fixed-point step: interpolate u, evaluate F at the quadrature
        points, integrate.  Raises EvaluationError if F leaves the reals."""
        uq = self.interpolate(u_values)
        try:
            yq = np.asarray(load(self.x_q, uq), dtype=float)
        except EvaluationError as err:
            if err.x is None and err.index is not None:
                err.with_point(float(self.x_q[err.index]), float(uq[err.index]))
            raise
        if yq.ndim == 0:
            yq = np.full(self.x_q.shape, float(yq))
        finite = np.isfinite(yq)
        if not finite.all():
            i = int(np.argmax(~finite))
            raise EvaluationError("load returned a non-finite value",
                                  x=float(self.x_q[i]), u=float(uq[i]), index=i)
        return self._combine(self._node_integrals(yq), boundary_value)

    def matrix(self) -> np.ndarray:
        """Dense matrix A with (A u)_j ~ int_a^b G(x_j, tau) u~(tau) dtau, where
        u~ interpolates the grid values of u; rows at both endpoints are zero."""
        m = self.grid.size
        rowmap = np.zeros((m, m))
        contrib = self.w_q[:, None] * self._stencil_w
        np.add.at(rowmap, (self._node_id[:, None], self._stencil_idx), contrib)
        mat = (np.outer(self.boundary_shape, rowmap[-1]) - rowmap) / self._gamma_sig
        mat[0, :] = 0.0
        mat[-1, :] = 0.0
        return mat


_PLAN_CACHE: dict[tuple, GreenOperatorPlan] = {}


def build_plan(kernel: GreenKernel, cfg: QuadratureConfig | None = None,
               load_exponent: float | None = None) -> GreenOperatorPlan:
    """Return the (cached) operator plan for this kernel and discretization."""
    cfg = cfg or QuadratureConfig()
    key = (kernel.order.sigma, kernel.interval.a, kernel.interval.b,
           cfg.grid_size, cfg.node_count, load_exponent)
    plan = _PLAN_CACHE.get(key)
    if plan is None:
        plan = _PLAN_CACHE[key] = GreenOperatorPlan(kernel, cfg, load_exponent)
    return plan


def _require_plan_grid(plan: GreenOperatorPlan, fn: SampledFn):
    if fn.nodes.size != plan.grid.size or not np.allclose(
            fn.nodes, plan.grid, rtol=1e-12, atol=0.0):
        raise GridMismatchError(
            "sampled function does not live on the kernel's log-uniform grid "
            f"([{plan.kernel.interval.a}, {plan.kernel.interval.b}], "
            f"{plan.grid.size} nodes)")


def apply_green_operator(kernel: GreenKernel, y: SampledFn, boundary_value: float,
                         cfg: QuadratureConfig | None = None,
                         load_exponent: float | None = None) -> SampledFn:
    """Evaluate int_a^b G(x, tau) y~(tau) dtau + B (ln(x/a)/ln(b/a))^(sigma-1)
    at every grid node, with y~ the piecewise-cubic interpolant of y in
    t = ln(x/a).  Endpoint values are enforced exactly: result(a) = 0,
    result(b) = B.  The grid is taken from y; cfg supplies node_count."""
    node_count = (cfg or QuadratureConfig()).node_count
    plan = build_plan(kernel, QuadratureConfig(node_count=node_count,
                                               grid_size=y.nodes.size),
                      load_exponent)
    _require_plan_grid(plan, y)
    return SampledFn(plan.grid, plan.apply_sampled(y.values, boundary_value))


def picard_solve(problem: Problem, cfg: QuadratureConfig | None = None,
                 scfg: SolveConfig | None = None,
                 initial: SampledFn | None = None) -> SolveResult:
    """Fixed-point iteration u <- R u starting from the boundary term
    u0 = B (ln(x/a)/ln(b/a))^(sigma-1) (or ``initial``).

    Stopping uses the a-posteriori contraction bound when a Lipschitz constant
    with L = K * max int G < 1 is available (error <= delta * L/(1-L)), and the
    raw sup-norm update otherwise.  Budget exhaustion is reported through
    ``converged=False``, not an exception; a non-finite load raises
    EvaluationError.
    """
    cfg = cfg or QuadratureConfig()
    scfg = scfg or SolveConfig()
    kernel = GreenKernel(problem.order, problem.interval)
    plan = build_plan(kernel, cfg, problem.load_exponent)
    B = float(problem.boundary_value)

    if initial is None:
        u = B * plan.boundary_shape.copy()
        u[0] = 0.0
        u[-1] = B
    else:
        _require_plan_grid(plan, initial)
        u = initial.values.copy()

    contraction = None
    if problem.lipschitz_k is not None:
        contraction = problem.lipschitz_k * green_max_integral(kernel)
    if contraction is not None and contraction < 1.0:
        stop_delta = scfg.tolerance * (1.0 - contraction) / max(contraction,
                                                                _CONTRACTION_FLOOR)
    else:
        stop_delta = scfg.tolerance

    deltas = []
    converged = False
    iterations = 0
    for iterations in range(1, scfg.max_iterations + 1):
        u_next = plan.apply_load_fn(problem.load, u, B)
        delta = float(np.max(np.abs(u_next - u)))
        deltas.append(delta)
        u = u_next
        if delta <= stop_delta:
            converged = True
            break

    estimate = None
    ratios = [deltas[i + 1] / deltas[i]
              for i in range(_RATIO_SKIP, len(deltas) - 1) if deltas[i] > 0.0]
    if ratios:
        estimate = max(ratios)

    return SolveResult(
        solution=SampledFn(plan.grid, u),
        iterations=iterations,
        final_delta=deltas[-1] if deltas else 0.0,
        contraction_estimate=estimate,
        converged=converged,
    )


def residual_check(problem: Problem, u: SampledFn,
                   cfg: QuadratureConfig | None = None) -> float:
    """sup-norm of u - R u over the grid nodes: how far u is from being a
    fixed point of the solution operator at this discretization."""
    cfg = cfg or QuadratureConfig()
    kernel = GreenKernel(problem.order, problem.interval)
    plan = build_plan(kernel, QuadratureConfig(node_count=cfg.node_count,
                                               grid_size=u.nodes.size),
                      problem.load_exponent)
    _require_plan_grid(plan, u)
    ru = plan.apply_load_fn(problem.load, u.values, problem.boundary_value)
    return float(np.max(np.abs(u.values - ru)))


def linear_solve_direct(order: Order, interval: Interval, lam: float,
                        boundary_value: float,
                        cfg: QuadratureConfig | None = None) -> SampledFn:
    """Solve the discretized linear problem (I - lam*A) u = B * boundary_shape
    directly; cross-check for the fixed-point route when F(x, u) = lam*u."""
    cfg = cfg or QuadratureConfig()
    kernel = GreenKernel(order, interval)
    plan = build_plan(kernel, cfg)
    m = plan.grid.size
    rhs = boundary_value * plan.boundary_shape.copy()
    rhs[0] = 0.0
    rhs[-1] = boundary_value
    a_mat = np.eye(m) - lam * plan.matrix()
    return SampledFn(plan.grid, np.linalg.solve(a_mat, rhs))
