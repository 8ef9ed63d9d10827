"""Domain types and the Hadamard fractional operators.

All operators act on functions of x in [a, b] with 0 < a < b and are
polynomial in the log coordinate t = ln(x/a): the fractional integral of
order sigma carries the kernel (ln(x/tau))^(sigma-1) / tau, and on
log-monomials (ln(x/a))^beta both the integral and the derivative reduce
to ratios of gamma functions,

    I^sigma t^beta = Gamma(beta+1)/Gamma(beta+1+sigma) * t^(beta+sigma),
    D^sigma t^beta = Gamma(beta+1)/Gamma(beta+1-sigma) * t^(beta-sigma),

with the convention that the reciprocal gamma vanishes at its poles, so
D^sigma annihilates t^(sigma-1) and t^(sigma-2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import quadrature
from .errors import DomainError


@dataclass(frozen=True)
class Order:
    """Fractional order sigma of the two-point problem, 1 < sigma <= 2."""

    sigma: float

    def __post_init__(self):
        s = float(self.sigma)
        if not math.isfinite(s) or not 1.0 < s <= 2.0:
            raise DomainError(f"order requires 1 < sigma <= 2, got {self.sigma}")
        object.__setattr__(self, "sigma", s)

    def __float__(self) -> float:
        return self.sigma


@dataclass(frozen=True)
class Interval:
    """Interval [a, b] with 0 < a < b (the operators need a positive base point)."""

    a: float
    b: float

    def __post_init__(self):
        a, b = float(self.a), float(self.b)
        if not (math.isfinite(a) and math.isfinite(b)) or not 0.0 < a < b:
            raise DomainError(f"requires 0 < a < b, got a={self.a}, b={self.b}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def log_length(self) -> float:
        return math.log(self.b / self.a)

    def require(self, x: float, name: str = "x") -> float:
        x = float(x)
        if not self.a <= x <= self.b:
            raise DomainError(f"requires {name} in [{self.a}, {self.b}], got {x}")
        return x


@dataclass(frozen=True)
class LogMonomial:
    """The map x -> coefficient * (ln(x/a))**beta; base point a is supplied
    at evaluation time."""

    coefficient: float
    beta: float

    def value(self, x: float, a: float) -> float:
        t = math.log(x / a)
        if t == 0.0:
            if self.beta > 0.0:
                return 0.0
            if self.beta == 0.0:
                return self.coefficient
            raise DomainError("negative-exponent log-monomial is singular at x = a")
        return self.coefficient * t**self.beta


def _freeze(arr) -> np.ndarray:
    out = np.array(arr, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class SampledFn:
    """Function values on a log-uniform grid over [a, b], endpoints included.

    Log-uniform means ln(nodes[i]/a) is an arithmetic progression; all solver
    quadrature and interpolation assumes this layout.
    """

    nodes: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if nodes.ndim != 1 or nodes.shape != values.shape:
            raise DomainError("nodes and values must be 1-d arrays of equal length")
        if nodes.size < 2:
            raise DomainError("a sampled function needs at least 2 nodes")
        if nodes[0] <= 0.0:
            raise DomainError("requires nodes > 0 (positive base point)")
        if np.any(np.diff(nodes) <= 0.0):
            raise DomainError("nodes must be strictly increasing")
        t = np.log(nodes / nodes[0])
        uniform = np.linspace(0.0, t[-1], nodes.size)
        if np.max(np.abs(t - uniform)) > 1e-9 * max(t[-1], 1.0):
            raise DomainError("nodes must be log-uniform: ln(nodes/a) in arithmetic progression")
        object.__setattr__(self, "nodes", _freeze(nodes))
        object.__setattr__(self, "values", _freeze(values))

    @property
    def a(self) -> float:
        return float(self.nodes[0])

    @property
    def b(self) -> float:
        return float(self.nodes[-1])

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def with_values(self, values) -> "SampledFn":
        return SampledFn(self.nodes, values)


def log_uniform_grid(interval: Interval, size: int) -> np.ndarray:
    """size nodes on [a, b] whose logs are equally spaced; endpoints exact."""
    if size < 2:
        raise DomainError(f"grid needs at least 2 nodes, got {size}")
    t = np.linspace(0.0, interval.log_length, size)
    x = interval.a * np.exp(t)
    x[0] = interval.a
    x[-1] = interval.b
    return x


def gamma_fn(z: float) -> float:
    """Gamma(z) for z > 0 (relative error well below 1e-12 on (0, 10])."""
    if not math.isfinite(z) or z <= 0.0:
        raise DomainError(f"gamma_fn requires z > 0, got {z}")
    return math.gamma(z)


def to_log_coordinates(x: float, interval: Interval) -> float:
    """The substitution t = ln(x/a) mapping [a, b] onto [0, ln(b/a)]."""
    interval.require(x)
    return math.log(x / interval.a)


def order_value(order, *, name: str = "order") -> float:
    """Accept an Order or any positive real; return the float order."""
    if isinstance(order, Order):
        return order.sigma
    s = float(order)
    if not math.isfinite(s) or s <= 0.0:
        raise DomainError(f"{name} must be positive, got {order}")
    return s


def hadamard_integral(f, order, interval: Interval, x: float, *, nodes: int = 64) -> float:
    """Fractional integral (1/Gamma(s)) int_a^x (ln(x/tau))^(s-1) f(tau) dtau/tau.

    ``order`` may be an :class:`Order` or any positive real.  Returns exactly
    0 at x = a.  f is sampled at interior points of (a, x]; it may accept
    numpy arrays (a scalar fallback loop is used otherwise).
    """
    s = order_value(order)
    interval.require(x)
    if x == interval.a:
        return 0.0
    raw = quadrature.log_kernel_integral(f, s, interval.a, x, nodes=nodes)
    return raw / gamma_fn(s)


def hadamard_derivative_log_monomial(m: LogMonomial, order, interval: Interval,
                                     x: float) -> float:
    """Fractional derivative of a log-monomial, evaluated in closed form.

    Returns coefficient * Gamma(beta+1)/Gamma(beta+1-sigma) * (ln(x/a))^(beta-sigma),
    and exactly 0 when beta+1-sigma is a non-positive integer (reciprocal-gamma
    pole); that convention covers beta = sigma-1 and beta = sigma-2.  Requires
    beta > sigma-2 so the result stays integrable.
    """
    s = order.sigma if isinstance(order, Order) else Order(order).sigma
    interval.require(x)
    if x <= interval.a:
        raise DomainError(f"requires x > a, got x={x}, a={interval.a}")
    if m.beta <= s - 2.0:
        raise DomainError(
            f"requires beta > sigma - 2 for an integrable derivative, got beta={m.beta}")
    w = m.beta + 1.0 - s
    if w <= 0.0 and w == round(w):
        return 0.0
    t = math.log(x / interval.a)
    # w may be a negative non-integer here; math.gamma handles that range.
    return m.coefficient * gamma_fn(m.beta + 1.0) / math.gamma(w) * t ** (m.beta - s)
