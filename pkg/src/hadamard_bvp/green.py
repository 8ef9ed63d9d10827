"""Green's function of the linear two-point problem and its closed-form extrema.

With t = ln(x/a), s = ln(tau/a), T = ln(b/a) the kernel is

    G(x, tau) = [ (t/T)^(sigma-1) (T-s)^(sigma-1) - max(t-s, 0)^(sigma-1) ]
                / (tau * Gamma(sigma)),

nonnegative on [a, b]^2 and vanishing on x = a, x = b and tau = a.  Its row
integral over tau has the closed form

    int_a^b G(x, tau) dtau = [ T t^(sigma-1) - t^sigma ] / Gamma(sigma+1),

maximized at x* = a (b/a)^((sigma-1)/sigma) with maximum
(sigma-1)^(sigma-1) T^sigma / (sigma^(sigma+1) Gamma(sigma)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import Interval, Order, gamma_fn
from .errors import DomainError

# Relative slack for clamping roundoff-negative kernel values back to zero.
_CLAMP_RTOL = 1e-12


def self_power(v: float) -> float:
    """v**v with the limit convention v**v -> 1 as v -> 0+ (and at v = 0)."""
    if v < 0.0:
        raise DomainError(f"self_power requires v >= 0, got {v}")
    if v < 1e-300:
        return 1.0
    return math.exp(v * math.log(v))


@dataclass(frozen=True)
class GreenKernel:
    """Kernel turning the two-point problem into an equivalent integral equation."""

    order: Order
    interval: Interval
    log_length: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "log_length", self.interval.log_length)


def green_eval(kernel: GreenKernel, x, tau):
    """Evaluate G(x, tau); accepts scalars or broadcastable numpy arrays.

    The two branches (tau <= x and tau >= x) agree at tau = x, and values that
    round to a tiny negative are clamped to exact zero; genuinely negative
    results (a bug) are returned as-is so tests can catch them.
    """
    a, b = kernel.interval.a, kernel.interval.b
    sig = kernel.order.sigma
    T = kernel.log_length
    scalar = np.ndim(x) == 0 and np.ndim(tau) == 0
    xs = np.asarray(x, dtype=float)
    ts = np.asarray(tau, dtype=float)
    if np.any((xs < a) | (xs > b)):
        raise DomainError(f"requires x in [{a}, {b}]")
    if np.any((ts < a) | (ts > b)):
        raise DomainError(f"requires tau in [{a}, {b}]")
    t = np.log(xs / a)
    s = np.log(ts / a)
    lead = (t / T) ** (sig - 1.0) * (T - s) ** (sig - 1.0)
    sub = np.maximum(t - s, 0.0) ** (sig - 1.0)
    scale = 1.0 / (ts * gamma_fn(sig))
    g = (lead - sub) * scale
    g = np.where((g < 0.0) & (g >= -_CLAMP_RTOL * lead * scale), 0.0, g)
    return float(g) if scalar else g


def green_row_integral(kernel: GreenKernel, x: float) -> float:
    """Closed form of int_a^b G(x, tau) dtau; zero at both endpoints."""
    kernel.interval.require(x)
    if x == kernel.interval.a or x == kernel.interval.b:
        return 0.0
    sig = kernel.order.sigma
    T = kernel.log_length
    t = math.log(x / kernel.interval.a)
    return (T * t ** (sig - 1.0) - t**sig) / gamma_fn(sig + 1.0)


def green_argmax(kernel: GreenKernel) -> float:
    """The interior point x* = a (b/a)^((sigma-1)/sigma) maximizing the row integral."""
    sig = kernel.order.sigma
    a, b = kernel.interval.a, kernel.interval.b
    return a * (b / a) ** ((sig - 1.0) / sig)


def green_max_integral(kernel: GreenKernel) -> float:
    """max over x of int_a^b G(x, tau) dtau, in closed form.

    Equals green_row_integral at green_argmax; depends on the interval only
    through the ratio b/a.
    """
    sig = kernel.order.sigma
    T = kernel.log_length
    return self_power(sig - 1.0) * T**sig / (sig ** (sig + 1.0) * gamma_fn(sig))
