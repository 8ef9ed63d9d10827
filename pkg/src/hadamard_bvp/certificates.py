"""Analytic certificates: uniqueness of the nonlinear problem, and lower
bounds for eigenvalues of the homogeneous problem.

A K-Lipschitz load makes the solution operator a contraction with constant
L = K * max_x int_a^b G(x, tau) dtau; inverting L < 1 for the interval ratio
gives the sharp uniqueness threshold

    b/a < exp( (sigma^(sigma+1) Gamma(sigma) / ((sigma-1)^(sigma-1) K))^(1/sigma) ).

Any eigenvalue of the homogeneous problem satisfies |lambda| >= 1/max int G.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .core import Interval, Order, gamma_fn
from .errors import CertificateInconsistencyError, DomainError
from .green import GreenKernel, green_max_integral, self_power

# Relative window around exact equality inside which the ratio test and the
# contraction test are allowed to disagree (pure rounding); disagreement
# outside it is an implementation bug.
_TIE_RTOL = 1e-9


class Verdict(enum.Enum):
    SATISFIED = "Satisfied"
    NOT_SATISFIED = "NotSatisfied"


class EigenVerdict(enum.Enum):
    POSSIBLY_EIGENVALUE = "PossiblyEigenvalue"
    NO_NONTRIVIAL_SOLUTION = "NoNontrivialSolution"


@dataclass(frozen=True)
class UniquenessCertificate:
    """Auditable record of the uniqueness test: threshold form and contraction
    form are computed independently and must agree."""

    sigma: float
    a: float
    b: float
    lipschitz_k: float
    threshold: float
    ratio: float
    contraction: float
    verdict: Verdict

    def to_dict(self) -> dict:
        return {
            "sigma": self.sigma,
            "a": self.a,
            "b": self.b,
            "lipschitz_k": self.lipschitz_k,
            "threshold": self.threshold,
            "ratio": self.ratio,
            "contraction": self.contraction,
            "verdict": self.verdict.value,
        }


@dataclass(frozen=True)
class EigenCertificate:
    """Eigenvalue lower bound, with an optional verdict for a candidate lambda."""

    sigma: float
    a: float
    b: float
    bound: float
    lam: float | None = None
    verdict: EigenVerdict | None = None

    def to_dict(self) -> dict:
        doc = {"sigma": self.sigma, "a": self.a, "b": self.b, "bound": self.bound}
        if self.lam is not None:
            doc["lambda"] = self.lam
            doc["verdict"] = self.verdict.value
        return doc


def _as_order(order) -> Order:
    return order if isinstance(order, Order) else Order(order)


def _safe_exp(v: float) -> float:
    return math.inf if v > 709.0 else math.exp(v)


def uniqueness_threshold(order, lipschitz_k: float) -> float:
    """Largest interval ratio b/a below which a K-Lipschitz load has a unique
    solution; strictly decreasing in K and always > 1.

    This is the exact inversion of K * max int G < 1, so the two tests in
    :func:`certify_uniqueness` are algebraically equivalent.
    """
    sig = _as_order(order).sigma
    k = float(lipschitz_k)
    if not math.isfinite(k) or k <= 0.0:
        raise DomainError(f"requires Lipschitz constant K > 0, got {lipschitz_k}")
    inner = sig ** (sig + 1.0) * gamma_fn(sig) / (self_power(sig - 1.0) * k)
    return _safe_exp(inner ** (1.0 / sig))


def certify_uniqueness(order, interval: Interval, lipschitz_k: float) -> UniquenessCertificate:
    """Run both the ratio test b/a < threshold and the contraction test
    K * max int G < 1, record all intermediate quantities, and check that the
    two verdicts agree.

    Exact ties (ratio equal to the threshold) are NotSatisfied: the strict
    inequality is what guarantees a contraction.  Disagreement inside the
    floating-point tie zone resolves to Satisfied only when both strict tests
    pass; disagreement outside it raises CertificateInconsistencyError.
    """
    sig = _as_order(order).sigma
    threshold = uniqueness_threshold(order, lipschitz_k)
    ratio = interval.b / interval.a
    contraction = float(lipschitz_k) * green_max_integral(GreenKernel(_as_order(order), interval))
    by_ratio = ratio < threshold
    by_contraction = contraction < 1.0
    if by_ratio != by_contraction:
        near_tie = abs(contraction - 1.0) <= _TIE_RTOL or (
            math.isfinite(threshold) and abs(ratio - threshold) <= _TIE_RTOL * threshold)
        if not near_tie:
            raise CertificateInconsistencyError(
                f"uniqueness tests disagree: ratio={ratio!r} vs threshold={threshold!r}, "
                f"contraction={contraction!r}")
        satisfied = by_ratio and by_contraction
    else:
        satisfied = by_ratio
    return UniquenessCertificate(
        sigma=sig,
        a=interval.a,
        b=interval.b,
        lipschitz_k=float(lipschitz_k),
        threshold=threshold,
        ratio=ratio,
        contraction=contraction,
        verdict=Verdict.SATISFIED if satisfied else Verdict.NOT_SATISFIED,
    )


def eigen_lower_bound(order, interval: Interval) -> float:
    """Every eigenvalue lambda of the homogeneous problem satisfies
    |lambda| >= sigma^(sigma+1) Gamma(sigma) / ((sigma-1)^(sigma-1) (ln(b/a))^sigma),
    the reciprocal of the Green's-function maximum row integral."""
    sig = _as_order(order).sigma
    T = interval.log_length
    return sig ** (sig + 1.0) * gamma_fn(sig) / (self_power(sig - 1.0) * T**sig)


def nonexistence_verdict(order, interval: Interval, lam: float) -> EigenCertificate:
    """Corollary of the lower bound: |lambda| strictly below it rules out any
    non-trivial solution.  No upper test exists, so larger lambda only earns
    PossiblyEigenvalue."""
    sig = _as_order(order).sigma
    bound = eigen_lower_bound(order, interval)
    lam = float(lam)
    verdict = (EigenVerdict.NO_NONTRIVIAL_SOLUTION if abs(lam) < bound
               else EigenVerdict.POSSIBLY_EIGENVALUE)
    return EigenCertificate(sigma=sig, a=interval.a, b=interval.b, bound=bound,
                            lam=lam, verdict=verdict)
