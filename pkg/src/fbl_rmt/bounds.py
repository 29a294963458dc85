"""Packet-error-probability bounds from the second-order coding rate.

Converts (rate, dimensions, dispersion moments) into the lower/upper bounds
on the optimal average error probability, the infinite-blocklength outage
reference, and the analytic estimate of the bound gap.

The bounds drop their O(n^-1/2) correction terms (those constants are not
constructive), so they are closed-form approximations of the true bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc as _erfc

from .errors import InvalidVariance


@dataclass(frozen=True, slots=True)
class ErrorBounds:
    """Error-probability bound pair at one second-order rate.

    ``outage`` and ``gap_bound`` are filled by the corresponding operations
    when requested; they default to None in the bare bound computation.
    """

    r: float
    lower: float
    upper: float
    outage: float | None = None
    gap_bound: float | None = None

    def __post_init__(self) -> None:
        if not (0.0 <= self.lower <= self.upper <= 1.0):
            raise InvalidVariance(
                f"bound ordering violated: lower={self.lower!r}, upper={self.upper!r}"
            )


def normal_cdf(x):
    """Standard normal CDF via the complementary error function.

    Absolute error is a few ulp (the erfc kernel is correctly rounded to
    ~2 ulp), comfortably below 1e-12; the reflection normal_cdf(-x) =
    1 - normal_cdf(x) holds to 1e-15.  Accepts scalars or arrays; the output
    is clamped to [0, 1] only to absorb sub-ulp excursions.
    """
    arr = np.asarray(x, dtype=float)
    out = np.clip(0.5 * _erfc(-arr / math.sqrt(2.0)), 0.0, 1.0)
    if np.isscalar(x) or arr.ndim == 0:
        return float(out)
    return out


def second_order_rate(R: float, c_bar: float, M: int, n: int) -> float:
    """Second-order coding rate r = sqrt(M*n) * (R - c_bar).

    R is the per-antenna rate in nats per channel use; r is its sqrt(M*n)-
    scaled deviation from the asymptotic mean.
    """
    if M < 1 or n < 1:
        raise ValueError(f"M and n must be >= 1, got M={M!r}, n={n!r}")
    return math.sqrt(M * n) * (R - c_bar)


def _check_variances(v_minus: float, v_plus: float) -> None:
    if not (v_minus > 0.0 and v_plus > 0.0 and v_plus >= v_minus):
        raise InvalidVariance(
            f"need 0 < v_minus <= v_plus, got v_minus={v_minus!r}, v_plus={v_plus!r}"
        )


def error_prob_bounds(r: float, v_minus: float, v_plus: float) -> ErrorBounds:
    """Lower/upper bounds on the optimal average error probability.

    upper = Phi(r/sqrt(v_plus)) for all r; lower = Phi(r/sqrt(v_minus)) for
    r <= 0 and saturates at 1/2 for r > 0.
    """
    _check_variances(v_minus, v_plus)
    upper = normal_cdf(r / math.sqrt(v_plus))
    lower = normal_cdf(r / math.sqrt(v_minus)) if r <= 0.0 else 0.5
    return ErrorBounds(r=r, lower=lower, upper=upper)


def outage_probability(R: float, c_bar: float, neg_log_xi: float, M: int) -> float:
    """Infinite-blocklength outage reference Phi(M*(R - c_bar)/sqrt(-log Xi))."""
    if not neg_log_xi > 0.0:
        raise InvalidVariance(f"neg_log_xi must be > 0, got {neg_log_xi!r}")
    return normal_cdf(M * (R - c_bar) / math.sqrt(neg_log_xi))


def bound_gap(r: float, v_minus: float, v_plus: float) -> tuple[float, float]:
    """Exact upper-lower gap and its analytic envelope, for r <= 0.

    exact = Phi(r/sqrt(v_plus)) - Phi(r/sqrt(v_minus)) >= 0;
    analytic = -r*(v_plus - v_minus) / (sqrt(2*pi*v_plus*v_minus) *
    (sqrt(v_plus) + sqrt(v_minus))), and exact <= analytic always (the
    envelope replaces the normal density by its peak).
    """
    if r > 0.0:
        raise ValueError(f"bound_gap is defined for r <= 0, got r={r!r}")
    _check_variances(v_minus, v_plus)
    exact = max(0.0, normal_cdf(r / math.sqrt(v_plus)) - normal_cdf(r / math.sqrt(v_minus)))
    analytic = (
        -r
        * (v_plus - v_minus)
        / (math.sqrt(2.0 * math.pi * v_plus * v_minus) * (math.sqrt(v_plus) + math.sqrt(v_minus)))
    )
    return exact, analytic
