"""Deterministic-equivalent fixed point of the product channel.

The central object is the positive root omega of a cubic whose coefficients
depend on (eta, kappa, sigma2).  From omega the whole bundle follows in
closed form: the companion trace density delta, omega_bar = 1/(1+omega),
the derivative scale Delta, and the sigma2-derivatives of all of them.

Root finding enumerates the full real root set (trigonometric / Cardano
closed form), Newton-polishes each candidate, and filters by the
admissibility constraints.  Uniqueness of the admissible root is checked
explicitly rather than assumed; violations raise instead of tie-breaking.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import (
    DegenerateDenominator,
    MultipleAdmissibleRoots,
    NoAdmissibleRoot,
)

# Strictness slack for the admissibility inequalities; root-polish jitter is
# orders of magnitude below this, real roots of interest are far above it.
ADMISSIBILITY_SLACK = 1e-12

# Polished roots closer than this (relative) are treated as one root.
_ROOT_MERGE_RTOL = 1e-8


@dataclass(frozen=True, slots=True)
class FixedPoint:
    """Deterministic-equivalent bundle at one (eta, kappa, sigma2) point."""

    omega: float            # admissible cubic root, > 0
    delta: float            # (eta*kappa - kappa*omega/(1+omega)) / sigma2
    omega_bar: float        # 1/(1+omega)
    delta_big: float        # sigma2 + kappa*omega*omega_bar^2 / (delta*(1+delta*omega_bar^2))
    omega_prime: float      # d omega / d sigma2, <= 0
    delta_prime: float      # d delta / d sigma2, <= 0
    omega_bar_prime: float  # d omega_bar / d sigma2, >= 0
    c_bar_prime: float      # d C_bar / d sigma2 = delta/kappa - eta/sigma2


@dataclass(frozen=True, slots=True)
class RayleighFixedPoint:
    """Quadratic fixed point of the full-rank (single-hop) limit."""

    delta0: float        # positive root of sigma2*d^2 + (sigma2+1-eta)*d - eta = 0
    delta0_prime: float  # d delta0 / d sigma2, <= 0


def _validate_positive(**kwargs: float) -> None:
    for name, value in kwargs.items():
        if not (math.isfinite(value) and value > 0):
            raise ValueError(f"{name} must be a positive finite real, got {value!r}")


def cubic_coefficients(eta: float, kappa: float, sigma2: float) -> tuple[float, float, float]:
    """Monic coefficients (c2, c1, c0) of the fixed-point cubic in omega."""
    c2 = (2.0 * sigma2 + eta * kappa - kappa - eta + 1.0) / sigma2
    c1 = 1.0 + (eta * kappa - 2.0 * eta + 1.0) / sigma2
    c0 = -eta / sigma2
    return c2, c1, c0


def scaled_cubic_residual(omega: float, eta: float, kappa: float, sigma2: float) -> float:
    """Backward-error residual of the cubic at omega.

    |P(omega)| normalized by the largest monomial magnitude at the evaluation
    point, so a correctly rounded root scores ~1e-16 regardless of how large
    the coefficients are.  (Normalizing by raw coefficients instead would be
    unattainable in binary64 once omega grows like 1/sigma2.)
    """
    c2, c1, c0 = cubic_coefficients(eta, kappa, sigma2)
    w3 = omega * omega * omega
    terms = (w3, c2 * omega * omega, c1 * omega, c0)
    scale = max(1.0, *(abs(t) for t in terms))
    return abs(w3 + terms[1] + terms[2] + terms[3]) / scale


def _cubic_real_roots(c2: float, c1: float, c0: float) -> list[float]:
    """All real roots of x^3 + c2 x^2 + c1 x + c0, by depressed-cubic closed form."""
    shift = c2 / 3.0
    p = c1 - c2 * shift
    q = (2.0 * shift * shift - c1) * shift + c0
    disc = 0.25 * q * q + (p / 3.0) ** 3

    if p == 0.0 and q == 0.0:
        return [-shift]
    if disc > 0.0:
        # one real root; pick the larger-magnitude cube-root branch to avoid
        # cancellation, recover the other factor from u*v = -p/3
        s = math.sqrt(disc)
        a = -0.5 * q
        big = a + s if abs(a + s) >= abs(a - s) else a - s
        u = math.copysign(abs(big) ** (1.0 / 3.0), big)
        v = 0.0 if u == 0.0 else -p / (3.0 * u)
        return [u + v - shift]
    # three real roots (disc <= 0 forces p < 0 here)
    m = 2.0 * math.sqrt(-p / 3.0)
    cos3phi = 3.0 * q / (p * m)
    cos3phi = min(1.0, max(-1.0, cos3phi))
    phi = math.acos(cos3phi) / 3.0
    return [m * math.cos(phi - 2.0 * math.pi * k / 3.0) - shift for k in range(3)]


def _newton_polish(x: float, c2: float, c1: float, c0: float) -> float:
    """Newton-polish a cubic root candidate until the residual stops improving."""
    best, best_res = x, abs(((x + c2) * x + c1) * x + c0)
    for _ in range(50):
        f = ((x + c2) * x + c1) * x + c0
        fp = (3.0 * x + 2.0 * c2) * x + c1
        if fp == 0.0 or not math.isfinite(fp):
            break
        x_new = x - f / fp
        if not math.isfinite(x_new):
            break
        res = abs(((x_new + c2) * x_new + c1) * x_new + c0)
        if res < best_res:
            best, best_res = x_new, res
        if x_new == x or res == 0.0:
            break
        x = x_new
    return best


def _merge_close(roots: list[float]) -> list[float]:
    roots = sorted(roots)
    merged: list[float] = []
    for r in roots:
        if merged and abs(r - merged[-1]) <= _ROOT_MERGE_RTOL * max(1.0, abs(r), abs(merged[-1])):
            continue
        merged.append(r)
    return merged


def _admissible(w: float, eta: float, kappa: float) -> bool:
    if w <= ADMISSIBILITY_SLACK:
        return False
    if eta + (eta - 1.0) * w <= ADMISSIBILITY_SLACK:
        return False
    # at eta = 1 the generic constraint is vacuous; the equal-antenna
    # specialization supplies the replacement selector
    if eta == 1.0 and 1.0 + (1.0 - kappa) * w <= ADMISSIBILITY_SLACK:
        return False
    return True


def solve_omega(eta: float, kappa: float, sigma2: float) -> float:
    """The unique admissible root of the fixed-point cubic.

    Admissible means omega > 0 and eta + (eta-1)*omega > 0 (plus
    1 + (1-kappa)*omega > 0 when eta == 1 exactly).  Raises
    :class:`NoAdmissibleRoot` / :class:`MultipleAdmissibleRoots` when the
    expected uniqueness fails -- both are diagnostic conditions.
    """
    _validate_positive(eta=eta, kappa=kappa, sigma2=sigma2)
    c2, c1, c0 = cubic_coefficients(eta, kappa, sigma2)
    candidates = [_newton_polish(r, c2, c1, c0) for r in _cubic_real_roots(c2, c1, c0)]
    admissible = [w for w in _merge_close(candidates) if _admissible(w, eta, kappa)]
    context = f"eta={eta!r}, kappa={kappa!r}, sigma2={sigma2!r}"
    if not admissible:
        raise NoAdmissibleRoot(f"no admissible cubic root at {context}; candidates={candidates!r}")
    if len(admissible) > 1:
        raise MultipleAdmissibleRoots(
            f"{len(admissible)} admissible cubic roots at {context}: {admissible!r}"
        )
    return admissible[0]


def fixed_point(eta: float, kappa: float, sigma2: float) -> FixedPoint:
    """Full deterministic-equivalent bundle, including sigma2-derivatives.

    delta' = -delta/Delta, omega' = omega*delta'/(delta*(1+delta*omega_bar^2)),
    omega_bar' = -omega_bar^2*omega', c_bar' = delta/kappa - eta/sigma2.
    """
    omega = solve_omega(eta, kappa, sigma2)
    omega_bar = 1.0 / (1.0 + omega)
    delta = (eta * kappa - kappa * omega * omega_bar) / sigma2
    denom = delta * (1.0 + delta * omega_bar * omega_bar)
    if not (denom > 1e-300):
        raise DegenerateDenominator(
            f"delta*(1+delta*omega_bar^2) = {denom!r} underflowed at "
            f"eta={eta!r}, kappa={kappa!r}, sigma2={sigma2!r}"
        )
    delta_big = sigma2 + kappa * omega * omega_bar * omega_bar / denom
    delta_prime = -delta / delta_big
    omega_prime = omega * delta_prime / denom
    omega_bar_prime = -omega_bar * omega_bar * omega_prime
    c_bar_prime = delta / kappa - eta / sigma2
    return FixedPoint(
        omega=omega,
        delta=delta,
        omega_bar=omega_bar,
        delta_big=delta_big,
        omega_prime=omega_prime,
        delta_prime=delta_prime,
        omega_bar_prime=omega_bar_prime,
        c_bar_prime=c_bar_prime,
    )


def rayleigh_fixed_point(eta: float, sigma2: float) -> RayleighFixedPoint:
    """Positive root of sigma2*d^2 + (sigma2 + 1 - eta)*d - eta = 0 and its derivative.

    The constant term is negative, so exactly one positive root exists; it is
    computed with the cancellation-free branch of the quadratic formula.
    delta0' follows by implicit differentiation.
    """
    _validate_positive(eta=eta, sigma2=sigma2)
    b = sigma2 + 1.0 - eta
    disc = math.sqrt(b * b + 4.0 * sigma2 * eta)
    if b >= 0.0:
        delta0 = 2.0 * eta / (b + disc)
    else:
        delta0 = (disc - b) / (2.0 * sigma2)
    delta0_prime = -delta0 * (1.0 + delta0) / (2.0 * sigma2 * delta0 + b)
    return RayleighFixedPoint(delta0=delta0, delta0_prime=delta0_prime)
