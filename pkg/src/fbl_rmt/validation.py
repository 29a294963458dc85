"""Release-gate checks: grid invariants, degenerations, and cross-oracles.

Each check sweeps a parameter region and reports one pass/fail row.  The
`validate` CLI command runs them all and exits nonzero if any asserted check
fails; monitor rows (claims that hold only in a restricted regime) are
reported but never fail the gate outside that regime.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import asymptotics as asym
from . import bounds as bnd
from .fixed_point import (
    fixed_point,
    rayleigh_fixed_point,
    scaled_cubic_residual,
    solve_omega,
)

ETA_GRID = (0.5, 1.0, 2.0, 4.0)
KAPPA_GRID = (0.1, 0.5, 1.0, 2.0, 4.0)
SNR_GRID_DB = tuple(range(-10, 31))
RHO_DEFAULT = 4.0
RAYLEIGH_LIMIT_KAPPA = 1e-8  # small enough for O(kappa) contamination << tolerances


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    monitor: bool = False  # informational only; never gates the exit status

    @property
    def gates(self) -> bool:
        return not self.monitor


def _snr_values(fast: bool) -> tuple[float, ...]:
    return tuple(range(-10, 31, 5)) if fast else SNR_GRID_DB


def _grid(fast: bool):
    for eta in ETA_GRID:
        for kappa in KAPPA_GRID:
            for snr_db in _snr_values(fast):
                yield eta, kappa, 10.0 ** (-snr_db / 10.0)


def check_cubic_grid(fast: bool = False) -> CheckResult:
    """Residual <= 1e-10, unique admissible root, identity invariants <= 1e-12."""
    worst_res = 0.0
    worst_id = 0.0
    for eta, kappa, sigma2 in _grid(fast):
        fp = fixed_point(eta, kappa, sigma2)  # raises unless exactly one root
        worst_res = max(worst_res, scaled_cubic_residual(fp.omega, eta, kappa, sigma2))
        w, wb, d = fp.omega, fp.omega_bar, fp.delta
        rel = lambda a, b: abs(a - b) / max(abs(a), abs(b), 1e-300)
        worst_id = max(
            worst_id,
            rel(wb, 1.0 / (1.0 + w)),
            rel(d, (eta * kappa - kappa * w / (1.0 + w)) / sigma2),
            rel(fp.delta_prime, -d / fp.delta_big),
            rel(fp.omega_prime, w * fp.delta_prime / (d * (1.0 + d * wb * wb))),
            rel(fp.omega_bar_prime, -wb * wb * fp.omega_prime),
        )
    ok = worst_res <= 1e-10 and worst_id <= 1e-12
    return CheckResult(
        "cubic-grid", ok,
        f"max scaled residual {worst_res:.2e} (<=1e-10), max identity error {worst_id:.2e} (<=1e-12)",
    )


def check_derivatives_fd(fast: bool = False) -> CheckResult:
    """Closed-form derivatives match central finite differences to 1e-5 relative."""
    worst = 0.0
    for eta, kappa, sigma2 in _grid(fast):
        h = 1e-6 * sigma2
        fp = fixed_point(eta, kappa, sigma2)
        lo = fixed_point(eta, kappa, sigma2 - h)
        hi = fixed_point(eta, kappa, sigma2 + h)
        cb_lo = asym.ergodic_mi(lo, eta, kappa, sigma2 - h)
        cb_hi = asym.ergodic_mi(hi, eta, kappa, sigma2 + h)
        pairs = (
            (fp.delta_prime, (hi.delta - lo.delta) / (2 * h)),
            (fp.omega_prime, (hi.omega - lo.omega) / (2 * h)),
            (fp.omega_bar_prime, (hi.omega_bar - lo.omega_bar) / (2 * h)),
            (fp.c_bar_prime, (cb_hi - cb_lo) / (2 * h)),
        )
        for closed, fd in pairs:
            worst = max(worst, abs(closed - fd) / max(abs(fd), 1e-300))
    return CheckResult("derivative-fd", worst <= 1e-5, f"max relative error {worst:.2e} (<=1e-5)")


def check_omega_monotonic(fast: bool = False) -> CheckResult:
    """omega is strictly decreasing in sigma2 along every (eta, kappa) slice."""
    snrs = _snr_values(fast)
    ok = True
    for eta in ETA_GRID:
        for kappa in KAPPA_GRID:
            # descending SNR = ascending sigma2
            omegas = [solve_omega(eta, kappa, 10.0 ** (-s / 10.0)) for s in sorted(snrs)]
            if not all(a < b for a, b in zip(omegas[1:], omegas[:-1])):
                ok = False
    return CheckResult("omega-monotonic", ok, "omega strictly decreasing in sigma2 on the grid")


def check_rayleigh_degeneration(fast: bool = False) -> CheckResult:
    """Vanishing-kappa limit reproduces the full-rank fixed point and moments."""
    kappa = RAYLEIGH_LIMIT_KAPPA
    worst_root = worst_cb = worst_v = 0.0
    for eta in (0.5, 1.0, 2.0):
        for snr_db in _snr_values(fast):
            sigma2 = 10.0 ** (-snr_db / 10.0)
            rfp = rayleigh_fixed_point(eta, sigma2)
            worst_root = max(worst_root, abs(solve_omega(eta, kappa, sigma2) - rfp.delta0))
            fp = fixed_point(eta, kappa, sigma2)
            ray = asym.rayleigh_moments(eta, sigma2, RHO_DEFAULT)
            worst_cb = max(worst_cb, abs(asym.ergodic_mi(fp, eta, kappa, sigma2) - ray.c_bar_ray))
            v_minus, v_plus, _ = asym.bound_variances(fp, eta, kappa, sigma2, RHO_DEFAULT)
            worst_v = max(worst_v, abs(v_minus - ray.v_minus_ray), abs(v_plus - ray.v_plus_ray))
    ok = worst_root <= 1e-5 and worst_cb <= 1e-5 and worst_v <= 1e-4
    return CheckResult(
        "rayleigh-degeneration", ok,
        f"max |root diff| {worst_root:.2e} (<=1e-5), |C diff| {worst_cb:.2e} (<=1e-5), "
        f"|V diff| {worst_v:.2e} (<=1e-4)",
    )


def check_equal_antenna(fast: bool = False) -> CheckResult:
    """General and equal-antenna bound variances agree to 1e-9 relative at eta=1."""
    worst = 0.0
    for kappa in KAPPA_GRID:
        for snr_db in _snr_values(fast):
            sigma2 = 10.0 ** (-snr_db / 10.0)
            fp = fixed_point(1.0, kappa, sigma2)
            v_minus, v_plus, _ = asym.bound_variances(fp, 1.0, kappa, sigma2, RHO_DEFAULT)
            s_minus, s_plus = asym.equal_antenna_bounds(kappa, sigma2, RHO_DEFAULT)
            worst = max(
                worst,
                abs(v_minus - s_minus) / abs(v_minus),
                abs(v_plus - s_plus) / abs(v_plus),
            )
    return CheckResult("equal-antenna", worst <= 1e-9, f"max relative diff {worst:.2e} (<=1e-9)")


def check_high_snr(fast: bool = False) -> CheckResult:
    """Exact bounds at 80 dB match the leading terms to 1e-3 absolute."""
    sigma2 = 1e-8
    worst = 0.0
    for eta, kappa in ((2.0, 0.5), (0.5, 1.5), (2.0, 2.0), (0.5, 3.0)):
        fp = fixed_point(eta, kappa, sigma2)
        v_minus, v_plus, _ = asym.bound_variances(fp, eta, kappa, sigma2, RHO_DEFAULT)
        a_minus, a_plus, _ = asym.high_snr_variances(eta, kappa, RHO_DEFAULT)
        worst = max(worst, abs(v_minus - a_minus), abs(v_plus - a_plus))
    return CheckResult("high-snr", worst <= 1e-3, f"max absolute diff {worst:.2e} (<=1e-3)")


def check_low_snr(fast: bool = False) -> CheckResult:
    """Exact bounds at sigma2=1e4 match the low-SNR leading term to 1e-3 relative."""
    sigma2 = 1e4
    worst = 0.0
    for eta in (0.5, 1.0, 2.0):
        for kappa in (0.5, 1.0, 2.0):
            fp = fixed_point(eta, kappa, sigma2)
            v_minus, v_plus, _ = asym.bound_variances(fp, eta, kappa, sigma2, RHO_DEFAULT)
            a_minus, a_plus = asym.low_snr_variances(eta, kappa, sigma2)
            worst = max(worst, abs(v_minus - a_minus) / a_minus, abs(v_plus - a_plus) / a_plus)
    return CheckResult("low-snr", worst <= 1e-3, f"max relative diff {worst:.2e} (<=1e-3)")


def check_structural_monitors(fast: bool = False) -> CheckResult:
    """Xi in (0,1), Theta >= 0, V_minus > 0 at every grid point."""
    violations = []
    for eta, kappa, sigma2 in _grid(fast):
        fp = fixed_point(eta, kappa, sigma2)
        try:
            xi_val, _ = asym.xi(fp, eta, kappa, sigma2)
            v_minus, _, theta = asym.bound_variances(fp, eta, kappa, sigma2, RHO_DEFAULT)
        except Exception as exc:  # any structural failure is a reportable violation
            violations.append(f"(eta={eta}, kappa={kappa}, sigma2={sigma2:.4g}): {exc}")
            continue
        if not (0.0 < xi_val < 1.0) or theta < 0.0 or v_minus <= 0.0:
            violations.append(
                f"(eta={eta}, kappa={kappa}, sigma2={sigma2:.4g}): "
                f"xi={xi_val!r}, theta={theta!r}, v_minus={v_minus!r}"
            )
    detail = "no violations" if not violations else "; ".join(violations[:4])
    return CheckResult("structural-monitors", not violations, detail)


def check_dual_form_mean(fast: bool = False) -> CheckResult:
    """Both algebraic forms of the ergodic MI agree to 1e-10 on the grid."""
    try:
        for eta, kappa, sigma2 in _grid(fast):
            fp = fixed_point(eta, kappa, sigma2)
            asym.ergodic_mi(fp, eta, kappa, sigma2, verify=True)
    except Exception as exc:
        return CheckResult("dual-form-mean", False, str(exc))
    return CheckResult("dual-form-mean", True, "dual forms agree to 1e-10 relative")


def check_gap_envelope(fast: bool = False) -> CheckResult:
    """Exact bound gap never exceeds its analytic envelope on grid points."""
    worst_excess = 0.0
    for eta, kappa, sigma2 in _grid(True):
        fp = fixed_point(eta, kappa, sigma2)
        v_minus, v_plus, _ = asym.bound_variances(fp, eta, kappa, sigma2, RHO_DEFAULT)
        for r in (-0.05, -0.5, -2.0, -10.0, 0.0):
            exact, envelope = bnd.bound_gap(r, v_minus, v_plus)
            worst_excess = max(worst_excess, exact - envelope)
    ok = worst_excess <= 1e-12
    return CheckResult("gap-envelope", ok, f"max (exact - envelope) {worst_excess:.2e} (<=1e-12)")


def check_outage_convergence(fast: bool = False) -> CheckResult:
    """Bounds approach the outage reference as rho grows; gap <= 1e-2 at rho=1e3."""
    eta, kappa, M = 2.0, 0.5, 16
    sigma2 = 10.0 ** (-0.5)
    fp = fixed_point(eta, kappa, sigma2)
    c_bar = asym.ergodic_mi(fp, eta, kappa, sigma2)
    _, neg_log_xi = asym.xi(fp, eta, kappa, sigma2)
    R = 0.9 * c_bar
    outage = bnd.outage_probability(R, c_bar, neg_log_xi, M)
    gaps = []
    for rho in (10.0, 100.0, 1000.0):
        v_minus, _, _ = asym.bound_variances(fp, eta, kappa, sigma2, rho)
        r = M * math.sqrt(rho) * (R - c_bar)
        gaps.append(abs(bnd.normal_cdf(r / math.sqrt(v_minus)) - outage))
    ok = gaps[-1] <= 1e-2 and gaps[0] > gaps[1] > gaps[2]
    return CheckResult(
        "outage-convergence", ok,
        "gaps at rho=10,1e2,1e3: " + ", ".join(f"{g:.3g}" for g in gaps) + " (decreasing, last <=1e-2)",
    )


def _bound_curves(M: int, N: int, n: int, L: int | None, rate: float, snrs_db) -> tuple[np.ndarray, np.ndarray]:
    """Lower/upper bound curves; L=None gives the full-rank reference."""
    eta, rho = N / M, n / M
    lowers, uppers = [], []
    for snr_db in snrs_db:
        sigma2 = 10.0 ** (-snr_db / 10.0)
        if L is None:
            ray = asym.rayleigh_moments(eta, sigma2, rho)
            c_bar, v_minus, v_plus = ray.c_bar_ray, ray.v_minus_ray, ray.v_plus_ray
        else:
            kappa = M / L
            fp = fixed_point(eta, kappa, sigma2)
            c_bar = asym.ergodic_mi(fp, eta, kappa, sigma2)
            v_minus, v_plus, _ = asym.bound_variances(fp, eta, kappa, sigma2, rho)
        eb = bnd.error_prob_bounds(bnd.second_order_rate(rate, c_bar, M, n), v_minus, v_plus)
        lowers.append(eb.lower)
        uppers.append(eb.upper)
    return np.array(lowers), np.array(uppers)


def check_scatterer_ordering(fast: bool = False) -> CheckResult:
    """Fewer scatterers give larger error bounds; curves shrink toward full rank."""
    M, N, n = 8, 16, 36
    rate = math.log(2.0)
    snrs = np.arange(0.0, 10.0 + 1e-9, 0.5)
    curves = {L: _bound_curves(M, N, n, L, rate, snrs) for L in (8, 16, 32)}
    ray_lower, ray_upper = _bound_curves(M, N, n, None, rate, snrs)
    ok = True
    for lo, up in curves.values():
        ok &= bool(np.all(np.diff(lo) < 0.0) and np.all(np.diff(up) < 0.0))
    ok &= bool(np.all(np.diff(ray_lower) < 0.0) and np.all(np.diff(ray_upper) < 0.0))
    for a, b in ((8, 16), (16, 32)):
        ok &= bool(np.all(curves[a][0] >= curves[b][0]) and np.all(curves[a][1] >= curves[b][1]))
    ok &= bool(np.all(curves[32][0] >= ray_lower) and np.all(curves[32][1] >= ray_upper))
    gaps = [float(np.max(np.abs(curves[L][1] - ray_upper))) for L in (8, 16, 32)]
    ok &= gaps[0] > gaps[1] > gaps[2]
    return CheckResult(
        "scatterer-ordering", ok,
        "bounds decrease in SNR, order by scatterer count, and approach the full-rank "
        f"reference (max gaps {gaps[0]:.3g} > {gaps[1]:.3g} > {gaps[2]:.3g})",
    )


def check_resolvent_traces(fast: bool = False) -> CheckResult:
    """Monte Carlo resolvent traces match closed forms within 3*SE + 1e-3."""
    from .montecarlo import ChannelKind, resolvent_checks
    from .params import ChannelDims

    trials = 120 if fast else 2000
    dims = ChannelDims(M=64, N=128, L=64, n=1)
    est = resolvent_checks(dims, ChannelKind.RAYLEIGH_PRODUCT, z=1.0, trials=trials, seed=20240)
    devs = est.deviations()
    allowances = (
        3.0 * est.se_tr_q + 1e-3,
        3.0 * est.se_tr_qzz + 1e-3,
        3.0 * est.se_tr_qhh + 1e-3,
    )
    ok = all(d <= a for d, a in zip(devs, allowances))
    detail = ", ".join(f"{d:.2e}<={a:.2e}" for d, a in zip(devs, allowances))
    return CheckResult("resolvent-traces", ok, f"deviations vs allowances at {trials} trials: {detail}")


def _rayleigh_comparable(eta: float, kappa: float) -> bool:
    """Parameter region where the high-SNR full-rank comparison is established."""
    return (kappa < 1.0 and eta > 1.0) or (eta < 1.0 and eta * kappa < 1.0)


def check_rayleigh_dominance(fast: bool = False) -> list[CheckResult]:
    """Rank deficiency can only hurt: C_bar <= full-rank mean, dispersions >= full-rank.

    Asserted at low SNR (<= -20 dB) on the whole grid and at high SNR
    (>= 30 dB) on the region where the comparison is established
    (kappa < 1 with eta > 1, or eta < 1 with eta*kappa < 1).  Elsewhere the
    comparison is monitored only: outside that region the dispersion ordering
    genuinely reverses at high SNR.
    """
    asserted_bad: list[str] = []
    monitor_bad: list[str] = []
    for eta in ETA_GRID:
        for kappa in KAPPA_GRID:
            for snr_db in (-30.0, -20.0, 30.0, 40.0):
                sigma2 = 10.0 ** (-snr_db / 10.0)
                fp = fixed_point(eta, kappa, sigma2)
                c_bar = asym.ergodic_mi(fp, eta, kappa, sigma2)
                v_minus, v_plus, _ = asym.bound_variances(fp, eta, kappa, sigma2, RHO_DEFAULT)
                ray = asym.rayleigh_moments(eta, sigma2, RHO_DEFAULT)
                tol = 1e-12
                mean_ok = c_bar <= ray.c_bar_ray + tol
                var_ok = (v_minus >= ray.v_minus_ray - tol) and (v_plus >= ray.v_plus_ray - tol)
                asserted = snr_db <= -20.0 or _rayleigh_comparable(eta, kappa)
                label = f"(eta={eta}, kappa={kappa}, {snr_db:+.0f} dB)"
                if not mean_ok:
                    asserted_bad.append(label + " mean")
                if not var_ok:
                    (asserted_bad if asserted else monitor_bad).append(label + " dispersion")
    results = [
        CheckResult(
            "rayleigh-dominance", not asserted_bad,
            "holds on the asserted region" if not asserted_bad else "; ".join(asserted_bad[:4]),
        ),
        CheckResult(
            "rayleigh-dominance-monitor", not monitor_bad,
            "also holds outside the established region" if not monitor_bad
            else "dispersion ordering reverses at: " + "; ".join(monitor_bad[:6]),
            monitor=True,
        ),
    ]
    return results


def run_all(fast: bool = False) -> list[CheckResult]:
    """Run every check; monitor rows are informational and never gate."""
    results = [
        check_cubic_grid(fast),
        check_derivatives_fd(fast),
        check_omega_monotonic(fast),
        check_rayleigh_degeneration(fast),
        check_equal_antenna(fast),
        check_high_snr(fast),
        check_low_snr(fast),
        check_structural_monitors(fast),
        check_dual_form_mean(fast),
        check_gap_envelope(fast),
        check_outage_convergence(fast),
        check_scatterer_ordering(fast),
        check_resolvent_traces(fast),
    ]
    results.extend(check_rayleigh_dominance(fast))
    return results
