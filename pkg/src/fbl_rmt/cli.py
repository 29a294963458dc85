"""Command-line front end: sweeps, bounds, simulation, and validation.

One JSON config document (or flags; flags win) describes a scenario:
{M,N,L,n | eta,kappa,rho}, snr_db (number or {start,stop,step}), rate_nats,
channel, trials, seed.  Commands emit plot-ready CSV (default) or JSON rows
with identical field names.  Exit status: 0 success, 1 computation
diagnostic, 2 usage/config error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass

from . import asymptotics as asym
from . import bounds as bnd
from . import validation
from .fixed_point import fixed_point
from .errors import ConfigError, FblRmtError
from .montecarlo import (
    ChannelKind,
    McScenario,
    dump_samples,
    resolvent_checks,
    run_monte_carlo,
)
from .params import ChannelDims, Ratios, ratios_from_dims, sigma2_from_snr_db

_DIM_KEYS = ("M", "N", "L", "n")
_RATIO_KEYS = ("eta", "kappa", "rho")
_CONFIG_KEYS = set(_DIM_KEYS) | set(_RATIO_KEYS) | {
    "snr_db", "rate_nats", "channel", "trials", "seed",
}


@dataclass(frozen=True)
class Scenario:
    """Merged, validated run description shared by all computing commands."""

    dims: ChannelDims | None
    ratios: Ratios | None
    snr_db_values: tuple[float, ...]
    rate_nats: float | None
    channel: ChannelKind
    trials: int | None
    seed: int

    def require_ratios(self) -> Ratios:
        if self.ratios is not None:
            return self.ratios
        return ratios_from_dims(self.require_dims())

    def require_dims(self) -> ChannelDims:
        if self.dims is None:
            raise ConfigError(
                "this command needs integer dims (M, N, L, n); ratios alone do not fix the scale"
            )
        return self.dims

    def require_rate(self) -> float:
        if self.rate_nats is None:
            raise ConfigError("this command needs a rate: set rate_nats, --rate, or --rate-bits")
        return self.rate_nats

    def require_trials(self) -> int:
        if self.trials is None:
            raise ConfigError("this command needs --trials (or a 'trials' config key)")
        return self.trials


def _parse_snr_spec(spec) -> tuple[float, ...]:
    if isinstance(spec, (int, float)) and not isinstance(spec, bool):
        value = float(spec)
        if not math.isfinite(value):
            raise ConfigError(f"config key 'snr_db' must be finite, got {spec!r}")
        return (value,)
    if isinstance(spec, str):
        parts = spec.split(":")
        try:
            if len(parts) == 1:
                return _parse_snr_spec(float(parts[0]))
            if len(parts) == 3:
                return _parse_snr_spec(
                    {"start": float(parts[0]), "stop": float(parts[1]), "step": float(parts[2])}
                )
        except ValueError:
            pass
        raise ConfigError(f"cannot parse snr spec {spec!r}: expected 'a' or 'a:b:step'")
    if isinstance(spec, dict):
        extra = set(spec) - {"start", "stop", "step"}
        if extra:
            raise ConfigError(f"unknown snr_db sweep key: '{sorted(extra)[0]}'")
        try:
            start, stop, step = (float(spec[k]) for k in ("start", "stop", "step"))
        except KeyError as exc:
            raise ConfigError(f"snr_db sweep is missing key: {exc.args[0]!r}") from None
        if not (math.isfinite(start) and math.isfinite(stop) and math.isfinite(step)):
            raise ConfigError("snr_db sweep values must be finite")
        if stop < start or step <= 0:
            raise ConfigError(
                f"snr_db sweep needs start <= stop and step > 0, got {start}:{stop}:{step}"
            )
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return tuple(start + i * step for i in range(count))
    raise ConfigError(f"config key 'snr_db' has unsupported type: {spec!r}")


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a single JSON object")
    for key in data:
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"unknown config key: '{key}'")
    return data


def _as_int(value, key: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"config key '{key}' must be an integer, got {value!r}")
    return value


def build_scenario(args: argparse.Namespace, *, need_n: bool = True) -> Scenario:
    merged = _load_config(getattr(args, "config", None))
    for key in _DIM_KEYS + _RATIO_KEYS + ("snr_db", "trials", "seed"):
        flag = getattr(args, key, None)
        if flag is not None:
            merged[key] = flag
    if getattr(args, "channel", None) is not None:
        merged["channel"] = args.channel
    if getattr(args, "rate", None) is not None and getattr(args, "rate_bits", None) is not None:
        raise ConfigError("--rate and --rate-bits are mutually exclusive")
    if getattr(args, "rate", None) is not None:
        merged["rate_nats"] = args.rate
    elif getattr(args, "rate_bits", None) is not None:
        merged["rate_nats"] = args.rate_bits * math.log(2.0)

    dim_given = [k for k in _DIM_KEYS if k in merged]
    ratio_given = [k for k in _RATIO_KEYS if k in merged]
    if dim_given and ratio_given:
        raise ConfigError(
            f"give dims or ratios, not both (got '{dim_given[0]}' and '{ratio_given[0]}')"
        )
    dims = ratios = None
    if dim_given:
        if not need_n and "n" not in merged:
            merged["n"] = 1
        missing = [k for k in _DIM_KEYS if k not in merged]
        if missing:
            raise ConfigError(f"incomplete dims: missing key '{missing[0]}'")
        try:
            dims = ChannelDims(**{k: _as_int(merged[k], k) for k in _DIM_KEYS})
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    elif ratio_given:
        missing = [k for k in _RATIO_KEYS if k not in merged]
        if missing:
            raise ConfigError(f"incomplete ratios: missing key '{missing[0]}'")
        try:
            ratios = Ratios(**{k: float(merged[k]) for k in _RATIO_KEYS})
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc
    else:
        raise ConfigError("scenario needs dims (M,N,L,n) or ratios (eta,kappa,rho)")

    if "snr_db" not in merged:
        raise ConfigError("scenario needs an SNR: set snr_db or --snr-db")
    snr_values = _parse_snr_spec(merged["snr_db"])

    channel_value = merged.get("channel", ChannelKind.RAYLEIGH_PRODUCT.value)
    try:
        channel = ChannelKind(channel_value)
    except ValueError:
        raise ConfigError(
            f"config key 'channel' must be 'rayleigh_product' or 'rayleigh', got {channel_value!r}"
        ) from None

    trials = merged.get("trials")
    if trials is not None:
        trials = _as_int(trials, "trials")
        if trials < 2:
            raise ConfigError(f"config key 'trials' must be >= 2 (variance undefined), got {trials}")
    seed = merged.get("seed", 0)
    seed = _as_int(seed, "seed")
    if not 0 <= seed < (1 << 64):
        raise ConfigError(f"config key 'seed' must be a 64-bit unsigned integer, got {seed}")

    rate = merged.get("rate_nats")
    if rate is not None:
        rate = float(rate)
        if not math.isfinite(rate):
            raise ConfigError(f"config key 'rate_nats' must be finite, got {rate!r}")

    return Scenario(
        dims=dims,
        ratios=ratios,
        snr_db_values=snr_values,
        rate_nats=rate,
        channel=channel,
        trials=trials,
        seed=seed,
    )


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_moments(scenario: Scenario, verify: bool = False) -> list[dict]:
    ratios = scenario.require_ratios()
    rows = []
    for snr_db in scenario.snr_db_values:
        sigma2 = sigma2_from_snr_db(snr_db).sigma2
        moments = asym.asymptotic_moments(ratios.eta, ratios.kappa, sigma2, ratios.rho,
                                          verify=verify)
        fp = fixed_point(ratios.eta, ratios.kappa, sigma2)
        rows.append({
            "snr_db": float(snr_db),
            "sigma2": sigma2,
            "omega": fp.omega,
            "delta": fp.delta,
            "c_bar": moments.c_bar,
            "xi": moments.xi,
            "neg_log_xi": moments.neg_log_xi,
            "v_minus": moments.v_minus,
            "v_plus": moments.v_plus,
            "theta": moments.theta,
        })
    return rows


def cmd_bounds(
    scenario: Scenario,
    with_rayleigh: bool = False,
    with_high_snr: bool = False,
    with_low_snr: bool = False,
) -> list[dict]:
    dims = scenario.require_dims()
    rate = scenario.require_rate()
    ratios = ratios_from_dims(dims)
    eta, kappa, rho = ratios.eta, ratios.kappa, ratios.rho
    high = asym.high_snr_variances(eta, kappa, rho) if with_high_snr else None
    rows = []
    for snr_db in scenario.snr_db_values:
        sigma2 = sigma2_from_snr_db(snr_db).sigma2
        moments = asym.asymptotic_moments(eta, kappa, sigma2, rho)
        r = bnd.second_order_rate(rate, moments.c_bar, dims.M, dims.n)
        eb = bnd.error_prob_bounds(r, moments.v_minus, moments.v_plus)
        outage = bnd.outage_probability(rate, moments.c_bar, moments.neg_log_xi, dims.M)
        if r <= 0.0:
            gap, gap_env = bnd.bound_gap(r, moments.v_minus, moments.v_plus)
        else:
            gap, gap_env = math.nan, math.nan
        row = {
            "snr_db": float(snr_db),
            "sigma2": sigma2,
            "r": r,
            "p_lower": eb.lower,
            "p_upper": eb.upper,
            "p_outage": outage,
            "gap": gap,
            "gap_analytic_bound": gap_env,
        }
        if with_rayleigh:
            ray = asym.rayleigh_moments(eta, sigma2, rho)
            r_ray = bnd.second_order_rate(rate, ray.c_bar_ray, dims.M, dims.n)
            eb_ray = bnd.error_prob_bounds(r_ray, ray.v_minus_ray, ray.v_plus_ray)
            row.update({
                "r_rayleigh": r_ray,
                "p_lower_rayleigh": eb_ray.lower,
                "p_upper_rayleigh": eb_ray.upper,
            })
        if high is not None:
            hv_minus, hv_plus, case = high
            eb_high = bnd.error_prob_bounds(r, hv_minus, hv_plus)
            row.update({
                "high_snr_case": case,
                "v_minus_high_snr": hv_minus,
                "v_plus_high_snr": hv_plus,
                "p_lower_high_snr": eb_high.lower,
                "p_upper_high_snr": eb_high.upper,
            })
        if with_low_snr:
            lv_minus, lv_plus = asym.low_snr_variances(eta, kappa, sigma2)
            eb_low = bnd.error_prob_bounds(r, lv_minus, lv_plus)
            row.update({
                "v_low_snr": lv_minus,
                "p_lower_low_snr": eb_low.lower,
                "p_upper_low_snr": eb_low.upper,
            })
        rows.append(row)
    return rows


def cmd_simulate(scenario: Scenario, dump_path: str | None = None) -> list[dict]:
    dims = scenario.require_dims()
    trials = scenario.require_trials()
    if dump_path is not None and len(scenario.snr_db_values) != 1:
        raise ConfigError("--dump-samples needs a single SNR value, not a sweep")
    rows = []
    for snr_db in scenario.snr_db_values:
        sigma2 = sigma2_from_snr_db(snr_db).sigma2
        mc = McScenario(dims=dims, sigma2=sigma2, kind=scenario.channel)
        summary = run_monte_carlo(mc, trials=trials, seed=scenario.seed, retain_samples=True)
        if dump_path is not None:
            dump_samples(summary.samples, dump_path, fmt="text")
        rows.append({
            "snr_db": float(snr_db),
            "sigma2": sigma2,
            "trials": summary.trials,
            "seed": scenario.seed,
            "mid_mean": summary.mid_mean,
            "mid_var": summary.mid_var,
            "se_mean": summary.se_mean,
            "trA2_mean": summary.trA2_mean,
            "trA2_var": summary.trA2_var,
            "c_bar": summary.c_bar,
            "v_n": summary.v_n,
            "scaled_var": dims.M * dims.n * summary.mid_var,
            "ks_stat": summary.ks_statistic(),
            "failures": summary.failures,
        })
    return rows


def cmd_resolvent_check(scenario: Scenario) -> list[dict]:
    dims = scenario.require_dims()
    trials = scenario.require_trials()
    rows = []
    for snr_db in scenario.snr_db_values:
        z = sigma2_from_snr_db(snr_db).sigma2
        est = resolvent_checks(dims, ChannelKind.RAYLEIGH_PRODUCT, z=z,
                               trials=trials, seed=scenario.seed)
        rows.append({
            "z": est.z,
            "trials": est.trials,
            "tr_q_over_L": est.tr_q_over_L,
            "target_delta_z": est.target_delta_z,
            "se_tr_q": est.se_tr_q,
            "tr_qzz_over_M": est.tr_qzz_over_M,
            "target_omega_z": est.target_omega_z,
            "se_tr_qzz": est.se_tr_qzz,
            "tr_qhh_over_M": est.tr_qhh_over_M,
            "target_omega_omega_bar_z": est.target_omega_omega_bar_z,
            "se_tr_qhh": est.se_tr_qhh,
        })
    return rows


def cmd_validate(fast: bool = False) -> tuple[list[dict], bool]:
    results = validation.run_all(fast=fast)
    rows = [{
        "check": r.name,
        "status": "PASS" if r.passed else "FAIL",
        "gates": "yes" if r.gates else "monitor",
        "detail": r.detail,
    } for r in results]
    all_ok = all(r.passed for r in results if r.gates)
    return rows, all_ok


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def _format_cell(value) -> str:
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)

def render_rows(rows: list[dict], fmt: str) -> str:
    if not rows:
        return ""
    if fmt == "json":
        return json.dumps(rows, indent=2) + "\n"
    header = list(rows[0].keys())
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_format_cell(row[key]) for key in header))
    return "\n".join(lines) + "\n"


def _emit(rows: list[dict], fmt: str, out: str | None) -> None:
    text = render_rows(rows, fmt)
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fbl-rmt",
        description="Finite-blocklength error bounds for rank-deficient product MIMO channels",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    scenario_flags = argparse.ArgumentParser(add_help=False)
    scenario_flags.add_argument("--config", help="JSON scenario file; flags override its keys")
    for key in _DIM_KEYS:
        scenario_flags.add_argument(f"--{key}", type=int, dest=key)
    for key in _RATIO_KEYS:
        scenario_flags.add_argument(f"--{key}", type=float, dest=key)
    scenario_flags.add_argument("--snr-db", dest="snr_db", help="single value 'a' or sweep 'a:b:step'")
    scenario_flags.add_argument("--rate", type=float, help="per-antenna rate, nats per channel use")
    scenario_flags.add_argument("--rate-bits", type=float, dest="rate_bits",
                                help="per-antenna rate in bits (converted by ln 2)")
    scenario_flags.add_argument("--channel", choices=[k.value for k in ChannelKind])
    scenario_flags.add_argument("--trials", type=int)
    scenario_flags.add_argument("--seed", type=int)

    output_flags = argparse.ArgumentParser(add_help=False)
    output_flags.add_argument("--format", choices=("csv", "json"), default="csv")
    output_flags.add_argument("--out", help="write output to this path instead of stdout")

    sub.add_parser("moments", parents=[scenario_flags, output_flags],
                   help="fixed point and asymptotic moments per SNR")
    p_bounds = sub.add_parser("bounds", parents=[scenario_flags, output_flags],
                              help="error-probability bounds per SNR")
    p_bounds.add_argument("--rayleigh", action="store_true",
                          help="add full-rank reference columns")
    p_bounds.add_argument("--high-snr", action="store_true", dest="high_snr",
                          help="add high-SNR leading-term columns")
    p_bounds.add_argument("--low-snr", action="store_true", dest="low_snr",
                          help="add low-SNR leading-term columns")
    p_sim = sub.add_parser("simulate", parents=[scenario_flags, output_flags],
                           help="Monte Carlo run with closed forms side by side")
    p_sim.add_argument("--dump-samples", dest="dump_samples",
                       help="write raw per-trial samples to this path (text, one per line)")
    sub.add_parser("resolvent-check", parents=[scenario_flags, output_flags],
                   help="first-order resolvent traces vs closed-form targets")
    p_val = sub.add_parser("validate", parents=[output_flags],
                           help="run the full invariant and cross-oracle gate")
    p_val.add_argument("--fast", action="store_true",
                       help="reduced grids and trial counts (under a minute)")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "moments":
            _emit(cmd_moments(build_scenario(args)), args.format, args.out)
        elif args.command == "bounds":
            rows = cmd_bounds(
                build_scenario(args),
                with_rayleigh=args.rayleigh,
                with_high_snr=args.high_snr,
                with_low_snr=args.low_snr,
            )
            _emit(rows, args.format, args.out)
        elif args.command == "simulate":
            rows = cmd_simulate(build_scenario(args), dump_path=args.dump_samples)
            _emit(rows, args.format, args.out)
        elif args.command == "resolvent-check":
            _emit(cmd_resolvent_check(build_scenario(args, need_n=False)), args.format, args.out)
        elif args.command == "validate":
            rows, all_ok = cmd_validate(fast=args.fast)
            _emit(rows, args.format, args.out)
            return 0 if all_ok else 1
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FblRmtError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
