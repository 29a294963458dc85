"""Monte Carlo ground truth for the closed-form predictions.

Samples product / full-rank channels, sphere-constrained codebooks, and
noise; computes the per-realization mutual information and information
density; and aggregates empirical moments, ECDFs, and resolvent-trace
estimates.

Determinism contract: every random draw is a pure function of
(seed, trial_index, stream_label), realized as one counter-based Philox
stream per (trial, matrix).  Trials are embarrassingly parallel; results are
assembled in trial order, so output is bit-identical for any worker count.
The FBL_RMT_THREADS environment variable caps the worker count (default:
machine parallelism).

Complex Gaussian convention: an entry with variance v has independent real
and imaginary parts, each N(0, v/2) (circularly symmetric).
"""

from __future__ import annotations

import enum
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from . import asymptotics
from .bounds import normal_cdf
from .errors import FactorizationFailure
from .fixed_point import fixed_point
from .params import ChannelDims, ratios_from_dims

STREAM_Z = 0  # first scattering hop (or the full-rank channel itself)
STREAM_Y = 1  # second scattering hop
STREAM_W = 2  # additive noise block
STREAM_G = 3  # codebook seed matrix

_MAX_TRIAL = (1 << 60) - 2
_FIXED_CODEBOOK_TRIAL = (1 << 60) - 1  # reserved index for the shared-codebook mode


class ChannelKind(str, enum.Enum):
    RAYLEIGH_PRODUCT = "rayleigh_product"
    RAYLEIGH = "rayleigh"


@dataclass(frozen=True, slots=True)
class TrialStreams:
    """Named, independent random streams for one Monte Carlo trial."""

    seed: int
    trial: int

    def __post_init__(self) -> None:
        if not 0 <= self.seed < (1 << 64):
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        if not 0 <= self.trial <= _FIXED_CODEBOOK_TRIAL:
            raise ValueError(f"trial index out of range: {self.trial!r}")

    def generator(self, stream: int) -> np.random.Generator:
        key = np.array([self.seed, (stream << 60) | self.trial], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))


def _complex_normal(gen: np.random.Generator, rows: int, cols: int, variance: float) -> np.ndarray:
    scale = math.sqrt(variance / 2.0)
    return scale * (gen.standard_normal((rows, cols)) + 1j * gen.standard_normal((rows, cols)))


def _sample_product_parts(dims: ChannelDims, streams: TrialStreams) -> tuple[np.ndarray, np.ndarray]:
    Z = _complex_normal(streams.generator(STREAM_Z), dims.N, dims.L, 1.0 / dims.L)
    Y = _complex_normal(streams.generator(STREAM_Y), dims.L, dims.M, 1.0 / dims.M)
    return Z, Y


def sample_channel(dims: ChannelDims, kind: ChannelKind, streams: TrialStreams) -> np.ndarray:
    """One channel realization: H = Z @ Y (product) or a direct i.i.d. draw.

    Entry variances are 1/L for Z, 1/M for Y, and 1/M for the full-rank
    channel, so E||H||_F^2 = N in both cases.
    """
    if kind == ChannelKind.RAYLEIGH_PRODUCT:
        Z, Y = _sample_product_parts(dims, streams)
        return Z @ Y
    return _complex_normal(streams.generator(STREAM_Z), dims.N, dims.M, 1.0 / dims.M)


def sphere_codebook(M: int, n: int, streams: TrialStreams) -> np.ndarray:
    """Normalized Gaussian codeword block X = G / sqrt(Tr(G G^H)/(M n)).

    The normalization enforces the equal-energy constraint
    Tr(X X^H)/(M n) = 1 exactly (to rounding).
    """
    G = _complex_normal(streams.generator(STREAM_G), M, n, 1.0)
    energy = float((np.abs(G) ** 2).sum()) / (M * n)
    return G / math.sqrt(energy)


def trace_a_sq(X: np.ndarray, n: int) -> float:
    """Tr(A^2)/M for A = I - X X^H / n, via the Frobenius norm of A."""
    M = X.shape[0]
    A = np.eye(M) - (X @ X.conj().T) / n
    return float((np.abs(A) ** 2).sum()) / M


def _cholesky(S: np.ndarray, context: str) -> np.ndarray:
    try:
        chol = np.linalg.cholesky(S)
    except np.linalg.LinAlgError as exc:
        raise FactorizationFailure(f"{context}: {exc}") from exc
    if not np.all(np.isfinite(chol)):
        raise FactorizationFailure(f"{context}: non-finite factor")
    return chol


def mi_sample(H: np.ndarray, sigma2: float) -> float:
    """Per-antenna mutual information (1/M) logdet(I + H H^H / sigma2)."""
    N, M = H.shape
    S = np.eye(N) + (H @ H.conj().T) / sigma2
    chol = _cholesky(S, "mutual-information Gram matrix")
    return 2.0 * float(np.log(np.real(np.diag(chol))).sum()) / M


def mid_sample(H: np.ndarray, X: np.ndarray, sigma2: float, streams: TrialStreams) -> float:
    """One information-density realization for codeword block X.

    I = (1/M) logdet(I + H H^H / sigma2)
        + (1/(M n)) Tr((H H^H + sigma2 I)^{-1} (H X + sigma W)(H X + sigma W)^H)
        - (1/(M n)) Tr(W W^H),
    with W drawn i.i.d. standard complex Gaussian from this trial's noise
    stream.  The inverse is applied through triangular solves of one Cholesky
    factor; it is never formed.
    """
    N, M = H.shape
    n = X.shape[1]
    W = _complex_normal(streams.generator(STREAM_W), N, n, 1.0)
    S = H @ H.conj().T + sigma2 * np.eye(N)
    chol = _cholesky(S, "information-density Gram matrix")
    logdet_term = (2.0 * float(np.log(np.real(np.diag(chol))).sum()) - N * math.log(sigma2)) / M
    B = H @ X + math.sqrt(sigma2) * W
    T = solve_triangular(chol, B, lower=True)
    quad_term = float((np.abs(T) ** 2).sum()) / (M * n)
    noise_term = float((np.abs(W) ** 2).sum()) / (M * n)
    return logdet_term + quad_term - noise_term


@dataclass(frozen=True, slots=True)
class McScenario:
    """What to simulate: dimensions, noise level, channel law, codebook mode."""

    dims: ChannelDims
    sigma2: float
    kind: ChannelKind = ChannelKind.RAYLEIGH_PRODUCT
    fresh_codebook: bool = True  # False: one shared X across all trials

    def __post_init__(self) -> None:
        if not (math.isfinite(self.sigma2) and self.sigma2 > 0):
            raise ValueError(f"sigma2 must be a positive finite real, got {self.sigma2!r}")


@dataclass(frozen=True)
class McSummary:
    """Aggregates of one Monte Carlo run.

    ``samples`` (raw information densities, trial order) and ``std_samples``
    (sqrt(M*n)*(I - c_bar)/sqrt(V_n) with the per-trial realized Tr(A^2)/M)
    are retained only when requested.  ``v_n`` uses the realized mean
    Tr(A^2)/M.
    """

    trials: int
    mid_mean: float
    mid_var: float
    se_mean: float
    trA2_mean: float
    trA2_var: float
    c_bar: float
    v_n: float
    failures: int
    samples: np.ndarray | None
    std_samples: np.ndarray | None

    def ecdf(self) -> tuple[np.ndarray, np.ndarray]:
        """Sorted raw samples with plotting positions i/(trials+1)."""
        if self.samples is None:
            raise ValueError("samples were not retained")
        sorted_samples = np.sort(self.samples)
        positions = np.arange(1, sorted_samples.size + 1) / (sorted_samples.size + 1)
        return sorted_samples, positions

    def ks_statistic(self) -> float:
        """KS distance between the standardized samples and the normal CDF."""
        if self.std_samples is None:
            raise ValueError("std_samples were not retained")
        return ks_vs_normal(self.std_samples)


def ks_vs_normal(samples: np.ndarray) -> float:
    """Supremum distance between the empirical CDF of samples and Phi."""
    s = np.sort(np.asarray(samples, dtype=float))
    m = s.size
    if m == 0:
        raise ValueError("need at least one sample")
    cdf = normal_cdf(s)
    i = np.arange(1, m + 1)
    return float(max(np.max(cdf - (i - 1) / m), np.max(i / m - cdf)))


def dump_samples(samples: np.ndarray, path: str, fmt: str = "text") -> None:
    """Write raw samples, one float per line (text) or little-endian f64 (binary)."""
    arr = np.asarray(samples, dtype=float)
    if fmt == "text":
        with open(path, "w", newline="\n") as fh:
            for value in arr:
                fh.write(f"{value!r}\n")
    elif fmt == "binary":
        with open(path, "wb") as fh:
            fh.write(arr.astype("<f8").tobytes())
    else:
        raise ValueError(f"unknown dump format {fmt!r} (expected 'text' or 'binary')")


def resolve_workers(workers: int | None = None) -> int:
    """Worker count: explicit argument, else FBL_RMT_THREADS, else cpu count."""
    if workers is not None:
        return max(1, int(workers))
    env = os.environ.get("FBL_RMT_THREADS")
    if env is not None:
        try:
            value = int(env)
        except ValueError as exc:
            raise ValueError(f"FBL_RMT_THREADS must be an integer, got {env!r}") from exc
        return max(1, value)
    return os.cpu_count() or 1


def _chunk_ranges(trials: int, chunks: int) -> list[tuple[int, int]]:
    edges = np.linspace(0, trials, chunks + 1, dtype=int)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def _run_chunked(chunk_fn, params: tuple, trials: int, workers: int) -> list[tuple]:
    """Run chunk_fn(params, t0, t1) over [0, trials) and return chunk results in order."""
    if workers <= 1:
        return [chunk_fn(params, 0, trials)]
    ranges = _chunk_ranges(trials, workers * 4)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(chunk_fn, params, a, b) for a, b in ranges]
        return [f.result() for f in futures]


def _mc_chunk(params: tuple, t0: int, t1: int) -> tuple[np.ndarray, np.ndarray, int]:
    M, N, L, n, sigma2, kind_value, fresh_codebook, seed = params
    dims = ChannelDims(M=M, N=N, L=L, n=n)
    kind = ChannelKind(kind_value)
    fixed_X = None
    if not fresh_codebook:
        fixed_X = sphere_codebook(M, n, TrialStreams(seed, _FIXED_CODEBOOK_TRIAL))
    mids = np.empty(t1 - t0)
    tra2 = np.empty(t1 - t0)
    failures = 0
    for i, t in enumerate(range(t0, t1)):
        streams = TrialStreams(seed, t)
        try:
            H = sample_channel(dims, kind, streams)
            X = sphere_codebook(M, n, streams) if fresh_codebook else fixed_X
            mids[i] = mid_sample(H, X, sigma2, streams)
            tra2[i] = trace_a_sq(X, n)
        except FactorizationFailure:
            mids[i] = np.nan
            tra2[i] = np.nan
            failures += 1
    return mids, tra2, failures


def run_monte_carlo(
    scenario: McScenario,
    trials: int,
    seed: int,
    retain_samples: bool = True,
    workers: int | None = None,
) -> McSummary:
    """Independent quasi-static trials: fresh H (and X, W) per trial.

    Per-trial randomness is derived from (seed, trial_index), so the summary
    is independent of execution order and worker count.  Aborts if more than
    0.1% of trials fail to factorize.
    """
    if trials < 2:
        raise ValueError(f"need trials >= 2, got {trials!r}")
    if trials > _MAX_TRIAL:
        raise ValueError(f"trials exceeds the stream index budget: {trials!r}")
    dims = scenario.dims
    params = (dims.M, dims.N, dims.L, dims.n, scenario.sigma2,
              scenario.kind.value, scenario.fresh_codebook, seed)
    chunks = _run_chunked(_mc_chunk, params, trials, resolve_workers(workers))
    mids = np.concatenate([c[0] for c in chunks])
    tra2 = np.concatenate([c[1] for c in chunks])
    failures = sum(c[2] for c in chunks)
    if failures > 0.001 * trials:
        raise FactorizationFailure(
            f"{failures}/{trials} trials failed to factorize; inputs are numerically bad"
        )
    ok = np.isfinite(mids)
    mids, tra2 = mids[ok], tra2[ok]
    used = mids.size
    if used < 2:
        raise FactorizationFailure("fewer than 2 usable trials")

    ratios = ratios_from_dims(dims)
    c_bar, v_of_tra2 = _closed_forms(scenario.kind, ratios.eta, ratios.kappa,
                                     scenario.sigma2, ratios.rho)
    mid_mean = float(mids.mean())
    mid_var = float(mids.var(ddof=1))
    trA2_mean = float(tra2.mean())
    trA2_var = float(tra2.var(ddof=1))
    root_mn = math.sqrt(dims.M * dims.n)
    std_samples = root_mn * (mids - c_bar) / np.sqrt(v_of_tra2(tra2))
    return McSummary(
        trials=used,
        mid_mean=mid_mean,
        mid_var=mid_var,
        se_mean=math.sqrt(mid_var / used),
        trA2_mean=trA2_mean,
        trA2_var=trA2_var,
        c_bar=c_bar,
        v_n=float(v_of_tra2(trA2_mean)),
        failures=failures,
        samples=mids if retain_samples else None,
        std_samples=std_samples if retain_samples else None,
    )


def _closed_forms(kind: ChannelKind, eta: float, kappa: float, sigma2: float, rho: float):
    """Asymptotic mean and variance-vs-Tr(A^2)/M law for the given channel."""
    if kind == ChannelKind.RAYLEIGH_PRODUCT:
        fp = fixed_point(eta, kappa, sigma2)
        c_bar = asymptotics.ergodic_mi(fp, eta, kappa, sigma2)
        v_minus, _, theta = asymptotics.bound_variances(fp, eta, kappa, sigma2, rho)
        return c_bar, lambda t: v_minus + rho * theta * t
    ray0 = asymptotics.rayleigh_moments(eta, sigma2, rho, 0.0)
    gap_rate = asymptotics.rayleigh_moments(eta, sigma2, rho, 1.0).v_n_ray - ray0.v_n_ray
    return ray0.c_bar_ray, lambda t: ray0.v_minus_ray + gap_rate * t


@dataclass(frozen=True, slots=True)
class ResolventEstimate:
    """Empirical first-order resolvent traces against their closed-form targets.

    Q(z) = (z I + H H^H)^{-1}; the estimates are E[Tr Q]/L, E[Tr Q Z Z^H]/M,
    and E[Tr Q H H^H]/M, whose deterministic equivalents are delta_z, omega_z,
    and omega_z*omega_bar_z (the fixed point solved at noise level z).
    """

    z: float
    trials: int
    tr_q_over_L: float
    tr_qzz_over_M: float
    tr_qhh_over_M: float
    se_tr_q: float
    se_tr_qzz: float
    se_tr_qhh: float
    target_delta_z: float
    target_omega_z: float
    target_omega_omega_bar_z: float

    def deviations(self) -> tuple[float, float, float]:
        return (
            abs(self.tr_q_over_L - self.target_delta_z),
            abs(self.tr_qzz_over_M - self.target_omega_z),
            abs(self.tr_qhh_over_M - self.target_omega_omega_bar_z),
        )


def _resolvent_chunk(params: tuple, t0: int, t1: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    M, N, L, z, seed = params
    dims = ChannelDims(M=M, N=N, L=L, n=1)
    tq = np.empty(t1 - t0)
    tqz = np.empty(t1 - t0)
    tqh = np.empty(t1 - t0)
    eye = np.eye(N)
    for i, t in enumerate(range(t0, t1)):
        Z, Y = _sample_product_parts(dims, TrialStreams(seed, t))
        H = Z @ Y
        chol = _cholesky(z * eye + H @ H.conj().T, "resolvent Gram matrix")
        inv_factor = solve_triangular(chol, eye, lower=True)
        tq[i] = (np.abs(inv_factor) ** 2).sum() / L
        tqz[i] = (np.abs(solve_triangular(chol, Z, lower=True)) ** 2).sum() / M
        tqh[i] = (np.abs(solve_triangular(chol, H, lower=True)) ** 2).sum() / M
    return tq, tqz, tqh


def resolvent_checks(
    dims: ChannelDims,
    kind: ChannelKind,
    z: float,
    trials: int,
    seed: int,
    workers: int | None = None,
) -> ResolventEstimate:
    """Estimate the three first-order resolvent traces and their targets.

    Only the product channel is supported: the estimated traces involve the
    scattering factor Z explicitly, and the closed-form targets are the
    product-channel deterministic equivalents.
    """
    if kind != ChannelKind.RAYLEIGH_PRODUCT:
        raise ValueError("resolvent identities are defined for the product channel only")
    if not (math.isfinite(z) and z > 0):
        raise ValueError(f"z must be a positive finite real, got {z!r}")
    if trials < 2:
        raise ValueError(f"need trials >= 2, got {trials!r}")
    params = (dims.M, dims.N, dims.L, z, seed)
    chunks = _run_chunked(_resolvent_chunk, params, trials, resolve_workers(workers))
    tq = np.concatenate([c[0] for c in chunks])
    tqz = np.concatenate([c[1] for c in chunks])
    tqh = np.concatenate([c[2] for c in chunks])

    ratios = ratios_from_dims(dims)
    fp = fixed_point(ratios.eta, ratios.kappa, z)
    root_trials = math.sqrt(trials)
    return ResolventEstimate(
        z=z,
        trials=trials,
        tr_q_over_L=float(tq.mean()),
        tr_qzz_over_M=float(tqz.mean()),
        tr_qhh_over_M=float(tqh.mean()),
        se_tr_q=float(tq.std(ddof=1)) / root_trials,
        se_tr_qzz=float(tqz.std(ddof=1)) / root_trials,
        se_tr_qhh=float(tqh.std(ddof=1)) / root_trials,
        target_delta_z=fp.delta,
        target_omega_z=fp.omega,
        target_omega_omega_bar_z=fp.omega * fp.omega_bar,
    )
