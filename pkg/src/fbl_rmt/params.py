"""Dimensional parameters, ratio conversions, and noise-level conventions.

Every formula in the package is parameterized either by integer antenna /
scatterer / blocklength counts (`ChannelDims`) or by their real ratios
(`Ratios`).  SNR is always 1/sigma^2; dB conversion is base-10 throughout.
Rates are nats per channel use per transmit antenna.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True, slots=True)
class ChannelDims:
    """Antenna, scatterer, and blocklength counts of one link configuration."""

    M: int  # transmit antennas
    N: int  # receive antennas
    L: int  # scatterers
    n: int  # blocklength in channel uses

    def __post_init__(self) -> None:
        for name in ("M", "N", "L", "n"):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool) or value < 1:
                raise ValueError(f"{name} must be a positive integer, got {value!r}")


@dataclass(frozen=True, slots=True)
class Ratios:
    """The three aspect ratios that parameterize all asymptotic formulas."""

    eta: float    # N/M, receive-to-transmit antennas
    kappa: float  # M/L, transmit antennas per scatterer
    rho: float    # n/M, blocklength per transmit antenna

    def __post_init__(self) -> None:
        for name in ("eta", "kappa", "rho"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be a positive finite real, got {value!r}")


@dataclass(frozen=True, slots=True)
class NoiseLevel:
    """Noise power on the linear scale together with its dB representation."""

    sigma2: float  # noise power, linear
    snr_db: float  # 10*log10(1/sigma2)

    def __post_init__(self) -> None:
        if not (math.isfinite(self.sigma2) and self.sigma2 > 0):
            raise ValueError(f"sigma2 must be a positive finite real, got {self.sigma2!r}")

    @classmethod
    def from_sigma2(cls, sigma2: float) -> "NoiseLevel":
        return cls(sigma2=float(sigma2), snr_db=-10.0 * math.log10(sigma2))


def ratios_from_dims(dims: ChannelDims) -> Ratios:
    """Exact integer quotients (eta, kappa, rho) = (N/M, M/L, n/M)."""
    return Ratios(eta=dims.N / dims.M, kappa=dims.M / dims.L, rho=dims.n / dims.M)


def dims_from_ratios(M: int, ratios: Ratios, n: int | None = None) -> ChannelDims:
    """Reconstruct integer dims from M and the ratios.

    Inverse of :func:`ratios_from_dims` whenever the ratios came from integer
    dims (exact for M up to 2**50).  Raises if a product is not integral.
    """
    def as_count(x: float, label: str) -> int:
        r = round(x)
        if abs(x - r) > 1e-6 * max(1.0, abs(x)):
            raise ValueError(f"{label} = {x!r} is not an integer count")
        return int(r)

    N = as_count(ratios.eta * M, "eta*M")
    L = as_count(M / ratios.kappa, "M/kappa")
    n_val = n if n is not None else as_count(ratios.rho * M, "rho*M")
    return ChannelDims(M=M, N=N, L=L, n=n_val)


def sigma2_from_snr_db(snr_db: float) -> NoiseLevel:
    """Noise power 10**(-snr_db/10) for an SNR given in dB."""
    snr_db = float(snr_db)
    if not math.isfinite(snr_db):
        raise ValueError(f"snr_db must be finite, got {snr_db!r}")
    return NoiseLevel(sigma2=10.0 ** (-snr_db / 10.0), snr_db=snr_db)
