"""Outage quantities for orthogonal space-time block coded transmission.

An OSTBC turns the MIMO link into parallel scalar channels whose common SNR
is proportional to ``X = ||P||_F**2``, so outage probability and outage
capacity are plain CDF/quantile evaluations of the fitted model after an
SNR change of variables.  Capacity is in nats/s/Hz throughout; dB conversion
happens at the interfaces only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .channel import ChannelConfig
from .errors import ParameterError
from .gamma_laguerre import GammaLaguerreModel, cdf, cdf_inverse

__all__ = [
    "OstbcScheme",
    "ostbc_catalog",
    "effective_snr",
    "outage_probability",
    "outage_capacity",
    "db_to_linear",
    "linear_to_db",
]


def db_to_linear(x_db: float) -> float:
    return 10.0 ** (x_db / 10.0)


def linear_to_db(x_lin: float) -> float:
    return 10.0 * math.log10(x_lin)


@dataclass(frozen=True)
class OstbcScheme:
    """An orthogonal design sending ``symbols`` symbols over ``block_length``
    uses of ``tx_antennas`` transmit antennas."""

    tx_antennas: int
    symbols: int
    block_length: int

    def __post_init__(self):
        if self.tx_antennas < 1 or self.symbols < 1 or self.block_length < 1:
            raise ParameterError(f"invalid OSTBC parameters {self}")
        if self.symbols > self.block_length:
            raise ParameterError("code rate above one is not an orthogonal design")

    @property
    def rate(self) -> Fraction:
        """Code rate ``R = S/T``, exact."""
        return Fraction(self.symbols, self.block_length)


def ostbc_catalog(k0: int) -> OstbcScheme:
    """Best-known complex-constellation OSTBC for ``k0`` transmit antennas.

    k0 = 1 is the trivial SISO entry; k0 = 2 the full-rate Alamouti code;
    three and four antennas use the rate-3/4 designs; five or more fall back
    to the generic half-rate construction (4 symbols over 8 uses).
    """
    k0 = int(k0)
    if k0 < 1:
        raise ParameterError(f"need at least one transmit antenna, got {k0}")
    if k0 == 1:
        return OstbcScheme(1, 1, 1)
    if k0 == 2:
        return OstbcScheme(2, 2, 2)
    if k0 in (3, 4):
        return OstbcScheme(k0, 3, 4)
    return OstbcScheme(k0, 4, 8)


def _check_pair(scheme: OstbcScheme, config: ChannelConfig) -> None:
    if scheme.tx_antennas != config.dims[0]:
        raise ParameterError(
            f"scheme is for {scheme.tx_antennas} transmit antennas but dims "
            f"start with {config.dims[0]}"
        )


def effective_snr(
    scheme: OstbcScheme, config: ChannelConfig, gamma: float, x: float
) -> float:
    """Post-decoder scalar SNR ``gamma * x / (R * K0 * N)`` (linear)."""
    _check_pair(scheme, config)
    if not gamma > 0:
        raise ParameterError(f"transmit SNR must be positive, got {gamma}")
    if x < 0:
        raise ParameterError(f"channel energy must be nonnegative, got {x}")
    r = float(scheme.rate)
    return gamma * x / (r * config.dims[0] * config.normalization)


def outage_probability(
    model: GammaLaguerreModel,
    scheme: OstbcScheme,
    config: ChannelConfig,
    gamma: float,
    z,
):
    """Probability that the instantaneous capacity falls below rate ``z``.

    ``z`` is in nats/s/Hz and may be a scalar or array; ``gamma`` is the
    linear transmit SNR.
    """
    _check_pair(scheme, config)
    if not gamma > 0:
        raise ParameterError(f"transmit SNR must be positive, got {gamma}")
    z_arr = np.asarray(z, dtype=float)
    if np.any(z_arr < 0):
        raise ParameterError("rate z must be >= 0")
    r = float(scheme.rate)
    scale = r * config.dims[0] * config.normalization / gamma
    x_threshold = scale * np.expm1(z_arr / r)
    out = cdf(model, x_threshold)[1]
    return out


def outage_capacity(
    model: GammaLaguerreModel,
    scheme: OstbcScheme,
    config: ChannelConfig,
    gamma: float,
    p: float,
) -> float:
    """Largest rate (nats/s/Hz) guaranteed for a ``1 - p`` fraction of fades."""
    _check_pair(scheme, config)
    if not gamma > 0:
        raise ParameterError(f"transmit SNR must be positive, got {gamma}")
    r = float(scheme.rate)
    x_p = cdf_inverse(model, p)
    return r * math.log1p(gamma * x_p / (r * config.dims[0] * config.normalization))
