"""Scalar special functions and small dense determinants.

Everything here is pure and reentrant.  Gamma-type quantities are carried in
the log domain (:class:`LogSigned`) wherever products of Gamma values could
overflow a double; raw Gamma values are only materialized inside determinants
after factoring the dominant row scale out.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammainc, gammaln

from .errors import ParameterError

__all__ = [
    "LogSigned",
    "log_gamma",
    "pochhammer_log",
    "reg_lower_gamma",
    "det_dense",
    "gamma_det_identity",
]

_DET_SIZE_CAP = 32
_POCH_DIRECT_LIMIT = 128  # above this, fall back to a log-Gamma difference


@dataclass(frozen=True)
class LogSigned:
    """A real number stored as ``sign * exp(log_magnitude)``.

    ``sign`` is -1, 0 or +1; for ``sign == 0`` the magnitude is ignored.
    """

    log_magnitude: float
    sign: int

    @classmethod
    def from_value(cls, value: float) -> "LogSigned":
        if value == 0.0:
            return cls(0.0, 0)
        return cls(math.log(abs(value)), 1 if value > 0 else -1)

    def value(self) -> float:
        if self.sign == 0:
            return 0.0
        return self.sign * math.exp(self.log_magnitude)

    def __mul__(self, other: "LogSigned") -> "LogSigned":
        if self.sign == 0 or other.sign == 0:
            return LogSigned(0.0, 0)
        return LogSigned(self.log_magnitude + other.log_magnitude, self.sign * other.sign)


def log_gamma(x: float) -> float:
    """Natural log of the Gamma function for ``x > 0``."""
    if not x > 0:
        raise ParameterError(f"log_gamma requires x > 0, got {x}")
    return float(gammaln(x))


def pochhammer_log(a: float, t: int) -> LogSigned:
    """Rising factorial ``(a)_t = Gamma(a + t) / Gamma(a)`` for ``a > 0``.

    For the small ``t`` used throughout this package the log magnitude is the
    exact sum ``log(a) + log(a+1) + ... + log(a+t-1)``, which keeps the
    recurrence ``(a)_(t+1) = (a)_t * (a + t)`` tight to rounding error.
    """
    if not a > 0:
        raise ParameterError(f"pochhammer_log requires a > 0, got {a}")
    t = int(t)
    if t < 0:
        raise ParameterError(f"pochhammer_log requires t >= 0, got {t}")
    if t == 0:
        return LogSigned(0.0, 1)
    if t <= _POCH_DIRECT_LIMIT:
        return LogSigned(math.fsum(math.log(a + i) for i in range(t)), 1)
    return LogSigned(float(gammaln(a + t) - gammaln(a)), 1)


def reg_lower_gamma(a: float, x):
    """Regularized lower incomplete Gamma ``gamma(a, x) / Gamma(a)``.

    Accepts a scalar or ndarray ``x``; nondecreasing in ``x`` with range
    ``[0, 1]``.
    """
    if not a > 0:
        raise ParameterError(f"reg_lower_gamma requires a > 0, got {a}")
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0):
        raise ParameterError("reg_lower_gamma requires x >= 0")
    out = gammainc(a, arr)
    return float(out) if np.isscalar(x) or arr.ndim == 0 else out


def _det_bareiss(rows: list[list[int]]) -> int:
    """Fraction-free pivoted elimination; exact for integer matrices."""
    n = len(rows)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if rows[k][k] == 0:
            for r in range(k + 1, n):
                if rows[r][k] != 0:
                    rows[k], rows[r] = rows[r], rows[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                rows[i][j] = (rows[i][j] * rows[k][k] - rows[i][k] * rows[k][j]) // prev
            rows[i][k] = 0
        prev = rows[k][k]
    return sign * rows[n - 1][n - 1]


def det_dense(m) -> float:
    """Determinant of a dense real matrix of size <= 32 by pivoted elimination.

    Integer matrices run through exact fraction-free elimination, so small
    integer determinants (including structural zeros) are exact; everything
    else uses partial-pivot elimination in floats, which still returns
    exactly 0.0 on a vanishing pivot column.
    """
    a = np.array(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ParameterError(f"det_dense requires a square matrix, got shape {a.shape}")
    n = a.shape[0]
    if n > _DET_SIZE_CAP:
        raise ParameterError(f"det_dense size cap is {_DET_SIZE_CAP}, got {n}")
    if not np.all(np.isfinite(a)):
        raise ParameterError("det_dense requires finite entries")
    if n == 0:
        return 1.0
    if np.all(a == np.round(a)) and np.all(np.abs(a) < 2**53):
        return float(_det_bareiss([[int(v) for v in row] for row in a]))
    det = 1.0
    for k in range(n - 1):
        p = k + int(np.argmax(np.abs(a[k:, k])))
        if a[p, k] == 0.0:
            return 0.0
        if p != k:
            a[[k, p]] = a[[p, k]]
            det = -det
        det *= a[k, k]
        a[k + 1 :, k + 1 :] -= np.outer(a[k + 1 :, k] / a[k, k], a[k, k + 1 :])
    return det * a[n - 1, n - 1]


def gamma_det_identity(k0: int, nu1: int, m: int) -> tuple[float, float]:
    """Both sides of the shifted Gamma-matrix determinant identity.

    ``lhs`` is the determinant of the ``k0 x k0`` matrix whose first
    ``k0 - 1`` columns are ``Gamma(i + j + nu1 - 1)`` and whose last column is
    ``Gamma(i + k0 + nu1 + m - 1)``; ``rhs`` is the closed form

        Gamma(m + nu1 + k0) * Gamma(m + k0) / Gamma(m + 1)
        * prod_{i=1..k0-1} Gamma(i) * Gamma(i + nu1).

    With ``m = 0`` this reduces to the classical Gram identity
    ``det(Gamma(i + j + nu1 - 1)) = prod_j Gamma(j) Gamma(j + nu1)``.
    """
    k0, nu1, m = int(k0), int(nu1), int(m)
    if not (1 <= k0 <= 12 and 0 <= nu1 <= 12 and 0 <= m <= 12):
        raise ParameterError(
            f"gamma_det_identity range guard: need 1<=k0<=12, 0<=nu1<=12, 0<=m<=12, "
            f"got ({k0}, {nu1}, {m})"
        )
    # Log-domain matrix, largest row scale factored out before materializing.
    logs = np.empty((k0, k0))
    for i in range(1, k0 + 1):
        for j in range(1, k0):
            logs[i - 1, j - 1] = gammaln(i + j + nu1 - 1)
        logs[i - 1, k0 - 1] = gammaln(i + k0 + nu1 + m - 1)
    row_scale = logs.max(axis=1)
    lhs = math.exp(float(row_scale.sum())) * det_dense(np.exp(logs - row_scale[:, None]))
    log_rhs = (
        gammaln(m + nu1 + k0)
        + gammaln(m + k0)
        - gammaln(m + 1)
        + sum(gammaln(i) + gammaln(i + nu1) for i in range(1, k0))
    )
    return lhs, math.exp(log_rhs)
