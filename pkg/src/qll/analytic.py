"""K-Bessel functions of imaginary order and numeric evaluation of the
lifted form F(n(x) a_y)."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import IntegrationWarning, quad
from sympy import divisor_count

from .errors import ConfigError, UsageError
from .lattice import keys_from_doubled, s_points, split_key
from .lift import lift_value
from .quaternion import HurwitzQuaternion
from .theta import sigma_odd

_CUTOFF = 45.0


def _truncation(y: float) -> float:
    """T with y*cosh(T) - y >= _CUTOFF, so the dropped tail is below e^-45."""
    return math.acosh(1.0 + _CUTOFF / y)


@lru_cache(maxsize=4096)
def bessel_k_imag(r: float, y: float) -> float:
    """K_{ir}(y) = int_0^inf exp(-y cosh t) cos(r t) dt."""
    if y <= 0:
        raise UsageError(f"bessel_k_imag needs y > 0, got {y}")
    T = _truncation(y)
    f = lambda t: math.exp(-y * (math.cosh(t) - 1.0))  # noqa: E731
    with warnings.catch_warnings():
        # QAWO reports round-off near machine precision; accuracy is checked
        # against an independent high-precision oracle in the tests
        warnings.simplefilter("ignore", IntegrationWarning)
        if r == 0:
            val, _ = quad(f, 0.0, T, epsabs=1e-15, epsrel=1e-13, limit=400)
        else:
            val, _ = quad(f, 0.0, T, weight="cos", wvar=abs(r), epsabs=1e-15, epsrel=1e-13, limit=400)
    return math.exp(-y) * val


@dataclass
class LiftEvaluation:
    value: float
    imag: float
    tail_estimate: float
    terms: int


def _re_pairing(points: np.ndarray, x: tuple[float, ...]) -> np.ndarray:
    """Re(beta x) for integer-coordinate rows beta."""
    x0, x1, x2, x3 = x
    return points[:, 0] * x0 - points[:, 1] * x1 - points[:, 2] * x2 - points[:, 3] * x3


def _a_bound(src, n: int) -> float:
    cmax = max((abs(float(v)) for v in src.values.values()), default=0.0)
    u = (n & -n).bit_length() - 1
    return math.sqrt(n) * u * int(divisor_count(n)) * cmax


def eval_lift(src, x, y: float, norm_bound: int) -> LiftEvaluation:
    """Truncated sum over beta in S, 0 < nu(beta) <= norm_bound, of
    A(beta) y^2 K_{ir}(2 pi |beta| y) exp(2 pi i Re(beta x))."""
    if getattr(src, "r", None) is None:
        raise ConfigError("evaluation needs the spectral parameter r", "r")
    if y <= 0:
        raise UsageError("eval_lift needs y > 0")
    if isinstance(x, HurwitzQuaternion):
        x = tuple(float(c) for c in x.coords)
    x = tuple(float(c) for c in x)
    pts = s_points(norm_bound)
    keys = keys_from_doubled(2 * pts, 1)
    uniq, inv = np.unique(keys, return_inverse=True)
    weights = np.empty(len(uniq))
    for i, key in enumerate(uniq):
        n, d = split_key(int(key))
        a = lift_value(src, n, d)
        weights[i] = a * y * y * bessel_k_imag(src.r, 2 * math.pi * math.sqrt(n) * y) if a else 0.0
    phase = np.exp(2j * math.pi * _re_pairing(pts.astype(float), x))
    total = np.sum(weights[inv] * phase)
    # tail: shells above the bound, |A| bounded from the coefficient sizes
    tail = 0.0
    n = norm_bound + (2 if norm_bound % 2 == 0 else 1)
    while True:
        k = bessel_k_imag(src.r, 2 * math.pi * math.sqrt(n) * y)
        term = 24 * sigma_odd(n // 2) * _a_bound(src, n) * y * y * abs(k)
        tail += term
        if term < 1e-18 * max(abs(total), 1e-300) or term < 1e-300 or n > norm_bound + 20000:
            break
        n += 2
    return LiftEvaluation(float(total.real), float(total.imag), tail, len(pts))
