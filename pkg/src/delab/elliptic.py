"""Complete elliptic integrals and the Jacobi delta-amplitude function.

Everything here stays accurate up to the singular limit k -> 1 because the
complement 1 - k^2 is carried as an explicit quantity through every
transformation instead of being recomputed from k.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "EllipticModulus",
    "complete_K",
    "complete_E",
    "jacobi_dn",
    "jacobi_dn_deriv",
]

_AGM_TOL = 1e-16
_MAX_ITER = 64
# Stop the modulus ladder once k'^2 is this small; together with the
# half-period reduction this keeps the sech closure at machine precision.
_LADDER_KC2_STOP = 1e-32
_SMALL_K = 1e-8


@dataclass(frozen=True)
class EllipticModulus:
    """Modulus k in [0, 1] with 1 - k^2 stored explicitly.

    For profiles with tiny neck size the complement is ~1e-12 and would be
    destroyed by cancellation if derived as 1 - k*k.  k = 1 is representable
    (second-kind integral and the sech limit exist there); complete_K rejects
    it at call time.
    """

    k: float
    k_sq_complement: float

    def __post_init__(self):
        if not (0.0 <= self.k <= 1.0):
            raise ValueError(f"modulus k={self.k!r} outside [0, 1]")
        if not (0.0 <= self.k_sq_complement <= 1.0):
            raise ValueError(
                f"complement {self.k_sq_complement!r} outside [0, 1]")
        if abs(self.k * self.k + self.k_sq_complement - 1.0) > 1e-15:
            raise ValueError(
                "k^2 + complement must equal 1 within 1e-15, got "
                f"k={self.k!r}, complement={self.k_sq_complement!r}")

    @classmethod
    def from_k(cls, k: float) -> "EllipticModulus":
        k = float(k)
        return cls(k, 1.0 - k * k)

    @classmethod
    def from_complement(cls, k_sq_complement: float) -> "EllipticModulus":
        kc2 = float(k_sq_complement)
        return cls(math.sqrt(max(1.0 - kc2, 0.0)), kc2)


def complete_K(m: EllipticModulus) -> float:
    """First complete elliptic integral K(k) by the AGM iteration.

    Seeded with (1, sqrt(1-k^2)) so the value stays accurate for k near 1.
    Raises for a nonpositive complement, where the integral diverges.
    """
    if m.k_sq_complement <= 0.0:
        raise ValueError("K(k) is singular at k = 1 (complement <= 0)")
    a = 1.0
    b = math.sqrt(m.k_sq_complement)
    for _ in range(_MAX_ITER):
        if abs(a - b) < _AGM_TOL * a:
            break
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return math.pi / (2.0 * a)


def complete_E(m: EllipticModulus) -> float:
    """Second complete elliptic integral E(k) by the AGM c-sum.

    E = K * (1 - sum 2^(n-1) c_n^2); k = 1 returns the exact limit 1.
    """
    if m.k_sq_complement == 0.0:
        return 1.0
    a = 1.0
    b = math.sqrt(m.k_sq_complement)
    c = m.k
    csum = 0.5 * c * c
    pref = 0.5
    for _ in range(_MAX_ITER):
        a, b, c = 0.5 * (a + b), math.sqrt(a * b), 0.5 * (a - b)
        pref *= 2.0
        csum += pref * c * c
        if abs(c) < _AGM_TOL * a:
            break
    big_k = math.pi / (2.0 * a)
    return big_k * (1.0 - csum)


def _sech(x):
    e = np.exp(-np.abs(x))
    return 2.0 * e / (1.0 + e * e)


def _modulus_ladder(k: float, kc2: float):
    """Ascend k -> 2 sqrt(k)/(1+k) until the complement k'^2 is negligible.

    Returns per-level (k_i, 1 - k_i); 1 - k_i is computed from the complement
    so no level loses the distance to the singular modulus.
    """
    ks = []
    deltas = []
    while kc2 > _LADDER_KC2_STOP and len(ks) < _MAX_ITER:
        delta = kc2 / (1.0 + k)
        ks.append(k)
        deltas.append(delta)
        kp = delta / (2.0 - delta)
        k = 2.0 * math.sqrt(k) / (1.0 + k)
        kc2 = kp * kp
    return ks, deltas


class _DnEvaluator:
    """Vectorized dn(s, k) via the modulus ladder with sech closure.

    The argument is first reduced by periodicity and the reflection
    dn(K + u) = k' / dn(K - u), which confines the ladder argument to
    [0, K/2] where the k -> 1 closure holds to machine precision.
    """

    def __init__(self, m: EllipticModulus):
        self.m = m
        self.small = m.k < _SMALL_K
        if not self.small:
            self.K = complete_K(m)
            self.kp = math.sqrt(m.k_sq_complement)
            self.ks, self.deltas = _modulus_ladder(m.k, m.k_sq_complement)
            self.arg_scale = 1.0
            for ki in self.ks:
                self.arg_scale *= 1.0 + ki

    def _core(self, w, want_deriv):
        # dn on [0, K/2]: ascend the argument, close with sech, unwind.
        u = w * self.arg_scale
        d = _sech(u)
        dd = -d * np.tanh(u) if want_deriv else None
        for ki, di in zip(reversed(self.ks), reversed(self.deltas)):
            g = np.sqrt((di + (1.0 + ki) * d) / (1.0 + d))
            if want_deriv:
                dd = (ki / (g * (1.0 + d) ** 2)) * dd * (1.0 + ki)
            d = g
        return d, dd

    def __call__(self, s, want_deriv=False):
        s = np.asarray(s, dtype=float)
        if self.small:
            k2 = self.m.k ** 2
            val = 1.0 - 0.5 * k2 * np.sin(s) ** 2
            if not want_deriv:
                return val, None
            return val, -k2 * np.sin(s) * np.cos(s)

        K = self.K
        # reduce to [0, 2K), then mirror to [0, K]
        v = np.mod(s, 2.0 * K)
        mirror = v > K
        v = np.where(mirror, 2.0 * K - v, v)
        sign = np.where(mirror, -1.0, 1.0)
        # reflect (K/2, K] down to [0, K/2) through dn(K - u) = k'/dn(u)
        flip = v > 0.5 * K
        w = np.where(flip, K - v, v)
        d, dd = self._core(w, want_deriv)
        val = np.where(flip, self.kp / d, d)
        if not want_deriv:
            return val, None
        der = np.where(flip, self.kp * dd / (d * d), dd)
        return val, sign * der


def jacobi_dn(s, m: EllipticModulus):
    """Delta amplitude dn(s, k); periodic with period 2 K(k), dn(0, k) = 1."""
    ev = _DnEvaluator(m)
    val, _ = ev(s)
    return val if np.ndim(s) else float(val)


def jacobi_dn_deriv(s, m: EllipticModulus):
    """dn(s, k) together with its s-derivative."""
    ev = _DnEvaluator(m)
    val, der = ev(s, want_deriv=True)
    if np.ndim(s):
        return val, der
    return float(val), float(der)
