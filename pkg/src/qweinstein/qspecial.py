"""q-special functions: the normalized third Jackson q-Bessel function,
q-trigonometric functions, the q-exponential, and the Sonine weight.

Two evaluation strategies coexist:

* a power series with term recursion, accurate while the peak term of the
  alternating series stays within double-precision headroom;
* an inward three-term recurrence along the lattice argument q^k
  (Miller's algorithm) for whole families j_alpha(q^k; q^2).  The series
  loses everything to cancellation once q^k is large, while the
  recurrence tracks the recessive solution to ~1e-13 relative accuracy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .qcore import (
    DEFAULT_POLICY,
    QDomainError,
    QParams,
    TruncationPolicy,
    qgamma_base,
)

_LN2 = math.log(2.0)


@dataclass(frozen=True)
class SeriesValue:
    """A truncated series evaluation with diagnostics."""

    value: complex
    terms_used: int
    est_tail: float

    def __complex__(self):
        return complex(self.value)


def bessel_j(alpha: float, x: complex, params: QParams,
             policy: TruncationPolicy = DEFAULT_POLICY) -> SeriesValue:
    """Normalized third Jackson q-Bessel function j_alpha(x; q^2).

    Series form: sum_n (-1)^n q^(n(n+1)) ((1-q)x)^(2n) /
    ((q^2; q^2)_n (q^(2*alpha+2); q^2)_n).  The q^(n(n+1)) factor makes it
    entire; terms grow until n ~ log_{1/q}|x| and then decay faster than
    geometrically, so the tail test only fires past the peak.
    """
    if alpha < -0.5:
        raise QDomainError(f"bessel_j needs alpha >= -1/2, got {alpha}")
    q = params.q
    q2 = q * q
    z = (1.0 - q) * (1.0 - q) * complex(x) * complex(x)   # ((1-q)x)^2
    absz = abs(z)
    n_peak = 0
    if absz > 1.0:
        n_peak = int(math.ceil(math.log(absz) / (2.0 * math.log(1.0 / q)))) + 1
    term = 1.0 + 0.0j
    total = term
    n = 0
    while True:
        n += 1
        ratio_den = (1.0 - q2**n) * (1.0 - q ** (2.0 * alpha + 2.0 * n))
        r = -(q2**n) * z / ratio_den
        term = term * r
        total += term
        if n >= n_peak + 2:
            est_tail = abs(term) / (1.0 - min(abs(r), 0.99))
            if est_tail < policy.series_tol:
                break
        if n > 100000:
            raise ArithmeticError("bessel_j series failed to terminate")
    return SeriesValue(value=total, terms_used=n + 1, est_tail=est_tail)


def qcos(x: complex, params: QParams, policy: TruncationPolicy = DEFAULT_POLICY) -> complex:
    """q-cosine: cos(x; q^2) = j_{-1/2}(x; q^2)."""
    return bessel_j(-0.5, x, params, policy).value


def qsin(x: complex, params: QParams, policy: TruncationPolicy = DEFAULT_POLICY) -> complex:
    """q-sine: sin(x; q^2) = x * j_{1/2}(x; q^2)."""
    return complex(x) * bessel_j(0.5, x, params, policy).value


def qexp(z: complex, params: QParams, policy: TruncationPolicy = DEFAULT_POLICY) -> complex:
    """q-exponential e(z; q^2) = cos(-iz; q^2) + i sin(-iz; q^2)."""
    miz = -1j * complex(z)
    return qcos(miz, params, policy) + 1j * qsin(miz, params, policy)


# ---------------------------------------------------------------------------
# Lattice families via inward (Miller) recurrence
# ---------------------------------------------------------------------------

def decay_floor_exponent(q: float) -> int:
    """Most negative lattice exponent k with j_alpha(q^k) representable.

    |j_alpha(q^k; q^2)| decays like q^(k(k+1)) as k -> -inf; below the
    double-precision floor, family values are clamped to exact zero.
    """
    return -int(math.floor(math.sqrt(700.0 / math.log(1.0 / q))))


def effective_floor_exponent(q: float) -> int:
    """Deepest lattice exponent the kernel families keep; zeros beyond.

    Superexponential decay of j_alpha(q^-k; q^2) requires the alignment
    1 - q = q^j.  Three regimes:

    * exact alignment in binary (q = 1/2): only the double-precision
      representability floor binds;
    * near-aligned q (residual epsilon below ~1e-8): the decaying branch
      is computable (inward recurrence) down to the alignment turnaround
      k* = sqrt(ln(1/epsilon) / (2 ln(1/q))); beyond it the function
      departs from the decaying branch at O(sqrt(epsilon)) and is cut;
    * misaligned q: the series evaluates the (growing) truth directly,
      and the cut is placed where the growth envelope
      epsilon * q^(-k(k-1)) passes 1e3, past which spectral sums are
      dominated by the divergence anyway.
    """
    from .qcore import lattice_alignment

    eps, _ = lattice_alignment(q)
    floor_rep = decay_floor_exponent(q)
    if eps == 0.0:
        return floor_rep
    L = math.log(1.0 / q)
    if eps < 1e-8:
        k_star = math.sqrt(math.log(1.0 / eps) / (2.0 * L))
        return max(floor_rep, -int(math.floor(k_star)) + 1)
    c = math.log(1e3 / eps) / L
    k_grow = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * c))
    return max(floor_rep, -int(math.floor(k_grow)))


def _series_matching_exponent(q: float) -> int:
    # argument q^k small enough that the series is a few eps-accurate terms
    return max(4, int(math.ceil(2.0 * math.log(1.0 / (1.0 - q)) / math.log(1.0 / q))))


def bessel_j_exponent_family(alpha: float, params: QParams, k_min: int, k_max: int,
                             policy: TruncationPolicy = DEFAULT_POLICY) -> np.ndarray:
    """j_alpha(q^k; q^2) for every integer k in [k_min, k_max], float64.

    Small arguments come from the series.  Deep arguments (k below the
    series-safe zone) are served down to the effective decay frontier of
    the lattice family and are exact zeros beyond it:

    * at lattice-aligned q (1 - q = q^j; binary-exact at q = 1/2) the
      family decays superexponentially and deep entries come from the
      inward three-term recurrence (Miller's algorithm), which follows
      the inward-growing Bessel solution so seed junk dies off;
    * near-aligned q keep the Miller zone down to the alignment
      turnaround;
    * strongly misaligned q have a shallow frontier where the plain
      series is still accurate, so the series serves everything kept.
    """
    if k_min > k_max:
        raise QDomainError("bessel_j_exponent_family needs k_min <= k_max")
    from .qcore import lattice_alignment

    q = params.q
    ks = np.arange(k_min, k_max + 1)
    out = np.zeros(len(ks))
    k_norm = _series_matching_exponent(q)

    for i, k in enumerate(ks):
        if k >= k_norm or k_min >= 0:
            out[i] = bessel_j(alpha, q ** float(k), params, policy).value.real
    if k_min >= 0:
        return out

    floor_k = effective_floor_exponent(q)
    lo_eff = max(k_min, floor_k)
    eps_align, _ = lattice_alignment(q)

    if eps_align >= 1e-8 or lo_eff >= -2:
        # shallow frontier: series is accurate on every kept shell
        for idx, k in enumerate(ks):
            if k_norm > k >= lo_eff:
                out[idx] = bessel_j(alpha, q ** float(k), params, policy).value.real
        return out

    q2a = q ** (2.0 * alpha)
    one_m_q_sq = (1.0 - q) ** 2
    margin = max(
        10,
        int(math.ceil(math.sqrt(lo_eff * lo_eff + 160.0 / math.log2(1.0 / q)))) - abs(lo_eff) + 8,
    )

    ref = bessel_j(alpha, q ** float(k_norm), params, policy).value.real
    ref2 = bessel_j(alpha, q ** float(k_norm + 1), params, policy).value.real

    for attempt in range(4):
        k0 = lo_eff - margin
        n_steps = (k_norm + 1) - k0 + 1
        vals = np.zeros(n_steps)
        scale_log2 = np.zeros(n_steps)
        g_prev, g_cur, cur_log2 = 0.0, 1e-280, 0.0
        vals[0] = g_cur
        for i in range(1, n_steps):
            m = k0 + i - 1
            coef = 1.0 + q2a - one_m_q_sq * q ** (2.0 * m)
            g_prev, g_cur = g_cur, (coef * g_cur - g_prev) / q2a
            if abs(g_cur) > 1e250:
                g_cur *= 2.0**-900
                g_prev *= 2.0**-900
                cur_log2 += 900.0
            vals[i] = g_cur
            scale_log2[i] = cur_log2
        i_norm = k_norm - k0
        ok = vals[i_norm] != 0.0 and vals[i_norm + 1] != 0.0
        if ok:
            lr1 = math.log(abs(ref)) - (math.log(abs(vals[i_norm])) + scale_log2[i_norm] * _LN2)
            lr2 = math.log(abs(ref2)) - (math.log(abs(vals[i_norm + 1])) + scale_log2[i_norm + 1] * _LN2)
            same_sign = (ref > 0) == (vals[i_norm] > 0)
            ok = abs(lr1 - lr2) < 1e-11 and same_sign == ((ref2 > 0) == (vals[i_norm + 1] > 0))
        if ok:
            sign_rho = 1.0 if same_sign else -1.0
            log_rho = math.log(abs(ref)) - (math.log(abs(vals[i_norm])) + scale_log2[i_norm] * _LN2)
            for idx, k in enumerate(ks):
                if k >= k_norm:
                    continue
                i = k - k0
                if k < lo_eff or vals[i] == 0.0:
                    out[idx] = 0.0
                    continue
                lg = math.log(abs(vals[i])) + scale_log2[i] * _LN2 + log_rho
                out[idx] = 0.0 if lg < math.log(1e-300) else sign_rho * math.copysign(math.exp(lg), vals[i])
            return out
        margin += 12 + 6 * attempt
    raise ArithmeticError("bessel_j_exponent_family: Miller normalization failed to converge")


def qtrig_exponent_families(params: QParams, k_min: int, k_max: int,
                            policy: TruncationPolicy = DEFAULT_POLICY) -> tuple[np.ndarray, np.ndarray]:
    """cos(q^k; q^2) and sin(q^k; q^2) over k in [k_min, k_max].

    Both reduce to Bessel families: cos = j_{-1/2}, sin(x) = x j_{1/2}(x).
    """
    cos_vals = bessel_j_exponent_family(-0.5, params, k_min, k_max, policy)
    j_half = bessel_j_exponent_family(0.5, params, k_min, k_max, policy)
    ks = np.arange(k_min, k_max + 1, dtype=float)
    with np.errstate(over="ignore", under="ignore"):
        sin_vals = np.power(params.q, ks) * j_half
    sin_vals[~np.isfinite(sin_vals)] = 0.0
    return cos_vals, sin_vals


def sonine_weight(p: int, t: float, params: QParams,
                  policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    """Weight W_{p-1}(t; q^2) of the Sonine-type q-integral representation.

    W_{p-1}(t; q^2) = (1+q) Gamma_{q^2}(alpha+p+1) /
                      (Gamma_{q^2}(alpha+1) Gamma_{q^2}(p)) * (t^2 q^2; q^2)_{p-1}

    normalized so that
    j_{alpha+p}(y) = int_0^1 W_{p-1}(t) j_alpha(yt) t^(2*alpha+1) d_q t
    holds identically; at y = 0 the weight integrates to 1 against
    t^(2*alpha+1) d_q t.
    """
    if p < 1:
        raise QDomainError(f"sonine_weight needs p >= 1, got {p}")
    if not (0.0 <= t <= 1.0):
        raise QDomainError(f"sonine_weight needs t in [0, 1], got {t}")
    q = params.q
    alpha = params.alpha
    q2 = q * q
    const = (1.0 + q) * qgamma_base(alpha + p + 1.0, q2, policy) / (
        qgamma_base(alpha + 1.0, q2, policy) * qgamma_base(float(p), q2, policy)
    )
    prod = 1.0
    for k in range(p - 1):
        prod *= 1.0 - t * t * q2 ** (k + 1)
    return const * prod
