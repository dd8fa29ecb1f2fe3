"""Jackson q-integration and weighted L^p norms on the lattice.

Integrals are (in)finite weighted sums over geometric lattices.  Terms are
accumulated smallest-magnitude first with Neumaier compensation because the
weights span many orders of magnitude; every integral reports a tail
estimate alongside its value instead of silently truncating.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .qcore import DEFAULT_POLICY, DivergenceError, QDomainError, QParams, TruncationPolicy
from .qops import EVEN, GridFunction

PLAIN_LINE = "plain-line"
SIGNED_LINE = "signed-line"
WEIGHTED_2D = "weighted-2d"


@dataclass(frozen=True)
class Measure:
    """One of the three lattice measures used throughout."""

    params: QParams
    kind: str

    def __post_init__(self):
        if self.kind not in (PLAIN_LINE, SIGNED_LINE, WEIGHTED_2D):
            raise QDomainError(f"unknown measure kind {self.kind!r}")

    def log_weight_grid(self, window) -> np.ndarray:
        """Log of the measure weights on a lattice window (2d kind only)."""
        if self.kind != WEIGHTED_2D:
            raise QDomainError("log_weight_grid applies to the weighted-2d measure")
        q = self.params.q
        alpha = self.params.alpha
        n1 = window.n1_exponents().astype(float)
        n2 = window.n2_exponents().astype(float)
        logw = (
            2.0 * math.log1p(-q)
            + n1[:, None] * math.log(q)
            + n2[None, :] * (2.0 * alpha + 2.0) * math.log(q)
        )
        return np.broadcast_to(logw[None, :, :], window.shape)


@dataclass(frozen=True)
class IntegralResult:
    """Value of a truncated lattice sum together with its tail estimate."""

    value: complex
    tail: float

    def __complex__(self):
        return complex(self.value)


def neumaier_sum(terms: np.ndarray) -> complex:
    """Compensated summation, smallest magnitudes first."""
    arr = np.asarray(terms, dtype=np.complex128).ravel()
    order = np.argsort(np.abs(arr), kind="stable")
    arr = arr[order]
    total_re = comp_re = 0.0
    total_im = comp_im = 0.0
    for v in arr:
        x = v.real
        t = total_re + x
        if abs(total_re) >= abs(x):
            comp_re += (total_re - t) + x
        else:
            comp_re += (x - t) + total_re
        total_re = t
        x = v.imag
        t = total_im + x
        if abs(total_im) >= abs(x):
            comp_im += (total_im - t) + x
        else:
            comp_im += (x - t) + total_im
        total_im = t
    return complex(total_re + comp_re, total_im + comp_im)


def jackson_0_to_a(f: Callable[[float], complex], a: float, params: QParams,
                   policy: TruncationPolicy = DEFAULT_POLICY) -> IntegralResult:
    """Jackson integral from 0 to a > 0: (1-q) a sum_{n>=0} q^n f(a q^n)."""
    if a <= 0:
        raise QDomainError(f"jackson_0_to_a needs a > 0, got {a}")
    q = params.q
    n_hi = max(policy.n_max, 8)
    terms = []
    for n in range(0, n_hi + 1):
        terms.append((1.0 - q) * a * q**n * f(a * q**n))
    terms = np.asarray(terms, dtype=np.complex128)
    total = neumaier_sum(terms)
    scale = max(np.max(np.abs(terms)), abs(total), 1e-300)
    last = abs(terms[-1])
    # the lattice value a q^n -> 0, so |f| bounded near 0 gives a geometric tail
    tail = last * q / (1.0 - q)
    if last > 1e-10 * scale and abs(terms[-1]) > abs(terms[max(0, n_hi - 4)]):
        raise DivergenceError("jackson_0_to_a: terms not decaying at the window edge")
    return IntegralResult(value=total, tail=float(tail))


def jackson_signed_line(f: Callable[[float], complex], params: QParams,
                        policy: TruncationPolicy = DEFAULT_POLICY) -> IntegralResult:
    """Two-sided Jackson integral over {+-q^n}: (1-q) sum_n q^n [f(q^n) + f(-q^n)]."""
    q = params.q
    terms = []
    outer = []
    for n in range(policy.n_min, policy.n_max + 1):
        t = (1.0 - q) * q**n * (f(q**n) + f(-(q**n)))
        terms.append(t)
        if n <= policy.n_min + 2:
            outer.append(abs(t))
    terms = np.asarray(terms, dtype=np.complex128)
    total = neumaier_sum(terms)
    scale = max(np.max(np.abs(terms)), abs(total), 1e-300)
    # Cauchy test at the outer (large |x|) edge
    if max(outer) > 1e-9 * scale:
        raise DivergenceError("jackson_signed_line: outer-edge terms too large "
                              f"(edge/scale = {max(outer) / scale:.2e}); grow the window")
    inner = abs(terms[-1])
    tail = float(max(outer) * 2.0 + inner * q / (1.0 - q))
    return IntegralResult(value=total, tail=tail)


# ---------------------------------------------------------------------------
# grid-function integrals
# ---------------------------------------------------------------------------

def mu_weights(f: GridFunction) -> np.ndarray:
    """Weight array of the measure x2^(2a+1) d_q x1 d_q x2 on f's window.

    Entry (s, i1, i2) is (1-q)^2 q^n1 q^(n2 (2a+2)); kept in float64, with
    log-space fallbacks in the norm helpers for deep windows.
    """
    return np.exp(log_mu_weights(f))


def log_mu_weights(f: GridFunction) -> np.ndarray:
    return Measure(f.params, WEIGHTED_2D).log_weight_grid(f.window)


def _edge_mass_ratio(weighted: np.ndarray) -> float:
    """Fraction of total |mass| sitting on the outermost window shells."""
    total = float(np.sum(np.abs(weighted)))
    if total == 0.0:
        return 0.0
    edge = (
        float(np.sum(np.abs(weighted[:, 0, :])))
        + float(np.sum(np.abs(weighted[:, -1, :])))
        + float(np.sum(np.abs(weighted[:, :, 0])))
        + float(np.sum(np.abs(weighted[:, :, -1])))
    )
    return edge / total


def integrate_mu(f: GridFunction, policy: TruncationPolicy = DEFAULT_POLICY) -> IntegralResult:
    """Double Jackson integral of f against x2^(2a+1) d_q x1 d_q x2.

    Exact (up to rounding) for compactly supported grid functions whose
    support the window contains; the tail estimate is the edge-shell mass.
    """
    if f.parity_y != EVEN:
        raise QDomainError("integrate_mu requires even parity in x2")
    weighted = f.samples * mu_weights(f)
    value = neumaier_sum(weighted)
    tail = _edge_mass_ratio(weighted) * float(np.sum(np.abs(weighted)))
    return IntegralResult(value=value, tail=float(tail))


def lp_norm(f: GridFunction, p: float, policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    """L^p norm against the weighted measure; p = inf is the sup over samples."""
    if p == math.inf:
        return float(np.max(np.abs(f.samples)))
    if p <= 0:
        raise QDomainError(f"lp_norm needs p > 0 or inf, got {p}")
    logw = log_mu_weights(f)
    absf = np.abs(f.samples)
    mask = absf > 0.0
    if not np.any(mask):
        return 0.0
    logs = p * np.log(absf[mask]) + logw[mask]
    m = float(np.max(logs))
    s = float(np.sum(np.exp(logs - m)))
    return math.exp((m + math.log(s)) / p)


def log_l2_norm_sq(values: np.ndarray, logw: np.ndarray) -> float:
    """log of sum |values|^2 * exp(logw); -inf for identically zero input."""
    absv = np.abs(values)
    mask = absv > 0.0
    if not np.any(mask):
        return -math.inf
    logs = 2.0 * np.log(absv[mask]) + logw[mask]
    m = float(np.max(logs))
    return m + math.log(float(np.sum(np.exp(logs - m))))
