"""Discrete operator calculus on lattice grid functions.

Grid functions live on the product of the signed lattice {+-q^n1} (first
variable) and the positive lattice {q^n2} (second variable), with a parity
flag describing the even extension across x2 = 0.  All operators are pure:
they return new GridFunction instances.

Out-of-window reads are zeros; each symmetric q-derivative application
contaminates one boundary layer of the exponent window in the affected
variable, which the window records as taint.  Results should only be
trusted on the untainted interior.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .qcore import LatticePoint, QDomainError, QParams, TaintError

EVEN = "even"
ODD = "odd"


@dataclass(frozen=True)
class LatticeWindow:
    """Exponent window [n1_min, n1_max] x [n2_min, n2_max] plus taint layers."""

    n1_min: int
    n1_max: int
    n2_min: int
    n2_max: int
    taint_x_lo: int = 0
    taint_x_hi: int = 0
    taint_y_lo: int = 0
    taint_y_hi: int = 0

    def __post_init__(self):
        if self.n1_min > self.n1_max or self.n2_min > self.n2_max:
            raise QDomainError("LatticeWindow needs n_min <= n_max in both variables")
        if min(self.taint_x_lo, self.taint_x_hi, self.taint_y_lo, self.taint_y_hi) < 0:
            raise QDomainError("taint layers must be >= 0")

    @property
    def shape(self) -> tuple[int, int, int]:
        return (2, self.n1_max - self.n1_min + 1, self.n2_max - self.n2_min + 1)

    @property
    def taint_depth(self) -> int:
        return max(self.taint_x_lo, self.taint_x_hi, self.taint_y_lo, self.taint_y_hi)

    def tainted_more(self, dx: int = 0, dy: int = 0) -> "LatticeWindow":
        return replace(
            self,
            taint_x_lo=self.taint_x_lo + dx,
            taint_x_hi=self.taint_x_hi + dx,
            taint_y_lo=self.taint_y_lo + dy,
            taint_y_hi=self.taint_y_hi + dy,
        )

    def untainted_slices(self) -> tuple[slice, slice]:
        """Index slices (along n1 and n2 axes) of the trustworthy interior."""
        _, nn1, nn2 = self.shape
        s1 = slice(self.taint_x_lo, nn1 - self.taint_x_hi)
        s2 = slice(self.taint_y_lo, nn2 - self.taint_y_hi)
        if s1.stop <= s1.start or s2.stop <= s2.start:
            raise TaintError("window fully tainted: no untainted interior left")
        return s1, s2

    def n1_exponents(self) -> np.ndarray:
        return np.arange(self.n1_min, self.n1_max + 1)

    def n2_exponents(self) -> np.ndarray:
        return np.arange(self.n2_min, self.n2_max + 1)


@dataclass(frozen=True)
class GridFunction:
    """Complex samples on a lattice window; axis 0 is the sign of x1 (+, -)."""

    params: QParams
    window: LatticeWindow
    parity_y: str
    samples: np.ndarray

    def __post_init__(self):
        if self.parity_y not in (EVEN, ODD):
            raise QDomainError(f"parity_y must be 'even' or 'odd', got {self.parity_y}")
        arr = np.ascontiguousarray(self.samples, dtype=np.complex128)
        if arr.shape != self.window.shape:
            raise QDomainError(f"samples shape {arr.shape} != window shape {self.window.shape}")
        if not np.all(np.isfinite(arr.view(np.float64))):
            raise QDomainError("samples must be finite (no NaN/Inf)")
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)

    # -- coordinate helpers ------------------------------------------------
    def x1_values(self) -> np.ndarray:
        """Array (2, N1): row 0 is +q^n1, row 1 is -q^n1."""
        q = self.params.q
        mag = q ** self.window.n1_exponents().astype(float)
        return np.stack([mag, -mag])

    def x2_values(self) -> np.ndarray:
        q = self.params.q
        return q ** self.window.n2_exponents().astype(float)

    def value_at(self, sign: int, n1: int, n2: int) -> complex:
        """Sample at (sign*q^n1, q^n2); zero outside the stored window."""
        w = self.window
        if not (w.n1_min <= n1 <= w.n1_max and w.n2_min <= n2 <= w.n2_max):
            return 0.0 + 0.0j
        s = 0 if sign == 1 else 1
        return complex(self.samples[s, n1 - w.n1_min, n2 - w.n2_min])

    def with_samples(self, samples: np.ndarray, window: LatticeWindow | None = None,
                     parity_y: str | None = None) -> "GridFunction":
        return GridFunction(
            params=self.params,
            window=self.window if window is None else window,
            parity_y=self.parity_y if parity_y is None else parity_y,
            samples=samples,
        )

    def untainted_values(self) -> np.ndarray:
        s1, s2 = self.window.untainted_slices()
        return self.samples[:, s1, s2]

    @staticmethod
    def zeros(params: QParams, window: LatticeWindow, parity_y: str = EVEN) -> "GridFunction":
        return GridFunction(params, window, parity_y, np.zeros(window.shape, dtype=np.complex128))

    @staticmethod
    def from_callable(params: QParams, window: LatticeWindow, fn: Callable[[float, float], complex],
                      parity_y: str = EVEN) -> "GridFunction":
        q = params.q
        x1m = q ** window.n1_exponents().astype(float)
        x2 = q ** window.n2_exponents().astype(float)
        arr = np.empty(window.shape, dtype=np.complex128)
        for s, sgn in ((0, 1.0), (1, -1.0)):
            for i, v1 in enumerate(x1m):
                for j, v2 in enumerate(x2):
                    arr[s, i, j] = fn(sgn * v1, v2)
        return GridFunction(params, window, parity_y, arr)


# ---------------------------------------------------------------------------
# pointwise (callable) operators
# ---------------------------------------------------------------------------

def dq_1d(f: Callable[[float], complex], at: LatticePoint, params: QParams) -> complex:
    """Rubin symmetric q-derivative of a callable at a nonzero lattice point.

    [f(z/q) + f(-z/q) - f(qz) + f(-qz) - 2 f(-z)] / (2 (1-q) z).
    """
    q = params.q
    z = at.value(q)
    return (f(z / q) + f(-z / q) - f(q * z) + f(-q * z) - 2.0 * f(-z)) / (2.0 * (1.0 - q) * z)


def even_odd_split(f: Callable[[float], complex]):
    """Return (f_even, f_odd) callables with f = f_even + f_odd exactly."""

    def fe(z):
        return 0.5 * (f(z) + f(-z))

    def fo(z):
        return 0.5 * (f(z) - f(-z))

    return fe, fo


# ---------------------------------------------------------------------------
# grid operators
# ---------------------------------------------------------------------------

def _shift_n1(arr: np.ndarray, step: int) -> np.ndarray:
    """Samples at exponent n1+step, zero-filled outside the window."""
    out = np.zeros_like(arr)
    if step == 0:
        return arr.copy()
    if step > 0:
        out[:, :-step, :] = arr[:, step:, :]
    else:
        out[:, -step:, :] = arr[:, :step, :]
    return out


def _shift_n2(arr: np.ndarray, step: int) -> np.ndarray:
    out = np.zeros_like(arr)
    if step == 0:
        return arr.copy()
    if step > 0:
        out[:, :, :-step] = arr[:, :, step:]
    else:
        out[:, :, -step:] = arr[:, :, :step]
    return out


def dq_partial(f: GridFunction, var: int) -> GridFunction:
    """Symmetric q-derivative along variable 1 (signed) or 2 (positive, parity-aware).

    Along variable 2 the parity flag flips: the derivative of an even
    function is odd and vice versa.
    """
    q = f.params.q
    s = f.samples
    if var == 1:
        flipped = s[::-1, :, :]
        num = (
            _shift_n1(s, -1)          # f(z/q): exponent n1-1
            + _shift_n1(flipped, -1)  # f(-z/q)
            - _shift_n1(s, 1)         # f(qz)
            + _shift_n1(flipped, 1)   # f(-qz)
            - 2.0 * flipped           # f(-z)
        )
        denom = 2.0 * (1.0 - q) * f.x1_values()[:, :, None]
        return f.with_samples(num / denom, window=f.window.tainted_more(dx=1))
    if var == 2:
        y = f.x2_values()[None, None, :]
        if f.parity_y == EVEN:
            num = _shift_n2(s, -1) - s          # f(y/q) - f(y)
            parity = ODD
        else:
            num = s - _shift_n2(s, 1)           # f(y) - f(qy)
            parity = EVEN
        return f.with_samples(num / ((1.0 - q) * y), window=f.window.tainted_more(dy=1),
                              parity_y=parity)
    raise QDomainError(f"var must be 1 or 2, got {var}")


def dq_mixed(f: GridFunction, beta: tuple[int, int]) -> GridFunction:
    """D_q^beta = (d/d x1)^beta1 (d/d x2)^beta2 by iterated application."""
    b1, b2 = beta
    if b1 < 0 or b2 < 0:
        raise QDomainError("derivative orders must be >= 0")
    g = f
    for _ in range(b1):
        g = dq_partial(g, 1)
    for _ in range(b2):
        g = dq_partial(g, 2)
    g.window.untainted_slices()   # raises TaintError if nothing survives
    return g


def bessel_op(f: GridFunction) -> GridFunction:
    """q-Bessel operator in the second variable (conjugated form).

    For f even in x2 the weight |y|^(2a+1) cancels analytically and the
    operator collapses to the one-shell stencil
    [f(y/q) - (1 + q^(2a)) f(y) + q^(2a) f(qy)] / ((1-q)^2 y^2),
    so no large weights are ever formed.
    """
    if f.parity_y != EVEN:
        raise QDomainError("bessel_op requires even parity in the second variable")
    q = f.params.q
    q2a = q ** (2.0 * f.params.alpha)
    s = f.samples
    num = _shift_n2(s, -1) - (1.0 + q2a) * s + q2a * _shift_n2(s, 1)
    y = f.x2_values()[None, None, :]
    out = num / ((1.0 - q) ** 2 * y * y)
    return f.with_samples(out, window=f.window.tainted_more(dy=2))


def bessel_op_expanded(f: GridFunction) -> GridFunction:
    """Expanded form q^(2a+1) d2f/dy2 + [2a+1]_q (1/y) df/dy of the q-Bessel operator.

    Algebraically identical to the conjugated form on even functions;
    kept as an independent floating-point path for cross-checking.
    """
    if f.parity_y != EVEN:
        raise QDomainError("bessel_op_expanded requires even parity")
    q = f.params.q
    alpha = f.params.alpha
    d1 = dq_partial(f, 2)
    d2 = dq_partial(d1, 2)
    bracket = (1.0 - q ** (2.0 * alpha + 1.0)) / (1.0 - q)
    y = f.x2_values()[None, None, :]
    # d1 lives on a window tainted once; align shapes (same index grid)
    samples = q ** (2.0 * alpha + 1.0) * d2.samples + bracket * d1.samples / y
    return f.with_samples(samples, window=d2.window)


def weinstein_op(f: GridFunction, n: int = 1) -> GridFunction:
    """n-fold q-Weinstein operator: (d^2/dx1^2 + Bessel_y)^n, n = 0 is identity."""
    if n < 0:
        raise QDomainError("weinstein_op needs n >= 0")
    if f.parity_y != EVEN:
        raise QDomainError("weinstein_op requires even parity")
    g = f
    for _ in range(n):
        d2x = dq_partial(dq_partial(g, 1), 1)
        by = bessel_op(g)
        samples = d2x.samples + by.samples
        window = g.window.tainted_more(dx=2, dy=2)
        g = g.with_samples(samples, window=window)
        g.window.untainted_slices()   # taint budget check
    return g
