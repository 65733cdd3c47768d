"""Decay parameter: Lagrange approximations, analytic bounds, exact eigenvalue.

The exact value comes from Sturm-sequence bisection on the symmetrized
tri-diagonal matrix.  Sign counts use the pivot recursion

    d_0 = a_0 - x,   d_i = (a_i - x) - p_{i-1} q_i / d_{i-1},

where the off-diagonal enters only through the exact products p_{i-1} q_i,
so no square roots are taken.  The number of negative pivots equals the
number of eigenvalues below x, which lets us select the target eigenvalue by
index: essential because the decay parameter can cluster exponentially close
to the zero eigenvalue.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
from mpmath import mp

from ._numbers import to_mpf
from .chain import RateLadder
from .charpoly import CharCoeffs, char_coeffs
from .errors import (
    InconsistentCoefficientsError,
    InsufficientCoefficientsError,
    PrecisionExhaustedError,
    ReducibleChainError,
)

RATIONAL_EXACT = "rational-exact"
FLOAT = "float"


@dataclass(frozen=True)
class PrecisionCtx:
    """Working-precision context: exact rationals or mpmath floats.

    In float mode all Sturm pivots are mpf numbers with `mantissa_bits` of
    mantissa; in rational-exact mode they are Fractions and counts are exact
    (practical only for small ladders: pivot bit-size grows with the state
    count).
    """

    mode: str = FLOAT
    mantissa_bits: int = 128

    def __post_init__(self):
        if self.mode not in (FLOAT, RATIONAL_EXACT):
            raise ValueError(f"unknown precision mode {self.mode!r}")
        if self.mantissa_bits < 64:
            raise ValueError("mantissa_bits must be at least 64")

    @property
    def default_tol(self):
        return Fraction(1, 2 ** (self.mantissa_bits // 2))

    @classmethod
    def auto(cls, n: int, x) -> "PrecisionCtx":
        return cls(mode=FLOAT, mantissa_bits=required_precision(n, x))


def required_precision(n: int, x) -> int:
    """Mantissa bits needed to resolve a decay parameter of order x^-(n-1) n:

    ceil(n * log2(max(x, 2))) + 96, floored at 128.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if x <= 0:
        raise ValueError("x must be positive")
    return max(128, math.ceil(n * math.log2(max(float(x), 2.0))) + 96)


@dataclass(frozen=True)
class DecayReport:
    """All decay-parameter estimates for one ladder."""

    zeta_exact: object
    zeta_lagrange: dict
    zeta_first_bound: object
    zeta_newton_bound: object
    ordering_ok: bool
    precision_bits: int
    coeffs: CharCoeffs = field(repr=False, default=None)


def lagrange_zeta(coeffs: CharCoeffs, order: int):
    """Series inversion of the characteristic polynomial around xi = 0:

        order 1:  -f0/f1
        order 2:  -f0/f1 - (f2/f1)(f0/f1)^2
        order 3:  ... + [-2 (f2/f1)^2 + f3/f1] (f0/f1)^3

    Exact (Fraction) when the coefficients are exact.
    """
    if order not in (1, 2, 3):
        raise ValueError("order must be 1, 2 or 3")
    f = coeffs.f
    if len(f) < order + 1 and len(f) < coeffs.n + 1:
        raise InsufficientCoefficientsError(
            f"order-{order} series needs f_0..f_{order}; have {len(f)} coefficients"
        )
    if f[0] <= 0 or f[1] <= 0:
        raise InconsistentCoefficientsError("f0 and f1 must be positive")
    r = f[0] / f[1]
    zeta = -r
    if order >= 2:
        f2 = f[2] if len(f) > 2 else 0 * r
        zeta = zeta - (f2 / f[1]) * r * r
    if order >= 3:
        f2 = f[2] if len(f) > 2 else 0 * r
        f3 = f[3] if len(f) > 3 else 0 * r
        zeta = zeta + (-2 * (f2 / f[1]) ** 2 + f3 / f[1]) * r ** 3
    return zeta


def newton_bound(coeffs: CharCoeffs, mantissa_bits: int = 128):
    """Upper bound on the decay parameter from inverse-square power sums:

        zeta <= -(f0/f1) / sqrt(1 - (2 f2/f0)(f0/f1)^2)

    Returns an mpf (the square root is generally irrational).
    """
    f = coeffs.f
    if len(f) < 3 and coeffs.n >= 2:
        raise InsufficientCoefficientsError("newton bound needs f_0..f_2")
    f2 = f[2] if len(f) > 2 else 0 * f[0]
    r = f[0] / f[1]
    radicand = 1 - (2 * f2 / f[0]) * r * r
    if radicand <= 0:
        raise InconsistentCoefficientsError(
            "nonpositive radicand: coefficients cannot come from a real-spectrum ladder"
        )
    with mp.workprec(mantissa_bits):
        return -to_mpf(r) / mp.sqrt(to_mpf(radicand))


# ---------------------------------------------------------------------------
# Sturm machinery
# ---------------------------------------------------------------------------


def _sturm_arrays(ladder: RateLadder, ctx: PrecisionCtx):
    """(diag, offdiag^2) of the shifted working matrix, in ctx arithmetic.

    Must be called inside mp.workprec(ctx.mantissa_bits) in float mode.
    """
    n = ladder.n_states
    diag = [ladder.diag_entry(j) for j in range(n)]
    offsq = list(ladder.offdiag_sq())
    if ctx.mode == RATIONAL_EXACT:
        return [Fraction(d) for d in diag], [Fraction(s) for s in offsq]
    return [to_mpf(d) for d in diag], [to_mpf(s) for s in offsq]


def sturm_count_below(diag, offsq, x, tiny):
    """Number of eigenvalues strictly below x (zero pivots nudged negative)."""
    count = 0
    d = diag[0] - x
    if d == 0:
        d = -tiny
    if d < 0:
        count += 1
    for i in range(1, len(diag)):
        d = (diag[i] - x) - offsq[i - 1] / d
        if d == 0:
            d = -tiny
        if d < 0:
            count += 1
    return count


def _bisect_eigenvalue(diag, offsq, k, lo, hi, tol, tiny):
    """k-th smallest eigenvalue (1-indexed), given count(lo) < k <= count(hi)."""
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if sturm_count_below(diag, offsq, mid, tiny) >= k:
            hi = mid
        else:
            lo = mid
    return (lo + hi) / 2


def _eig_by_index(diag, offsq, k, tol, tiny):
    """k-th smallest eigenvalue; bracket from Gershgorin discs, hi = 0."""
    scale = max(abs(d) for d in diag) + max(offsq, default=0)
    lo = -4 * scale - 1
    while sturm_count_below(diag, offsq, lo, tiny) > 0:
        lo *= 2
    hi = lo * 0  # typed zero
    return _bisect_eigenvalue(diag, offsq, k, lo, hi, tol, tiny)


def exact_zeta(ladder: RateLadder, ctx: PrecisionCtx | None = None, tol=None):
    """Decay parameter by index-selected Sturm bisection.

    Irreducible ladder: second-largest eigenvalue (the largest is exactly 0
    for a generator / shift of 1 for a stochastic matrix).  Restricted
    sub-generator: largest eigenvalue.  Result is bracketed to width <= tol
    (default 2^-(mantissa_bits/2)).

    Raises PrecisionExhaustedError when the located value is within the
    round-off floor of 0, i.e. the working precision cannot separate the
    decay parameter from the trivial eigenvalue.
    """
    ctx = ctx or PrecisionCtx()
    if ladder.reducible and not ladder.is_subgenerator:
        raise ReducibleChainError(
            "exact_zeta needs an irreducible ladder or a restricted sub-generator"
        )
    if tol is not None and tol <= 0:
        raise ValueError("tol must be positive")
    n = ladder.n_states
    k = n if ladder.is_subgenerator else n - 1
    if k == 0:  # 1-state irreducible generator: only the zero eigenvalue
        raise ReducibleChainError("a single-state chain has no decay parameter")

    if ctx.mode == RATIONAL_EXACT:
        diag, offsq = _sturm_arrays(ladder, ctx)
        tol_r = Fraction(tol) if tol is not None else ctx.default_tol
        tiny = Fraction(1, 2 ** (2 * ctx.mantissa_bits))
        zeta = _eig_by_index(diag, offsq, k, tol_r, tiny)
        floor = max(abs(d) for d in diag) * Fraction(1, 2 ** (ctx.mantissa_bits * 4))
        if abs(zeta) <= max(floor, tol_r):
            raise PrecisionExhaustedError(
                "decay parameter not separable from 0 at this tolerance"
            )
        return zeta

    with mp.workprec(ctx.mantissa_bits):
        diag, offsq = _sturm_arrays(ladder, ctx)
        tol_m = to_mpf(tol) if tol is not None else to_mpf(ctx.default_tol)
        tiny = mp.mpf(2) ** (-2 * ctx.mantissa_bits)
        zeta = _eig_by_index(diag, offsq, k, tol_m, tiny)
        scale = max(abs(d) for d in diag)
        floor = scale * mp.mpf(2) ** (-(ctx.mantissa_bits - 24)) * n
        if abs(zeta) <= max(floor, tol_m):
            raise PrecisionExhaustedError(
                f"|zeta| <= resolution floor {mpmath.nstr(max(floor, tol_m), 5)} "
                f"at {ctx.mantissa_bits} bits; raise the precision"
            )
        return +zeta


def decay_report(ladder: RateLadder, ctx: PrecisionCtx | None = None) -> DecayReport:
    """Exact decay parameter plus Lagrange orders 1-3 and both bounds.

    Checks (and reports) the ordering zeta <= newton <= -f0/f1 < 0 and
    L2 <= L1.
    """
    ctx = ctx or PrecisionCtx()
    kmax = min(3, ladder.embedded().n_states - 1)
    coeffs = char_coeffs(ladder, kmax=kmax)
    lag = {order: lagrange_zeta(coeffs, order) for order in (1, 2, 3)}
    nb = newton_bound(coeffs, mantissa_bits=ctx.mantissa_bits)
    zeta = exact_zeta(ladder, ctx)
    with mp.workprec(ctx.mantissa_bits):
        l1, l2 = to_mpf(lag[1]), to_mpf(lag[2])
        z = to_mpf(zeta)
        # bisection tolerance slack on the exact value
        slack = to_mpf(ctx.default_tol) * 2
        ordering_ok = bool(z <= nb + slack and nb <= l1 and l1 < 0 and l2 <= l1)
    return DecayReport(
        zeta_exact=zeta,
        zeta_lagrange=lag,
        zeta_first_bound=lag[1],
        zeta_newton_bound=nb,
        ordering_ok=ordering_ok,
        precision_bits=ctx.mantissa_bits,
        coeffs=coeffs,
    )
