"""Generalized birth-death ladders: rates, steady state, symmetrization.

A ladder on states 0..N is defined by up-rates p_0..p_{N-1} and down-rates
q_1..q_N (conventions p_N = q_0 = 0).  In `generator` mode the tri-diagonal
matrix is the infinitesimal generator Q with diagonal -(p_j + q_j); in
`stochastic` mode it is the transition matrix P with diagonal 1 - p_j - q_j.
All spectral machinery in this package works in the shifted variable
xi (= eigenvalue of Q, or lambda - 1 for P), which makes the two modes share
one code path.

A `loss0 > 0` marks a restricted sub-generator: the block on the transient
states of an absorbing chain, where the absorption rate out of the bottom
state is kept as pure loss on the diagonal.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from mpmath import mp

from ._numbers import all_exact, as_number, is_exact, to_mpf
from .errors import (
    InvalidParameterError,
    IrreducibleChainError,
    ReducibleChainError,
    UnsupportedStructureError,
)

GENERATOR = "generator"
STOCHASTIC = "stochastic"


@dataclass(frozen=True)
class RateLadder:
    """Immutable birth-death rate ladder.

    up:    p_0..p_{N-1}   (rate j -> j+1)
    down:  q_1..q_N       (rate j -> j-1)
    mode:  "generator" or "stochastic"
    loss0: extra exit rate from state 0 (restricted sub-generators only)
    """

    up: tuple
    down: tuple
    mode: str = GENERATOR
    loss0: object = 0

    def __post_init__(self):
        object.__setattr__(self, "up", tuple(as_number(v) for v in self.up))
        object.__setattr__(self, "down", tuple(as_number(v) for v in self.down))
        object.__setattr__(self, "loss0", as_number(self.loss0))
        if self.mode not in (GENERATOR, STOCHASTIC):
            raise ValueError(f"unknown mode {self.mode!r}")
        if len(self.up) != len(self.down):
            raise ValueError("up and down must have equal length (p_0..p_{N-1} / q_1..q_N)")
        if any(v < 0 for v in self.up) or any(v < 0 for v in self.down) or self.loss0 < 0:
            raise InvalidParameterError("rates must be nonnegative")
        if self.mode == STOCHASTIC:
            if self.loss0 != 0:
                raise InvalidParameterError("stochastic ladders cannot carry a loss term")
            for j in range(self.n_states):
                if self.out_rate(j) > 1:
                    raise InvalidParameterError(
                        f"stochastic mode requires p_j + q_j <= 1 (violated at j={j})"
                    )

    @property
    def n_states(self) -> int:
        return len(self.up) + 1

    @property
    def exact(self) -> bool:
        return all_exact(self.up) and all_exact(self.down) and is_exact(self.loss0)

    @property
    def reducible(self) -> bool:
        """True when some interior transition rate vanishes (loss0 ignored)."""
        return any(v == 0 for v in self.up) or any(v == 0 for v in self.down)

    @property
    def is_subgenerator(self) -> bool:
        return self.loss0 != 0

    def up_rate(self, j):
        """p_j with the p_N = 0 convention."""
        return self.up[j] if 0 <= j < len(self.up) else Fraction(0)

    def down_rate(self, j):
        """q_j with the q_0 = 0 convention."""
        return self.down[j - 1] if 1 <= j <= len(self.down) else Fraction(0)

    def out_rate(self, j):
        out = self.up_rate(j) + self.down_rate(j)
        if j == 0:
            out = out + self.loss0
        return out

    def diag_entry(self, j):
        """Diagonal of the working (shifted) matrix: -(p_j+q_j[+loss0])."""
        d = -self.out_rate(j)
        return d

    def offdiag_sq(self):
        """Products p_{j-1} q_j for j=1..N: squares of the symmetrized off-diagonal."""
        return tuple(self.up[j - 1] * self.down[j - 1] for j in range(1, self.n_states))

    def to_dense(self):
        """Dense matrix as list of rows (generator Q, or stochastic P)."""
        n = self.n_states
        one = Fraction(1) if self.exact else 1.0
        rows = []
        for j in range(n):
            row = [0 * one for _ in range(n)]
            if j < n - 1:
                row[j + 1] = self.up[j]
            if j >= 1:
                row[j - 1] = self.down[j - 1]
            if self.mode == GENERATOR:
                row[j] = -self.out_rate(j)
            else:
                row[j] = one - self.out_rate(j)
            rows.append(row)
        return rows

    def embedded(self) -> "RateLadder":
        """Re-attach the absorbing state of a restricted sub-generator.

        Returns the (reducible) full ladder whose transient block is this
        sub-generator; identity when loss0 == 0.
        """
        if not self.is_subgenerator:
            return self
        return RateLadder(
            up=(Fraction(0),) + self.up,
            down=(self.loss0,) + self.down,
            mode=self.mode,
        )


@dataclass(frozen=True)
class SteadyState:
    """Stationary distribution pi_0..pi_N of an irreducible ladder."""

    pi: tuple

    def __getitem__(self, j):
        return self.pi[j]

    def __len__(self):
        return len(self.pi)


@dataclass(frozen=True)
class SymTridiag:
    """Symmetrized tri-diagonal form and the similarity weights.

    offdiag_sq and h_sq are exact when the ladder is; offdiag and h are their
    square roots at float precision (use offdiag_sq for precision-critical
    work such as Sturm counts).
    """

    diag: tuple
    offdiag_sq: tuple
    h_sq: tuple
    offdiag: tuple = field(repr=False, default=())
    h: tuple = field(repr=False, default=())


def build_eps_sis_ladder(n, beta, delta, eps) -> RateLadder:
    """Ladder of the self-exciting SIS process on the complete graph K_n.

    Up-rates (beta*j + eps)*(n - j), down-rates j*delta on states 0..n.
    With eps = 0 state 0 is absorbing and the ladder is reducible.
    """
    beta, delta, eps = as_number(beta), as_number(delta), as_number(eps)
    if n < 1 or int(n) != n:
        raise InvalidParameterError("n must be a positive integer")
    if beta <= 0 or delta <= 0:
        raise InvalidParameterError("beta and delta must be positive")
    if eps < 0:
        raise InvalidParameterError("eps must be nonnegative")
    n = int(n)
    up = tuple((beta * j + eps) * (n - j) for j in range(n))
    down = tuple(j * delta for j in range(1, n + 1))
    return RateLadder(up=up, down=down, mode=GENERATOR)


def steady_state(ladder: RateLadder) -> SteadyState:
    """Product-form stationary distribution.

    pi_j proportional to prod_{m<j} p_m / q_{m+1}; exact for exact rates.
    """
    if ladder.is_subgenerator:
        raise ReducibleChainError("a restricted sub-generator has no stationary distribution")
    if ladder.reducible:
        raise ReducibleChainError("steady state requires an irreducible ladder")
    n = ladder.n_states
    weights = [Fraction(1) if ladder.exact else 1.0]
    for j in range(n - 1):
        weights.append(weights[-1] * ladder.up[j] / ladder.down[j])
    total = sum(weights)
    return SteadyState(pi=tuple(w / total for w in weights))


def symmetrize(ladder: RateLadder, mantissa_bits: int = 128) -> SymTridiag:
    """Similarity transform H = diag(h_1..h_n) making the matrix symmetric.

    h_1 = 1 and (h_{i+1}/h_i)^2 = p_{i-1}/q_i; the symmetric off-diagonal is
    sqrt(p_{i-1} q_i).  Requires all interior rates positive (the transform
    divides by q_i); a loss0 term is allowed and stays on the diagonal.
    """
    if ladder.reducible:
        raise ReducibleChainError("symmetrization requires all interior rates positive")
    n = ladder.n_states
    if ladder.mode == GENERATOR:
        diag = tuple(-ladder.out_rate(j) for j in range(n))
    else:
        one = Fraction(1) if ladder.exact else 1.0
        diag = tuple(one - ladder.out_rate(j) for j in range(n))
    off_sq = ladder.offdiag_sq()
    h_sq = [Fraction(1) if ladder.exact else 1.0]
    for i in range(1, n):
        h_sq.append(h_sq[-1] * ladder.up[i - 1] / ladder.down[i - 1])
    with mp.workprec(mantissa_bits):
        off = tuple(mp.sqrt(to_mpf(v)) for v in off_sq)
        h = tuple(mp.sqrt(to_mpf(v)) for v in h_sq)
    return SymTridiag(diag=diag, offdiag_sq=tuple(off_sq), h_sq=tuple(h_sq), offdiag=off, h=h)


def restrict_transient(ladder: RateLadder) -> RateLadder:
    """Drop the absorbing state 0, keeping its entry rate as pure loss.

    The returned ladder lives on the original states 1..N (relabelled 0..N-1)
    with loss0 = q_1.  The decay parameter of the original chain equals the
    largest eigenvalue of this sub-generator.
    """
    if ladder.is_subgenerator:
        raise UnsupportedStructureError("ladder is already a restricted sub-generator")
    if not ladder.reducible:
        raise IrreducibleChainError("ladder has no absorbing state to restrict away")
    if ladder.up_rate(0) != 0:
        raise UnsupportedStructureError(
            "transient restriction supports reducibility at state 0 only (p_0 = 0)"
        )
    if ladder.mode != GENERATOR:
        raise UnsupportedStructureError("transient restriction applies to generator ladders")
    return RateLadder(
        up=ladder.up[1:],
        down=ladder.down[1:],
        mode=GENERATOR,
        loss0=ladder.down[0],
    )
