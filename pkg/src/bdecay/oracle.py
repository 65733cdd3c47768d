"""Independent ground-truth generators: full spectrum, hitting times,
transient-decay fits, and event-driven stochastic simulation.

These are the package's internal referees: each one reaches the quantities of
interest by a route disjoint from the closed forms it is used to check.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from mpmath import mp

from ._numbers import to_float, to_mpf
from .chain import GENERATOR, RateLadder, steady_state
from .decay import PrecisionCtx, _bisect_eigenvalue, _sturm_arrays, sturm_count_below
from .errors import (
    InvalidParameterError,
    PrecisionExhaustedError,
    UnsupportedStructureError,
)
from .sis import EpsSisParams

DENSE_LIMIT = 64

RNG_METADATA = {
    "algorithm": "numpy.random.Philox (Philox 4x64 counter-based)",
    "numpy_version": np.__version__,
    "stream_derivation": "SeedSequence(entropy=seed, spawn_key=(run_index,))",
}


def dense_spectrum(ladder: RateLadder, ctx: PrecisionCtx | None = None, tol=None):
    """All eigenvalue shifts of the ladder matrix, sorted descending.

    Root isolation on the degree-(N+1) polynomial of the matrix via Sturm
    sign counts: each eigenvalue is extracted by index, so clustered values
    come out with their multiplicities.  Works for reducible ladders (zero
    off-diagonal products decouple the blocks).
    """
    ctx = ctx or PrecisionCtx()
    n = ladder.n_states
    if n - 1 > DENSE_LIMIT:
        raise InvalidParameterError(f"dense spectrum is limited to N <= {DENSE_LIMIT}")
    with mp.workprec(ctx.mantissa_bits):
        diag, offsq = _sturm_arrays(ladder, ctx)
        if ctx.mode == "rational-exact":
            tiny = Fraction(1, 2 ** (2 * ctx.mantissa_bits))
            tol_v = Fraction(tol) if tol is not None else ctx.default_tol
        else:
            tiny = mp.mpf(2) ** (-2 * ctx.mantissa_bits)
            tol_v = to_mpf(tol) if tol is not None else to_mpf(ctx.default_tol)
        scale = max(abs(d) for d in diag) + 1
        lo = -4 * scale
        while sturm_count_below(diag, offsq, lo, tiny) > 0:
            lo *= 2
        hi = scale * 0 + 1  # generator shifts are <= 0; +1 margin is harmless
        while sturm_count_below(diag, offsq, hi, tiny) < n:
            hi *= 2
        eigs = []
        for k in range(1, n + 1):
            eigs.append(_bisect_eigenvalue(diag, offsq, k, lo, hi, tol_v, tiny))
        return list(reversed([+e for e in eigs]))


def hitting_time_solve(ladder: RateLadder):
    """Mean absorption times h_j = E[T | start j], j = 1..N, exactly.

    The ladder must have its absorbing state at 0 (p_0 = 0, generator mode).
    Solves the tri-diagonal system Q_S h = -1 by elimination; exact for
    rational rates.  h_N equals the closed-form mean lifetime for the
    complete-graph epidemic.
    """
    if ladder.is_subgenerator:
        base = ladder.embedded()
    else:
        base = ladder
    if base.mode != GENERATOR or base.up_rate(0) != 0:
        raise UnsupportedStructureError("hitting times need an absorbing state 0")
    n = base.n_states - 1  # transient states 1..n
    if n == 0:
        return ()
    if any(base.down_rate(j) == 0 for j in range(1, n + 1)):
        raise UnsupportedStructureError("a zero down-rate disconnects the transient class")
    one = Fraction(1) if base.exact else 1.0
    # rows j=1..n of Q_S h = -1:  q_j h_{j-1} - (p_j+q_j) h_j + p_j h_{j+1} = -1
    sub = [base.down_rate(j) for j in range(1, n + 1)]       # q_j
    sup = [base.up_rate(j) for j in range(1, n + 1)]         # p_j (p_n = 0)
    diag = [-(sub[i] + sup[i]) for i in range(n)]
    rhs = [-one for _ in range(n)]
    # forward elimination (h_0 = 0 closes the first row)
    for i in range(1, n):
        w = sub[i] / diag[i - 1]
        diag[i] = diag[i] - w * sup[i - 1]
        rhs[i] = rhs[i] - w * rhs[i - 1]
    h = [one * 0 for _ in range(n)]
    h[n - 1] = rhs[n - 1] / diag[n - 1]
    for i in range(n - 2, -1, -1):
        h[i] = (rhs[i] - sup[i] * h[i + 1]) / diag[i]
    return tuple(h)


@dataclass(frozen=True)
class AbsorptionSample:
    """One simulated extinction: absorption time, start state, run seed."""

    t: float
    start_state: int
    seed: int


@dataclass(frozen=True)
class GillespieResult:
    """Absorption-time samples plus summary statistics.

    times[i] is the absorption time of run i (run order, not completion
    order).  budget_exhausted marks a partial result cut off by the
    wall-clock budget.
    """

    times: np.ndarray
    start_state: int
    seed: int
    mean: float
    stderr: float
    runs_requested: int
    runs_completed: int
    budget_exhausted: bool
    metadata: dict

    def iter_samples(self):
        for i in range(self.runs_completed):
            yield AbsorptionSample(t=float(self.times[i]), start_state=self.start_state, seed=self.seed)


def gillespie_simulate(
    params: EpsSisParams,
    start: int | None = None,
    runs: int = 10_000,
    seed: int = 0,
    time_budget_s: float = 60.0,
) -> GillespieResult:
    """Event-driven simulation of the epidemic until extinction.

    Requires eps = 0 (guaranteed absorption).  Each run draws from an
    independent, reproducible Philox stream derived from (seed, run_index);
    fixed seeds give bit-identical sample streams.  Above the threshold the
    mean lifetime explodes exponentially in n, so simulation is only sensible
    below or near threshold: the wall-clock budget aborts with partial
    results flagged rather than hanging.
    """
    if params.eps != 0:
        raise InvalidParameterError("simulation requires eps = 0 (absorbing chain)")
    if runs < 1:
        raise InvalidParameterError("runs must be >= 1")
    n = params.n
    start = n if start is None else int(start)
    if not 0 < start <= n:
        raise InvalidParameterError("start state must lie in 1..n")
    beta, delta = to_float(params.beta), to_float(params.delta)
    lam = np.array([beta * j * (n - j) for j in range(n + 1)])
    mu = np.array([delta * j for j in range(n + 1)])
    tot = lam + mu
    with np.errstate(divide="ignore", invalid="ignore"):
        p_birth = np.where(tot > 0, lam / np.where(tot > 0, tot, 1.0), 0.0)
        inv_tot = np.where(tot > 0, 1.0 / np.where(tot > 0, tot, 1.0), 0.0)
    times = np.zeros(runs)
    deadline = time.monotonic() + time_budget_s
    completed = 0
    block = 256
    for r in range(runs):
        if r % 64 == 0 and time.monotonic() > deadline:
            break
        rng = np.random.Generator(
            np.random.Philox(np.random.SeedSequence(entropy=seed, spawn_key=(r,)))
        )
        t = 0.0
        s = start
        waits = rng.standard_exponential(block)
        coins = rng.random(block)
        i = 0
        while s:
            if i == block:
                waits = rng.standard_exponential(block)
                coins = rng.random(block)
                i = 0
            t += waits[i] * inv_tot[s]
            s += 1 if coins[i] < p_birth[s] else -1
            i += 1
        times[r] = t
        completed += 1
    done = times[:completed]
    mean = float(done.mean()) if completed else math.nan
    stderr = float(done.std(ddof=1) / math.sqrt(completed)) if completed > 1 else math.nan
    return GillespieResult(
        times=done,
        start_state=start,
        seed=seed,
        mean=mean,
        stderr=stderr,
        runs_requested=runs,
        runs_completed=completed,
        budget_exhausted=completed < runs,
        metadata=dict(RNG_METADATA),
    )


def survival_log_slope(times: np.ndarray, q_lo: float = 0.5, q_hi: float = 0.99) -> float:
    """Least-squares slope of log Pr[T > t] over the [q_lo, q_hi] sample tail."""
    srt = np.sort(np.asarray(times))
    m = len(srt)
    lo, hi = int(q_lo * m), int(q_hi * m)
    if hi - lo < 4:
        raise InvalidParameterError("too few tail points for a slope fit")
    ts = srt[lo:hi]
    surv = 1.0 - (np.arange(lo, hi) + 1) / m
    design = np.vstack([ts, np.ones_like(ts)]).T
    slope, _ = np.linalg.lstsq(design, np.log(surv), rcond=None)[0]
    return float(slope)


@dataclass(frozen=True)
class TransientFit:
    """Fitted exponential relaxation rate of s(t) towards the steady state."""

    rate: float
    reliable: bool
    points_used: int
    slope_drift: float


def transient_decay_fit(
    ladder: RateLadder,
    t_grid,
    ctx: PrecisionCtx | None = None,
    start: int | None = None,
    floor: float = 1e-12,
    drift_tol: float = 0.05,
) -> TransientFit:
    """Fit the tail slope of log ||s(t) - pi||_1 with s(t) from uniformization.

    s(t) = sum_k Poisson(Lambda t; k) s(0) S^k with S = I + Q/Lambda.  The fit
    uses the last half of the grid points whose residual stays above `floor`;
    the result is flagged unreliable when too few such points survive or when
    the slope still drifts between the two halves of the fit window (the grid
    then sits before the asymptotic decay regime).
    """
    del ctx  # double precision is ample for a 1% slope fit
    if ladder.reducible or ladder.is_subgenerator:
        raise InvalidParameterError("transient fit needs an irreducible ladder")
    n = ladder.n_states
    if n - 1 > DENSE_LIMIT:
        raise InvalidParameterError(f"transient fit is limited to N <= {DENSE_LIMIT}")
    t_grid = np.asarray([to_float(t) for t in t_grid])
    if len(t_grid) < 8 or np.any(np.diff(t_grid) <= 0):
        raise InvalidParameterError("t_grid must be increasing with >= 8 points")
    q_dense = np.array([[to_float(v) for v in row] for row in ladder.to_dense()])
    if ladder.mode != GENERATOR:
        q_dense = q_dense - np.eye(n)  # embed P as the generator P - I
    pi = np.array([to_float(v) for v in steady_state(ladder).pi])
    rate_out = -np.diag(q_dense)
    big_lambda = 1.05 * rate_out.max() + 1e-9
    stoch = np.eye(n) + q_dense / big_lambda

    s0 = np.zeros(n)
    s0[n - 1 if start is None else int(start)] = 1.0

    def state_at(t):
        mu_t = big_lambda * t
        if mu_t > 650:
            raise PrecisionExhaustedError("uniformization horizon too long for float64")
        w = math.exp(-mu_t)
        acc = w * s0
        v = s0
        wsum = w
        k = 0
        kmax = int(mu_t + 40 * math.sqrt(mu_t + 1) + 60)
        while k < kmax and wsum < 1 - 1e-16:
            k += 1
            v = v @ stoch
            w *= mu_t / k
            acc = acc + w * v
            wsum += w
        return acc

    resid = np.array([np.abs(state_at(t) - pi).sum() for t in t_grid])
    usable = resid > floor
    idx = np.nonzero(usable)[0]
    if len(idx) < 6:
        return TransientFit(rate=math.nan, reliable=False, points_used=int(len(idx)), slope_drift=math.inf)
    tail = idx[len(idx) // 2 :]

    def fit(sel):
        design = np.vstack([t_grid[sel], np.ones(len(sel))]).T
        slope, _ = np.linalg.lstsq(design, np.log(resid[sel]), rcond=None)[0]
        return slope

    mid = len(tail) // 2
    if mid < 3:
        return TransientFit(rate=math.nan, reliable=False, points_used=int(len(tail)), slope_drift=math.inf)
    slope_all = fit(tail)
    drift = abs(fit(tail[:mid]) - fit(tail[mid:])) / abs(slope_all)
    reliable = bool(drift <= drift_tol)
    return TransientFit(
        rate=float(slope_all),
        reliable=reliable,
        points_used=int(len(tail)),
        slope_drift=float(drift),
    )
