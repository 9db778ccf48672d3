"""Independent ground truth for the exclusion process.

Two generators of reference values live here: a finite-window continuous-time
Markov chain solved by uniformization (a Poisson mixture of powers of a
stochastic matrix, with a rigorous truncation bound), and a kinetic Monte
Carlo simulator.  Neither shares any code with the contour-integral
evaluators they validate.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from . import _kernels
from .scattering import AsepParams

#: state-count guard for the generator build
MAX_STATES = 2_000_000


@dataclass(frozen=True)
class LatticeWindow:
    """Closed site interval [lo, hi]; half-line truncations use lo = 0."""

    lo: int
    hi: int

    def __post_init__(self):
        object.__setattr__(self, "lo", int(self.lo))
        object.__setattr__(self, "hi", int(self.hi))
        if self.hi <= self.lo:
            raise ValueError(f"window must satisfy hi > lo, got [{self.lo}, {self.hi}]")

    @property
    def size(self) -> int:
        return self.hi - self.lo + 1


@dataclass(frozen=True)
class McConfig:
    trials: int
    seed: int
    t: float

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")
        if self.t < 0:
            raise ValueError("t must be nonnegative")


@dataclass
class GeneratorMatrix:
    """Sparse rate matrix over ordered particle configurations in a window."""

    states: list[tuple[int, ...]]
    index: dict[tuple[int, ...], int]
    rates: sp.csr_matrix  # row sums are zero
    window: LatticeWindow
    halfline: bool


def build_generator(params: AsepParams, window: LatticeWindow, n: int,
                    halfline: bool) -> GeneratorMatrix:
    """Exclusion-process generator on ordered n-subsets of the window.

    A particle hops right at rate p when the target site is inside the window
    and unoccupied, and left at rate q under the same conditions; on the
    half-line a particle at site 0 additionally never hops left.
    """
    span = window.size
    if span - 1 < n:
        raise ValueError(f"window of {span} sites is too small for {n} particles")
    if span - 1 > 64 * n:
        raise ValueError(f"window span {span - 1} exceeds the 64*N guard")
    if math.comb(span, n) > MAX_STATES:
        raise ValueError(
            f"state count C({span},{n}) exceeds the {MAX_STATES} guard"
        )
    if halfline and window.lo != 0:
        raise ValueError("half-line windows must start at 0")

    states = [tuple(c) for c in itertools.combinations(range(window.lo, window.hi + 1), n)]
    index = {s: i for i, s in enumerate(states)}
    rows, cols, vals = [], [], []
    p, q = params.p, params.q
    for i, s in enumerate(states):
        out_rate = 0.0
        for k in range(n):
            site = s[k]
            if (k == n - 1 or s[k + 1] > site + 1) and site + 1 <= window.hi:
                target = s[:k] + (site + 1,) + s[k + 1:]
                rows.append(i)
                cols.append(index[target])
                vals.append(p)
                out_rate += p
            blocked_by_wall = halfline and site == 0
            if (not blocked_by_wall and site - 1 >= window.lo
                    and (k == 0 or s[k - 1] < site - 1)):
                target = s[:k] + (site - 1,) + s[k + 1:]
                rows.append(i)
                cols.append(index[target])
                vals.append(q)
                out_rate += q
        if out_rate:
            rows.append(i)
            cols.append(i)
            vals.append(-out_rate)
    m = len(states)
    rates = sp.csr_matrix((vals, (rows, cols)), shape=(m, m))
    return GeneratorMatrix(states, index, rates, window, halfline)


def _uniformized_distribution(gen: GeneratorMatrix, y: tuple[int, ...], t: float,
                              tail_tol: float) -> np.ndarray:
    """exp(Q t) applied to the point mass at y, via the Poisson mixture."""
    m = len(gen.states)
    v = np.zeros(m)
    v[gen.index[y]] = 1.0
    if t == 0.0:
        return v
    lam = float(-gen.rates.diagonal().min())
    if lam == 0.0:
        return v
    if lam * t > 700.0:
        raise ValueError(f"uniformization rate*t = {lam * t} too large")
    # distribution evolves as a row vector: v <- v P with P = I + Q/lam
    pt = (sp.identity(m, format="csr") + gen.rates / lam).T.tocsr()
    weight = math.exp(-lam * t)
    acc = weight * v
    covered = weight
    k = 0
    while covered < 1.0 - tail_tol:
        k += 1
        if k > 200_000:
            raise RuntimeError("Poisson series failed to terminate")
        v = pt @ v
        weight *= lam * t / k
        acc += weight * v
        covered += weight
    return acc


def _auto_window(y, x, t, n, halfline):
    margin = math.ceil(4.0 * math.sqrt(max(t, 1e-12))) + 4
    lo = 0 if halfline else min(min(y), min(x)) - margin
    hi = max(max(y), max(x)) + margin
    if hi - lo + 1 < n + 2:
        hi = lo + n + 1
    return LatticeWindow(lo, hi), margin


def ctmc_distribution(y, t: float, params: AsepParams, window: LatticeWindow,
                      tol: float = 1e-12, halfline: bool = True):
    """All transition probabilities out of y at time t, over window states."""
    y = tuple(int(v) for v in y)
    gen = build_generator(params, window, len(y), halfline)
    if y not in gen.index:
        raise ValueError(f"initial configuration {y} not inside window")
    # the covered-mass accumulator cannot resolve tails below ~1e-13
    dist = _uniformized_distribution(gen, y, float(t),
                                     tail_tol=max(0.01 * tol, 1e-13))
    return gen.states, dist


def ctmc_prob(y, x, t: float, params: AsepParams,
              window: LatticeWindow | None = None, tol: float = 1e-12,
              halfline: bool = True) -> float:
    """Transition probability from y to x at time t by uniformization.

    With window=None the window starts at a drift+diffusion envelope around
    the configurations and its margin doubles until the answer is stable
    within tol.
    """
    y = tuple(int(v) for v in y)
    x = tuple(int(v) for v in x)
    if len(x) != len(y):
        raise ValueError("configurations must have equal particle number")
    if t == 0.0:
        return 1.0 if x == y else 0.0
    if window is not None:
        states, dist = ctmc_distribution(y, t, params, window, tol, halfline)
        gen_index = {s: i for i, s in enumerate(states)}
        return float(dist[gen_index[x]]) if x in gen_index else 0.0

    window, margin = _auto_window(y, x, t, len(y), halfline)
    prev = None
    for _ in range(8):
        states, dist = ctmc_distribution(y, t, params, window, tol, halfline)
        gen_index = {s: i for i, s in enumerate(states)}
        cur = float(dist[gen_index[x]]) if x in gen_index else 0.0
        if prev is not None and abs(cur - prev) < tol:
            return cur
        prev = cur
        margin *= 2
        lo = 0 if halfline else min(min(y), min(x)) - margin
        hi = max(max(y), max(x)) + margin
        window = LatticeWindow(lo, hi)
    raise RuntimeError("window growth did not stabilize the CTMC probability")


def mc_estimate(y, x, cfg: McConfig, params: AsepParams,
                halfline: bool = True) -> tuple[float, float]:
    """Kinetic Monte Carlo estimate of the transition probability.

    Returns (hit frequency of x at time t, binomial standard error).  Trials
    use independent SplitMix64 substreams derived from cfg.seed, so identical
    seeds reproduce identical estimates.
    """
    y = np.asarray([int(v) for v in y], dtype=np.int64)
    x = np.asarray([int(v) for v in x], dtype=np.int64)
    if x.size != y.size:
        raise ValueError("configurations must have equal particle number")
    hits = _kernels.gillespie_hits(y, x, cfg.t, params.p, params.q,
                                   halfline, cfg.trials, cfg.seed)
    est = hits / cfg.trials
    se = math.sqrt(est * (1.0 - est) / cfg.trials)
    return est, se
