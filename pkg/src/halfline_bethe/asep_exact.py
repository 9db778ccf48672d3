"""Exact transition probabilities of the asymmetric exclusion process.

The half-line probability is a 1/N!-weighted sum over signed permutations of
tensor contour integrals, taken over a union of product contours whose circles
share the center 1/(2q) but carry pairwise distinct radii (one product contour
per assignment of radii to variables).  The full-line probability is the
ordinary permutation sum over a single large circle about zero.  Negative
coordinates and unordered tuples are supported by `evaluate_extended`, which
is what the boundary-condition and master-equation residual checks evaluate.

Every per-term integrand factorizes into per-dimension vectors coupled by
two-variable scattering matrices, so each term reduces to the tensor
contraction in `_kernels`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ._kernels import PAIR_ORDER, contract
from .contour_quad import (CircleContour, QuadOptions, RadiiScheme,
                           adaptive_trace, circle_nodes)
from .errors import ConvergenceError
from .scattering import AsepParams, eps_asep, r_factor, s_asep
from .signed_perm import SignedPermutation, enumerate_bn, enumerate_sn, inversions

MAX_N = 4


@dataclass(frozen=True)
class LatticeConfig:
    """Strictly increasing occupied sites."""

    sites: tuple[int, ...]

    def __post_init__(self):
        sites = tuple(int(v) for v in self.sites)
        object.__setattr__(self, "sites", sites)
        if len(sites) < 1:
            raise ValueError("need at least one particle")
        if any(b <= a for a, b in zip(sites, sites[1:])):
            raise ValueError(f"sites must strictly increase: {sites}")

    @property
    def n(self) -> int:
        return len(self.sites)


@dataclass(frozen=True)
class AsepEvalReport:
    value: float
    imag_residual: float
    error_estimate: float
    points_used: int
    term_count: int


def _as_config(c, halfline: bool) -> LatticeConfig:
    cfg = c if isinstance(c, LatticeConfig) else LatticeConfig(tuple(c))
    if halfline and cfg.sites[0] < 0:
        raise ValueError(f"half-line configurations need sites >= 0: {cfg.sites}")
    return cfg


def default_radii(params: AsepParams, n: int) -> RadiiScheme:
    """Reference contour scheme: generously large, linearly graded radii.

    The scale 4*max(1, 1/|q|, |1 - 1/2q|, |tau - 1/2q|) keeps the fixed poles
    of the wall and scattering factors (0, 1, tau) well inside every circle,
    and the 1 + a/(4N) grading keeps the radii pairwise distinct so no two
    variables can hit the mirrored singularity xi + xi' = 1/q on the contours.
    """
    if n < 1:
        raise ValueError("need n >= 1")
    params.require_formula_ok()
    center = 1.0 / (2.0 * params.q)
    rho = 4.0 * max(1.0, 1.0 / abs(params.q), abs(1.0 - center),
                    abs(params.tau - center))
    radii = tuple(rho * (1.0 + a / (4.0 * n)) for a in range(1, n + 1))
    return RadiiScheme(center, radii, min_gap=0.999 * rho / (4.0 * n))


def _pole_images_inside(params: AsepParams, radii, safety: float) -> bool:
    """Check that every contour image of the scattering-factor poles stays
    inside the smallest circle by the given safety factor."""
    p, q = params.p, params.q
    center = 1.0 / (2.0 * q)
    r_min = radii[0]
    fixed = max(abs(center), abs(1.0 - center), abs(params.tau - center))
    if fixed > safety * r_min:
        return False
    theta = np.linspace(0.0, 2.0 * np.pi, 720, endpoint=False)
    ring = np.exp(1j * theta)
    for r in np.linspace(radii[0], radii[-1], 7):
        xi = center + r * ring
        for img in (p / (1.0 - q * xi), p * xi / (xi - p)):
            if np.max(np.abs(img - center)) > safety * r_min:
                return False
    return True


def tuned_radii(params: AsepParams, n: int, *, ratio: float = 1.3,
                safety: float = 0.75) -> RadiiScheme:
    """Accuracy-tuned contour scheme used by the evaluators.

    Same deformation class as `default_radii` (fixed poles inside every
    circle, pole images of the scattering denominators inside the smallest
    circle, strictly ordered radii so the mirrored singularities never touch
    a contour), but as small as those constraints allow.  Small radii keep
    the exp(eps(xi) t) factor's dynamic range low, which is what limits the
    achievable absolute accuracy in double precision at larger times.
    """
    if n < 1:
        raise ValueError("need n >= 1")
    params.require_formula_ok()
    center = 1.0 / (2.0 * params.q)
    base = 1.3 * max(abs(center), abs(1.0 - center), abs(params.tau - center))
    for _ in range(80):
        radii = tuple(base * ratio ** a for a in range(n))
        if _pole_images_inside(params, radii, safety):
            return RadiiScheme(center, radii)
        base *= 1.12
    raise RuntimeError(f"could not tune contour radii for {params}")


# ---------------------------------------------------------------------------
# signed-permutation metadata (cached per N)
# ---------------------------------------------------------------------------

@lru_cache(maxsize=32)
def _term_meta(n: int, halfline: bool):
    """Per-sigma data: dimension -> (position, sign), negative dims, and
    inversions grouped by dimension pair with orientation flags."""
    sigmas = enumerate_bn(n) if halfline else enumerate_sn(n)
    pair_index = {pair: k for k, pair in enumerate(PAIR_ORDER[n])}
    meta = []
    for sigma in sigmas:
        dim_pos = [0] * n   # dimension d (0-based) -> position index
        dim_sign = [1] * n  # dimension d -> sign of the entry with magnitude d+1
        for pos, v in enumerate(sigma.values):
            dim_pos[abs(v) - 1] = pos
            dim_sign[abs(v) - 1] = 1 if v > 0 else -1
        invs = []
        for inv in inversions(sigma):
            da, db = abs(inv.first) - 1, abs(inv.second) - 1
            if da < db:
                invs.append((pair_index[(da, db)], inv.first, inv.second, False))
            else:
                invs.append((pair_index[(db, da)], inv.first, inv.second, True))
        meta.append((sigma, tuple(dim_pos), tuple(dim_sign), tuple(invs)))
    return meta


class _LevelTables:
    """Per-quadrature-level factor tables for one product contour."""

    def __init__(self, params, nodes, weights, y, t, z_exponents):
        self.params = params
        self.n = len(nodes)
        self.pos_vals = [np.ascontiguousarray(nd) for nd in nodes]
        self.neg_vals = [params.tau / nd for nd in self.pos_vals]
        self.base = [
            w * nd ** (-int(yi) - 1) * np.exp(eps_asep(nd, params) * t)
            for w, nd, yi in zip(weights, self.pos_vals, y)
        ]
        # power tables: (sign, dimension, position) -> node_value ** z[position]
        self.powers = {}
        for d in range(self.n):
            for s, vals in ((1, self.pos_vals[d]), (-1, self.neg_vals[d])):
                for i, zi in enumerate(z_exponents):
                    self.powers[(s, d, i)] = vals ** int(zi)
        self.r_neg = [r_factor(v, params) for v in self.neg_vals]
        self._smats = {}
        self._ones = None

    @property
    def ones(self) -> np.ndarray:
        if self._ones is None:
            self._ones = np.ones((self.pos_vals[0].size,) * 2, dtype=complex)
        return self._ones

    def _signed(self, a):
        vals = self.pos_vals if a > 0 else self.neg_vals
        return vals[abs(a) - 1]

    def smat(self, a: int, b: int) -> np.ndarray:
        """Matrix S(xi_a[m1], xi_b[m2]) over the node grids of |a| and |b|."""
        key = (a, b)
        if key not in self._smats:
            va = self._signed(a)[:, None]
            vb = self._signed(b)[None, :]
            self._smats[key] = s_asep(va, vb, self.params)
        return self._smats[key]

    def term(self, dim_pos, dim_sign, invs, extra=None) -> complex:
        vectors = []
        for d in range(self.n):
            s = dim_sign[d]
            v = self.base[d] * self.powers[(s, d, dim_pos[d])]
            if s < 0:
                v = v * self.r_neg[d]
            if extra is not None and extra[d] is not None:
                v = v * extra[d]
            vectors.append(v)
        n_pairs = len(PAIR_ORDER[self.n])
        mats = [None] * n_pairs
        for k, a, b, transpose in invs:
            m = self.smat(a, b)
            if transpose:
                m = m.T
            mats[k] = m if mats[k] is None else mats[k] * m
        mats = [self.ones if m is None else np.ascontiguousarray(m) for m in mats]
        return contract(vectors, mats)


def _halfline_sum(y, z, t, params, radii, m, insert_energy=False) -> complex:
    """One quadrature level of the half-line sum at per-dimension resolution m."""
    n = len(y)
    meta = _term_meta(n, True)
    contours = radii.contours()
    total = 0.0 + 0.0j
    for mu in itertools.permutations(range(n)):
        pairs = [circle_nodes(contours[mu[d]], m) for d in range(n)]
        tables = _LevelTables(params, [p[0] for p in pairs],
                              [p[1] for p in pairs], y, t, z)
        energies = [eps_asep(v, params) for v in tables.pos_vals] if insert_energy else None
        for sigma, dim_pos, dim_sign, invs in meta:
            if insert_energy:
                for d in range(n):
                    extra = [None] * n
                    extra[d] = energies[d]
                    total += tables.term(dim_pos, dim_sign, invs, extra)
            else:
                total += tables.term(dim_pos, dim_sign, invs)
    return total / math.factorial(n)


def _fullline_sum(y, z, t, params, radius, m, insert_energy=False) -> complex:
    n = len(y)
    meta = _term_meta(n, False)
    nodes, weights = circle_nodes(CircleContour(0.0, radius), m)
    tables = _LevelTables(params, [nodes] * n, [weights] * n, y, t, z)
    energies = [eps_asep(v, params) for v in tables.pos_vals] if insert_energy else None
    total = 0.0 + 0.0j
    for sigma, dim_pos, dim_sign, invs in meta:
        if insert_energy:
            for d in range(n):
                extra = [None] * n
                extra[d] = energies[d]
                total += tables.term(dim_pos, dim_sign, invs, extra)
        else:
            total += tables.term(dim_pos, dim_sign, invs)
    return total


def _default_opts(n: int, opts: QuadOptions | None) -> QuadOptions:
    if opts is not None:
        return opts
    if n >= 4:
        # documented reduced budget at N = 4
        return QuadOptions(initial_points=16, max_points=96, tol=1e-6)
    return QuadOptions()


def _check_common(y_cfg: LatticeConfig, n_other: int, t: float, params: AsepParams):
    params.require_formula_ok()
    if y_cfg.n != n_other:
        raise ValueError("X and Y must hold the same number of particles")
    if y_cfg.n > MAX_N:
        raise ValueError(f"evaluators support N <= {MAX_N}")
    if t < 0:
        raise ValueError("t must be nonnegative")


def _adaptive(level_eval, opts: QuadOptions):
    trace = adaptive_trace(level_eval, opts)
    (m, value), (_, prev) = trace[-1], trace[-2]
    return value, abs(value - prev), m


def _report(raw: complex, err: float, m: int, terms: int, opts: QuadOptions) -> AsepEvalReport:
    imag = abs(raw.imag)
    if imag > 100.0 * max(opts.tol, err):
        raise ConvergenceError(
            f"imaginary residual {imag} exceeds 100*tol; quadrature inconsistent",
            estimates=(raw, raw),
        )
    return AsepEvalReport(float(raw.real), imag, err, m, terms)


def _orientation_cost(y, x, radii: RadiiScheme, params: AsepParams) -> float:
    """Log of the estimated integrand magnitude for the (y, x) orientation.

    Positive position exponents see |xi| up to R_N + |center|, the fixed
    negative initial-site exponents see |xi| down to R_1 - |center|; the
    double-precision cancellation floor scales with this magnitude.
    """
    hi = math.log(radii.radii[-1] + abs(radii.center))
    lo = math.log(radii.radii[0] - abs(radii.center))
    return sum(max(xi, 0) * hi for xi in x) - sum((yi + 1) * lo for yi in y)


def prob_halfline(Y, X, t: float, params: AsepParams,
                  opts: QuadOptions | None = None,
                  radii: RadiiScheme | None = None) -> AsepEvalReport:
    """Transition probability Y -> X at time t for the half-line process.

    Both configurations live on the nonnegative integers.  The contour scheme
    defaults to `tuned_radii`; pass `radii` to override (robustness tests
    scale the defaults and check invariance).

    The process is reversible with respect to tau^(sum of sites), so
    P_Y(X;t) = tau^(sum X - sum Y) * P_X(Y;t) exactly; the evaluator uses
    whichever orientation keeps the integrand magnitude (and with it the
    double-precision cancellation floor) smaller.  Deep-tail probabilities
    (large sites reached against the drift) stay accurate this way.
    """
    ycfg = _as_config(Y, halfline=True)
    xcfg = _as_config(X, halfline=True)
    _check_common(ycfg, xcfg.n, t, params)
    opts = _default_opts(ycfg.n, opts)
    radii = radii if radii is not None else tuned_radii(params, ycfg.n)

    delta = sum(xcfg.sites) - sum(ycfg.sites)
    log_tau = math.log(params.tau)
    cost_direct = _orientation_cost(ycfg.sites, xcfg.sites, radii, params)
    cost_swapped = delta * log_tau + _orientation_cost(xcfg.sites, ycfg.sites,
                                                       radii, params)
    if cost_swapped < cost_direct and abs(delta * log_tau) < 600.0:
        src, dst, prefactor = xcfg, ycfg, params.tau ** delta
    else:
        src, dst, prefactor = ycfg, xcfg, 1.0

    value, err, m = _adaptive(
        lambda mm: _halfline_sum(src.sites, dst.sites, t, params, radii, mm), opts)
    terms = math.factorial(ycfg.n) * len(_term_meta(ycfg.n, True))
    return _report(prefactor * value, prefactor * err, m, terms, opts)


def prob_fullline(Y, X, t: float, params: AsepParams,
                  opts: QuadOptions | None = None,
                  radius: float | None = None) -> AsepEvalReport:
    """Transition probability for the process on all of Z (permutation sum
    over a single large circle about zero)."""
    ycfg = _as_config(Y, halfline=False)
    xcfg = _as_config(X, halfline=False)
    _check_common(ycfg, xcfg.n, t, params)
    opts = _default_opts(ycfg.n, opts)
    radius = radius if radius is not None else max(2.0, 2.0 / abs(params.q))
    value, err, m = _adaptive(
        lambda mm: _fullline_sum(ycfg.sites, xcfg.sites, t, params, radius, mm), opts)
    terms = len(_term_meta(ycfg.n, False))
    return _report(value, err, m, terms, opts)


def prob_n1_closed(y: int, x: int, t: float, params: AsepParams,
                   opts: QuadOptions | None = None,
                   radius: float | None = None) -> AsepEvalReport:
    """Single-particle half-line probability from the closed-form integrand
    xi^(x-y-1) - ((1 - tau/xi)/(1 - xi)) tau^x xi^(-x-y-1), times exp(eps t).

    Kept independent of the signed-permutation machinery so the two can
    cross-check each other.
    """
    params.require_formula_ok()
    if y < 0 or x < 0:
        raise ValueError("half-line sites must be nonnegative")
    if t < 0:
        raise ValueError("t must be nonnegative")
    opts = opts or QuadOptions()
    tau = params.tau
    r = radius if radius is not None else tuned_radii(params, 1).radii[0]
    contour = CircleContour(1.0 / (2.0 * params.q), r)

    def level(m):
        nodes, weights = circle_nodes(contour, m)
        bracket = nodes ** (x - y - 1) - ((1.0 - tau / nodes) / (1.0 - nodes)
                                          ) * tau ** x * nodes ** (-x - y - 1)
        return np.sum(weights * bracket * np.exp(eps_asep(nodes, params) * t))

    value, err, m = _adaptive(level, opts)
    return _report(value, err, m, 2, opts)


def evaluate_extended(Y, Z, t: float, params: AsepParams,
                      opts: QuadOptions | None = None,
                      radii: RadiiScheme | None = None) -> complex:
    """The half-line integral sum with X replaced by an arbitrary integer
    tuple Z (no ordering or nonnegativity constraints).

    This is the analytic extension whose boundary identities make the
    physical master equation hold; on physical ordered tuples it coincides
    with prob_halfline.
    """
    ycfg = _as_config(Y, halfline=True)
    z = tuple(int(v) for v in Z)
    _check_common(ycfg, len(z), t, params)
    opts = _default_opts(ycfg.n, opts)
    radii = radii if radii is not None else tuned_radii(params, ycfg.n)
    value, _, _ = _adaptive(
        lambda mm: _halfline_sum(ycfg.sites, z, t, params, radii, mm), opts)
    return complex(value)


def master_equation_residual(Y, X, t: float, params: AsepParams,
                             opts: QuadOptions | None = None) -> float:
    """|du/dt - (master-equation right side)| at configuration X.

    The time derivative is exact (energy factor inserted into the integrand);
    the right side is assembled from `evaluate_extended` with the wall rule:
    the inflow-from-the-left and outflow-to-the-left terms of the leftmost
    particle carry the factor (1 - delta(x_1)).
    """
    ycfg = _as_config(Y, halfline=True)
    xcfg = _as_config(X, halfline=True)
    _check_common(ycfg, xcfg.n, t, params)
    if ycfg.n > 3:
        raise ValueError("master-equation residual supports N <= 3")
    if t <= 0:
        raise ValueError("residual check needs t > 0")
    opts = _default_opts(ycfg.n, opts)
    radii = tuned_radii(params, ycfg.n)
    lhs, _, _ = _adaptive(
        lambda mm: _halfline_sum(ycfg.sites, xcfg.sites, t, params, radii, mm,
                                 insert_energy=True), opts)

    def u(zt):
        return evaluate_extended(ycfg, zt, t, params, opts, radii)

    x = xcfg.sites
    n = xcfg.n
    p, q = params.p, params.q
    rhs = 0.0 + 0.0j
    for i in range(n):
        gap_left = 1.0 if (i == 0 or x[i] - x[i - 1] > 1) else 0.0
        gap_right = 1.0 if (i == n - 1 or x[i + 1] - x[i] > 1) else 0.0
        wall = (1.0 if x[0] != 0 else 0.0) if i == 0 else 1.0
        if gap_left * wall:
            rhs += p * u(x[:i] + (x[i] - 1,) + x[i + 1:]) * gap_left * wall
        if gap_right:
            rhs += q * u(x[:i] + (x[i] + 1,) + x[i + 1:]) * gap_right
        rhs -= p * u(x) * gap_right
        rhs -= q * u(x) * gap_left * wall
    return abs(lhs - rhs)


def total_mass(Y, t: float, params: AsepParams, window: int,
               opts: QuadOptions | None = None) -> float:
    """Sum of prob_halfline over every ordered configuration inside {0..window}.

    Converges to 1 as the window grows (probability conservation).
    """
    ycfg = _as_config(Y, halfline=True)
    if ycfg.n > 3:
        raise ValueError("total_mass supports N <= 3")
    total = 0.0
    for sites in itertools.combinations(range(window + 1), ycfg.n):
        total += prob_halfline(ycfg, sites, t, params, opts).value
    return total
