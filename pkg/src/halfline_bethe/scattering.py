"""Scattering factors, energies, reflected variables, and boundary amplitudes.

Spectral variables are plain complex arrays of shape (..., N): k_1..k_N for
the delta-interacting Bose gas, xi_1..xi_N for the asymmetric exclusion
process.  Leading axes broadcast, so identity suites can evaluate hundreds of
random draws in one call.  A negative index a addresses the reflected
variable: k_{-a} = -k_a and xi_{-a} = tau/xi_a with tau = p/q.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SingularityError
from .signed_perm import SignedPermutation, inversions, neg_count

#: denominators below this magnitude raise SingularityError
DENOM_FLOOR = 1e-300


@dataclass(frozen=True)
class BoseParams:
    """Repulsive contact-interaction strength; c = 0 and very large c are
    allowed for limit tests."""

    c: float

    def __post_init__(self):
        object.__setattr__(self, "c", float(self.c))
        if not np.isfinite(self.c) or self.c < 0:
            raise ValueError(f"coupling must be finite and >= 0, got {self.c}")


@dataclass(frozen=True)
class AsepParams:
    """Hop probabilities of the exclusion process: right p, left q = 1 - p.

    q must be nonzero.  p = 0 is accepted at construction (the jump-chain
    oracles can simulate it) but the exact integral formulas require p != 0
    because the reflection substitution xi -> tau/xi degenerates at tau = 0.
    """

    p: float
    q: float

    def __post_init__(self):
        object.__setattr__(self, "p", float(self.p))
        object.__setattr__(self, "q", float(self.q))
        if not (np.isfinite(self.p) and np.isfinite(self.q)):
            raise ValueError("p, q must be finite")
        if abs(self.p + self.q - 1.0) > 1e-14:
            raise ValueError(f"p + q must equal 1, got {self.p + self.q}")
        if self.q == 0.0:
            raise ValueError("q must be nonzero")

    @classmethod
    def from_p(cls, p: float) -> "AsepParams":
        return cls(float(p), 1.0 - float(p))

    @property
    def tau(self) -> float:
        return self.p / self.q

    def require_formula_ok(self):
        if self.p == 0.0:
            raise ValueError(
                "p = 0 is outside the exact-formula domain (tau degenerates); "
                "use the oracle modules for p = 0 dynamics"
            )


def _check_index(a: int, n: int):
    if a == 0:
        raise ValueError("variable index 0 is not allowed")
    if abs(a) > n:
        raise ValueError(f"variable index {a} out of range for N={n}")


def k_signed(a: int, kvals) -> np.ndarray | complex:
    """k_a for a > 0, -k_{-a} for a < 0."""
    kvals = np.asarray(kvals, dtype=complex)
    _check_index(a, kvals.shape[-1])
    out = kvals[..., abs(a) - 1] if a > 0 else -kvals[..., -a - 1]
    return complex(out) if out.ndim == 0 else out


def xi_signed(a: int, xivals, params: AsepParams) -> np.ndarray | complex:
    """xi_a for a > 0, tau/xi_{-a} for a < 0."""
    xivals = np.asarray(xivals, dtype=complex)
    _check_index(a, xivals.shape[-1])
    base = xivals[..., abs(a) - 1]
    if a < 0:
        if np.any(np.abs(base) < DENOM_FLOOR):
            raise SingularityError(f"xi_{-a} is zero; cannot reflect index {a}")
        base = params.tau / base
    return complex(base) if base.ndim == 0 else base


def s_bose(k, params: BoseParams) -> np.ndarray | complex:
    """Two-particle factor -(c - ik)/(c + ik); unimodular for real k."""
    k = np.asarray(k, dtype=complex)
    den = params.c + 1j * k
    if np.any(np.abs(den) < DENOM_FLOOR):
        raise SingularityError(f"s_bose pole: |c + ik| < {DENOM_FLOOR}")
    out = -(params.c - 1j * k) / den
    return complex(out) if out.ndim == 0 else out


def eps_bose(k) -> np.ndarray | complex:
    """Single-particle energy k^2."""
    k = np.asarray(k, dtype=complex)
    out = k * k
    return complex(out) if out.ndim == 0 else out


def s_asep(x, y, params: AsepParams) -> np.ndarray | complex:
    """Two-particle factor -(p + q*x*y - x)/(p + q*x*y - y)."""
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    common = params.p + params.q * x * y
    den = common - y
    if np.any(np.abs(den) < DENOM_FLOOR):
        raise SingularityError(f"s_asep pole: |p + q*x*y - y| < {DENOM_FLOOR}")
    out = -(common - x) / den
    return complex(out) if out.ndim == 0 else out


def eps_asep(x, params: AsepParams) -> np.ndarray | complex:
    """Jump-rate symbol p/xi + q*xi - 1; invariant under xi -> tau/xi."""
    x = np.asarray(x, dtype=complex)
    if np.any(np.abs(x) < DENOM_FLOOR):
        raise SingularityError("eps_asep requires xi != 0")
    out = params.p / x + params.q * x - 1.0
    return complex(out) if out.ndim == 0 else out


def r_factor(x, params: AsepParams) -> np.ndarray | complex:
    """Wall amplitude -(1 - xi)/(1 - tau/xi), attached to reflected entries."""
    x = np.asarray(x, dtype=complex)
    if np.any(np.abs(x) < DENOM_FLOOR):
        raise SingularityError("r_factor requires xi != 0")
    den = 1.0 - params.tau / x
    if np.any(np.abs(den) < DENOM_FLOOR):
        raise SingularityError("r_factor pole at xi = tau")
    out = -(1.0 - x) / den
    return complex(out) if out.ndim == 0 else out


def s_product(sigma: SignedPermutation, vars, params) -> np.ndarray | complex:
    """Product of scattering factors over the inversions of sigma.

    Bose: prod S(k_a - k_b); exclusion process: prod S(xi_a, xi_b), with
    negative indices resolved through the reflection substitutions.
    """
    vars = np.asarray(vars, dtype=complex)
    if vars.shape[-1] != sigma.n:
        raise ValueError(f"vars last axis {vars.shape[-1]} != N={sigma.n}")
    bose = isinstance(params, BoseParams)
    out = np.ones(vars.shape[:-1], dtype=complex)
    for inv in inversions(sigma):
        try:
            if bose:
                f = s_bose(k_signed(inv.first, vars) - k_signed(inv.second, vars), params)
            else:
                f = s_asep(
                    xi_signed(inv.first, vars, params),
                    xi_signed(inv.second, vars, params),
                    params,
                )
        except SingularityError as exc:
            raise SingularityError(f"inversion {tuple(inv)}: {exc}") from exc
        out = out * f
    return complex(out) if out.ndim == 0 else out


def amplitude_bose(sigma: SignedPermutation, kvals, params: BoseParams):
    """(-1)^(#negative entries) times the scattering product."""
    return (-1.0) ** neg_count(sigma) * s_product(sigma, kvals, params)


def amplitude_asep(sigma: SignedPermutation, xivals, params: AsepParams):
    """Wall factors r(xi_{sigma(i)}) over negative entries times the
    scattering product."""
    params.require_formula_ok()
    xivals = np.asarray(xivals, dtype=complex)
    out = s_product(sigma, xivals, params)
    for v in sigma.values:
        if v < 0:
            out = out * r_factor(xi_signed(v, xivals, params), params)
    return complex(out) if np.ndim(out) == 0 else out
