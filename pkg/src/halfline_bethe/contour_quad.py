"""Quadrature engines for the exact formulas.

Trapezoid rules on circles carry the 1/(2*pi*i) contour normalization and are
spectrally accurate for integrands analytic in an annulus around the contour;
truncated trapezoid rules on lines carry the 1/(2*pi) normalization and are
spectrally accurate for Gaussian-damped analytic integrands.  Tensor grids
refine all dimensions together, and every reduction runs in a fixed order, so
repeated runs are bit-for-bit reproducible.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError


@dataclass(frozen=True)
class CircleContour:
    center: complex
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", complex(self.center))
        object.__setattr__(self, "radius", float(self.radius))
        if not (np.isfinite(self.radius) and self.radius > 0):
            raise ValueError(f"radius must be positive and finite, got {self.radius}")


@dataclass(frozen=True)
class RadiiScheme:
    """Common center with strictly increasing radii R_1 < ... < R_N."""

    center: complex
    radii: tuple[float, ...]
    min_gap: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "center", complex(self.center))
        radii = tuple(float(r) for r in self.radii)
        object.__setattr__(self, "radii", radii)
        if any(not np.isfinite(r) or r <= 0 for r in radii):
            raise ValueError(f"radii must be positive and finite: {radii}")
        gap = 0.05 * radii[0] if self.min_gap is None else float(self.min_gap)
        object.__setattr__(self, "min_gap", gap)
        for lo, hi in zip(radii, radii[1:]):
            if hi - lo < gap:
                raise ValueError(
                    f"radii must increase by at least {gap}: {radii}"
                )

    @property
    def n(self) -> int:
        return len(self.radii)

    def contours(self) -> tuple[CircleContour, ...]:
        return tuple(CircleContour(self.center, r) for r in self.radii)

    def scaled(self, factor: float) -> "RadiiScheme":
        return RadiiScheme(self.center, tuple(factor * r for r in self.radii))

    def gaps_doubled(self) -> "RadiiScheme":
        r1 = self.radii[0]
        return RadiiScheme(self.center, tuple(r1 + 2 * (r - r1) for r in self.radii))


@dataclass(frozen=True)
class LineGrid:
    """Uniform grid on [-cutoff, cutoff]; cutoff/spacing must be an integer >= 8."""

    cutoff: float
    spacing: float

    def __post_init__(self):
        object.__setattr__(self, "cutoff", float(self.cutoff))
        object.__setattr__(self, "spacing", float(self.spacing))
        if not (self.cutoff > 0 and self.spacing > 0):
            raise ValueError("cutoff and spacing must be positive")
        ratio = self.cutoff / self.spacing
        if abs(ratio - round(ratio)) > 1e-9 or round(ratio) < 8:
            raise ValueError(
                f"cutoff/spacing must be an integer >= 8, got {ratio}"
            )


@dataclass(frozen=True)
class QuadOptions:
    initial_points: int = 16
    max_points: int = 4096
    tol: float = 1e-10

    def __post_init__(self):
        if self.initial_points < 8:
            raise ValueError("initial_points must be >= 8")
        if self.max_points < self.initial_points:
            raise ValueError("max_points must be >= initial_points")
        if not self.tol > 0:
            raise ValueError("tol must be positive")


def circle_nodes(contour: CircleContour, m: int):
    """Nodes and weights so that sum(w * f(nodes)) ~ (2*pi*i)^-1 * closed integral.

    Exact on Laurent monomials (xi - center)^n: gives 1 for n = -1 and 0 for
    every other n with n != -1 (mod m).
    """
    if m < 8:
        raise ValueError(f"need at least 8 nodes on a circle, got {m}")
    phase = np.exp(2j * np.pi * np.arange(m) / m)
    nodes = contour.center + contour.radius * phase
    weights = (contour.radius / m) * phase
    return nodes, weights


def line_nodes(grid: LineGrid):
    """Trapezoid nodes/weights so that sum(w * f(nodes)) ~ (2*pi)^-1 * line integral."""
    half = round(grid.cutoff / grid.spacing)
    nodes = grid.spacing * np.arange(-half, half + 1)
    weights = np.full(nodes.size, grid.spacing / (2.0 * np.pi))
    weights[0] *= 0.5
    weights[-1] *= 0.5
    return nodes, weights


class TensorGrid:
    """Per-dimension node builders refined together.

    Each builder maps a per-dimension resolution m to a (nodes, weights)
    pair; `nodes(m)` collects them for all dimensions.
    """

    def __init__(self, builders):
        self._builders = tuple(builders)
        if not self._builders:
            raise ValueError("need at least one dimension")

    @property
    def ndim(self) -> int:
        return len(self._builders)

    def nodes(self, m: int):
        pairs = [b(m) for b in self._builders]
        return [p[0] for p in pairs], [p[1] for p in pairs]

    @classmethod
    def from_circles(cls, contours) -> "TensorGrid":
        if isinstance(contours, RadiiScheme):
            contours = contours.contours()
        return cls(tuple(
            (lambda m, c=c: circle_nodes(c, m)) for c in contours
        ))

    @classmethod
    def from_line(cls, cutoff: float, ndim: int) -> "TensorGrid":
        def builder(m, k=float(cutoff)):
            if m % 2:
                raise ValueError("line resolution must be even")
            return line_nodes(LineGrid(k, 2.0 * k / m))

        return cls((builder,) * ndim)


def pointwise_integrand(f):
    """Adapt a pointwise integrand f(x1, ..., xN) to the tensor-grid interface."""

    def integrand(nodes, weights):
        grids = np.meshgrid(*nodes, indexing="ij")
        w = functools.reduce(np.multiply.outer, weights)
        return complex(np.sum(f(*grids) * w))

    return integrand


def adaptive_trace(level_eval, opts: QuadOptions | None = None):
    """Successive estimates [(m, value), ...], doubling m until stable.

    Stops once two consecutive estimates differ by less than opts.tol.  A
    rounding-floor plateau is also accepted: spectral refinement shrinks the
    successive differences at least geometrically, so two consecutive small
    differences (below 100*tol) that have stopped shrinking indicate the
    cancellation floor of double precision, not an unresolved integrand; the
    plateau size is then the honest error estimate.  Raises ConvergenceError
    (carrying the last two estimates) if the resolution cap is reached first.
    """
    opts = opts or QuadOptions()
    m = opts.initial_points
    trace: list[tuple[int, complex]] = []
    while m <= opts.max_points:
        trace.append((m, complex(level_eval(m))))
        if len(trace) >= 2:
            diff = abs(trace[-1][1] - trace[-2][1])
            if diff < opts.tol:
                return trace
            if len(trace) >= 3:
                prev = abs(trace[-2][1] - trace[-3][1])
                if diff < 100.0 * opts.tol and prev < 100.0 * opts.tol \
                        and diff > 0.3 * prev:
                    return trace
        m *= 2
    last = trace[-1][1]
    prev = trace[-2][1] if len(trace) >= 2 else None
    raise ConvergenceError(
        f"no convergence at max_points={opts.max_points}: "
        f"last estimates {prev} -> {last}",
        estimates=(prev, last),
    )


def adaptive_eval(integrand, scheme: TensorGrid, opts: QuadOptions | None = None):
    """Refine a tensor-grid quadrature until two levels agree within tol.

    Returns (value, error_estimate, points_per_dimension); the error estimate
    is the last successive difference (no extrapolation, by design).
    """
    opts = opts or QuadOptions()
    trace = adaptive_trace(lambda m: integrand(*scheme.nodes(m)), opts)
    (m, value), (_, prev) = trace[-1], trace[-2]
    return value, abs(value - prev), m
