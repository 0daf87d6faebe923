"""Sampled curves, derivative estimation, and L2-of-derivative semi-metrics.

Curves are functions sampled on a shared strictly increasing grid. Distances
between curves are computed as the square root of the trapezoid-quadrature
integral of the squared difference of (optionally presmoothed) derivatives.
Semi-metrics with derivative order >= 1 assign distance 0 to curves differing
by a constant; that is intentional, not a defect.
"""

from dataclasses import dataclass

import numpy as np

from .errors import GridMismatch, GridTooShort, ValidationError


@dataclass(frozen=True, eq=False)
class SamplingGrid:
    """Ordered abscissae shared by a family of curves.

    Points must be finite, strictly increasing, and at least two.
    """

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 1:
            raise ValidationError("grid points must be one-dimensional")
        if pts.size < 2:
            raise GridTooShort(f"grid needs at least 2 points, got {pts.size}")
        if not np.all(np.isfinite(pts)):
            raise ValidationError("grid points must all be finite")
        if not np.all(np.diff(pts) > 0):
            raise ValidationError("grid points must be strictly increasing")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return self.points.size

    @property
    def span(self) -> tuple[float, float]:
        return float(self.points[0]), float(self.points[-1])

    def trapezoid_weights(self) -> np.ndarray:
        """Quadrature weights w with sum(w * f) == trapezoid integral of f."""
        pts = self.points
        w = np.empty_like(pts)
        w[0] = (pts[1] - pts[0]) / 2.0
        w[-1] = (pts[-1] - pts[-2]) / 2.0
        w[1:-1] = (pts[2:] - pts[:-2]) / 2.0
        return w

    def matches(self, other: "SamplingGrid") -> bool:
        return self is other or np.array_equal(self.points, other.points)


@dataclass(frozen=True, eq=False)
class Curve:
    """A single sampled curve: one value per grid point, all finite."""

    grid: SamplingGrid
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 1 or vals.size != len(self.grid):
            raise ValidationError(
                f"curve has {vals.size} values for a {len(self.grid)}-point grid"
            )
        if not np.all(np.isfinite(vals)):
            raise ValidationError("curve values must all be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)


@dataclass(frozen=True)
class SemiMetricSpec:
    """Recipe turning two curves into a scalar distance.

    Applies optional centered moving-average presmoothing, differentiates
    ``derivative_order`` times, and integrates the squared difference with
    the trapezoid rule. ``derivative_order=0`` is the plain L2 distance.
    """

    derivative_order: int = 0
    quadrature: str = "trapezoid"
    presmoothing_window: int | None = None

    def __post_init__(self):
        if self.derivative_order not in (0, 1, 2):
            raise ValidationError("derivative_order must be 0, 1, or 2")
        if self.quadrature != "trapezoid":
            raise ValidationError(f"unsupported quadrature: {self.quadrature!r}")
        w = self.presmoothing_window
        if w is not None and (w < 3 or w % 2 == 0):
            raise ValidationError("presmoothing window must be an odd integer >= 3")

    def min_grid_length(self) -> int:
        return max(2, 2 * self.derivative_order + 1)


@dataclass(frozen=True, eq=False)
class FunctionalSample:
    """Paired (curve, response) observations on a common grid."""

    grid: SamplingGrid
    curves: tuple[Curve, ...]
    responses: np.ndarray

    def __post_init__(self):
        curves = tuple(self.curves)
        resp = np.asarray(self.responses, dtype=float)
        if len(curves) == 0:
            raise ValidationError("sample must contain at least one curve")
        if resp.ndim != 1 or resp.size != len(curves):
            raise ValidationError(
                f"{len(curves)} curves but {resp.size} responses"
            )
        if not np.all(np.isfinite(resp)):
            raise ValidationError("responses must all be finite")
        for i, c in enumerate(curves):
            if not c.grid.matches(self.grid):
                raise GridMismatch(f"curve {i} is not on the sample grid")
        resp.setflags(write=False)
        object.__setattr__(self, "curves", curves)
        object.__setattr__(self, "responses", resp)

    def __len__(self) -> int:
        return len(self.curves)

    @classmethod
    def from_matrix(cls, grid: SamplingGrid, values: np.ndarray,
                    responses: np.ndarray) -> "FunctionalSample":
        values = np.asarray(values, dtype=float)
        curves = tuple(Curve(grid, row) for row in values)
        return cls(grid, curves, responses)

    def values_matrix(self) -> np.ndarray:
        return np.vstack([c.values for c in self.curves])


def _moving_average(values: np.ndarray, window: int) -> np.ndarray:
    """Centered moving average; windows shrink symmetrically at the edges."""
    half = window // 2
    n = values.size
    out = np.empty_like(values)
    for i in range(n):
        j = min(i, half, n - 1 - i)
        out[i] = values[i - j:i + j + 1].mean()
    return out


def differentiate(curve: Curve, order: int) -> Curve:
    """Finite-difference derivative of a sampled curve.

    Interior points use second-order central differences on the (possibly
    non-uniform) grid; endpoints use one-sided second-order stencils. Order 2
    is the order-1 stencil applied twice. Exact for polynomials of degree <= 2.

    Raises:
        GridTooShort: if the grid has fewer than ``2 * order + 1`` points.
    """
    if order not in (1, 2):
        raise ValidationError("derivative order must be 1 or 2")
    needed = 2 * order + 1
    if len(curve.grid) < needed:
        raise GridTooShort(
            f"order-{order} derivative needs >= {needed} grid points, "
            f"got {len(curve.grid)}"
        )
    deriv = _differentiate_values(curve.values, curve.grid.points, order)
    return Curve(curve.grid, deriv)


def _differentiate_values(values: np.ndarray, points: np.ndarray,
                          order: int) -> np.ndarray:
    deriv = np.gradient(values, points, edge_order=2)
    if order == 2:
        deriv = np.gradient(deriv, points, edge_order=2)
    return deriv


def _transform_values(values: np.ndarray, grid: SamplingGrid,
                      spec: SemiMetricSpec) -> np.ndarray:
    """Presmooth then differentiate, per the semi-metric recipe."""
    if len(grid) < spec.min_grid_length():
        raise GridTooShort(
            f"semi-metric with derivative order {spec.derivative_order} needs "
            f">= {spec.min_grid_length()} grid points, got {len(grid)}"
        )
    out = values
    if spec.presmoothing_window is not None:
        out = _moving_average(out, spec.presmoothing_window)
    if spec.derivative_order > 0:
        out = _differentiate_values(out, grid.points, spec.derivative_order)
    return out


def _weighted_sq_norm(weights: np.ndarray, diff: np.ndarray) -> float:
    return float(np.dot(weights, diff * diff))


def semi_metric_distance(a: Curve, b: Curve, spec: SemiMetricSpec) -> float:
    """L2-type distance between two curves on a shared grid.

    Returns sqrt of the trapezoid integral of the squared difference of the
    transformed curves. Symmetric, nonnegative, and exactly zero when the
    curves are identical.

    Raises:
        GridMismatch: if the curves live on different grids.
    """
    if not a.grid.matches(b.grid):
        raise GridMismatch("curves are on different grids")
    ta = _transform_values(a.values, a.grid, spec)
    tb = _transform_values(b.values, b.grid, spec)
    w = a.grid.trapezoid_weights()
    return float(np.sqrt(_weighted_sq_norm(w, ta - tb)))


def pairwise_distances(sample: FunctionalSample, query: Curve,
                       spec: SemiMetricSpec) -> np.ndarray:
    """Distances from every sample curve to the query, in sample order.

    Element i equals ``semi_metric_distance(sample.curves[i], query, spec)``.
    """
    if not query.grid.matches(sample.grid):
        raise GridMismatch("query is not on the sample grid")
    tq = _transform_values(query.values, sample.grid, spec)
    w = sample.grid.trapezoid_weights()
    out = np.empty(len(sample))
    for i, c in enumerate(sample.curves):
        tc = _transform_values(c.values, sample.grid, spec)
        out[i] = np.sqrt(_weighted_sq_norm(w, tc - tq))
    return out


def transformed_matrix(sample: FunctionalSample,
                       spec: SemiMetricSpec) -> np.ndarray:
    """Stack of transformed curve values; one row per sample curve."""
    return np.vstack([
        _transform_values(c.values, sample.grid, spec) for c in sample.curves
    ])


def distance_matrix(rows: np.ndarray, cols: np.ndarray,
                    weights: np.ndarray) -> np.ndarray:
    """Distances between two stacks of already-transformed curves.

    ``out[i, k]`` is the weighted L2 distance between ``rows[i]`` and
    ``cols[k]``. Identical rows give exactly zero.
    """
    diff = rows[:, None, :] - cols[None, :, :]
    return np.sqrt(np.einsum("ikj,j->ik", diff * diff, weights))
