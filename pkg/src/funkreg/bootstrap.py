"""Wild bootstrap for bandwidth selection with curve predictors.

The resampling scheme: fit in-sample residuals at a candidate bandwidth h,
multiply each by a two-point random sign/scale law matching its first three
moments (0, residual^2, residual^3), rebuild responses around an
oversmoothed pilot fit, re-estimate at h, and score the squared discrepancy
against the pilot value at the query. The bandwidth minimizing the average
over replications (and, optionally, over a test set of queries) is selected.

Randomness is counter-based: replication b of a run seeded with s draws its
uniforms from a Philox stream keyed by (s, b), indexed by each point's key
(its original sample index by default). Results are therefore bit-stable
and independent of evaluation order.
"""

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .curves import (
    Curve,
    FunctionalSample,
    SemiMetricSpec,
    distance_matrix,
    transformed_matrix,
    _transform_values,
)
from .errors import (
    DegeneratePilot,
    EmptyGrid,
    EmptyNeighborhood,
    ValidationError,
)
from .estimator import knn_bandwidths, nadaraya_watson
from .kernels import KernelSpec, eval_kernel_array

_SQRT5 = math.sqrt(5.0)
#: Multipliers of the two-point golden-section law and their probabilities.
MULTIPLIER_LOW = (1.0 - _SQRT5) / 2.0
MULTIPLIER_HIGH = (1.0 + _SQRT5) / 2.0
P_LOW = (5.0 + _SQRT5) / 10.0
P_HIGH = (5.0 - _SQRT5) / 10.0


@dataclass(frozen=True)
class WildResidualLaw:
    """Two-point resampling law for one residual.

    The law puts mass p_low on atom_low and p_high on atom_high, chosen so
    that its first three moments are 0, residual^2, and residual^3.
    """

    atom_low: float
    atom_high: float
    p_low: float
    p_high: float

    @classmethod
    def from_residual(cls, residual: float) -> "WildResidualLaw":
        return cls(
            atom_low=residual * MULTIPLIER_LOW,
            atom_high=residual * MULTIPLIER_HIGH,
            p_low=P_LOW,
            p_high=P_HIGH,
        )

    def moments(self) -> tuple[float, float, float]:
        """First three raw moments (for diagnostics and tests)."""
        m1 = self.p_low * self.atom_low + self.p_high * self.atom_high
        m2 = self.p_low * self.atom_low ** 2 + self.p_high * self.atom_high ** 2
        m3 = self.p_low * self.atom_low ** 3 + self.p_high * self.atom_high ** 3
        return m1, m2, m3


def draw_wild_residual(law: WildResidualLaw, uniform_draw: float) -> float:
    """Deterministic inverse-CDF draw: atom_low iff uniform_draw < p_low."""
    if not 0.0 <= uniform_draw < 1.0:
        raise ValidationError("uniform draw must lie in [0, 1)")
    return law.atom_low if uniform_draw < law.p_low else law.atom_high


@dataclass(frozen=True)
class FixedPilot:
    """Pilot bandwidth rule: kNN radius with exactly k_g neighbors."""

    k_g: int


@dataclass(frozen=True)
class MultiplierPilot:
    """Pilot rule: kNN radius with min(round(c * k_max), n - 1) neighbors.

    An oversmoothing pilot; c must exceed 1.
    """

    c: float = 2.0


@dataclass(frozen=True)
class BootstrapConfig:
    """Parameters of one wild-bootstrap bandwidth-selection run."""

    n_replications: int = 100
    k_min: int = 2
    k_max: int = 32
    seed: int = 0
    pilot: FixedPilot | MultiplierPilot = MultiplierPilot(2.0)
    evaluation: str = "test_set"  # or "pointwise"
    query_index: int = 0

    def __post_init__(self):
        if self.n_replications < 1:
            raise ValidationError("n_replications must be >= 1")
        if not (2 <= self.k_min <= self.k_max):
            raise ValidationError("need 2 <= k_min <= k_max")
        if not 0 <= self.seed < 2**64:
            raise ValidationError("seed must be a nonnegative 64-bit integer")
        if self.evaluation not in ("test_set", "pointwise"):
            raise ValidationError("evaluation must be 'test_set' or 'pointwise'")
        if isinstance(self.pilot, FixedPilot):
            if self.pilot.k_g < 2:
                raise ValidationError("fixed pilot needs k_g >= 2")
        elif isinstance(self.pilot, MultiplierPilot):
            if self.pilot.c <= 1.0:
                raise ValidationError("pilot multiplier must exceed 1")
        else:
            raise ValidationError("pilot must be FixedPilot or MultiplierPilot")

    def pilot_k(self, n: int) -> int:
        if isinstance(self.pilot, FixedPilot):
            k_g = self.pilot.k_g
        else:
            k_g = min(int(round(self.pilot.c * self.k_max)), n - 1)
        if not (2 <= k_g <= n - 1):
            raise ValidationError(
                f"pilot neighbor count {k_g} outside [2, {n - 1}]"
            )
        return k_g


@dataclass(frozen=True)
class WildBootstrapResult:
    """Bootstrap error per candidate bandwidth plus the selected one.

    ``per_bandwidth`` holds (k, h, mean_sq_boot_error) triples; in test_set
    mode h is the per-query kNN radius averaged over queries. The selected
    entry attains the minimal error, ties broken toward smaller h.
    """

    per_bandwidth: tuple[tuple[int, float, float], ...]
    selected_k: int
    selected_h: float


def _argmin_entry(per_bandwidth) -> tuple[int, float]:
    if not per_bandwidth:
        raise EmptyGrid("no bandwidth candidates")
    best = per_bandwidth[0]
    for entry in per_bandwidth[1:]:
        if entry[2] < best[2] or (entry[2] == best[2] and entry[1] < best[1]):
            best = entry
    return best[0], best[1]


def select_bandwidth(result: WildBootstrapResult) -> tuple[int, float]:
    """Entry of the error curve with minimal error; ties -> smallest h."""
    return _argmin_entry(result.per_bandwidth)


def _kth_smallest(distances: np.ndarray, k: int,
                  exclude_self: bool = False) -> float:
    d = np.sort(distances)
    if exclude_self and d.size > 0 and d[0] == 0.0:
        d = d[1:]
    if k > d.size:
        raise ValidationError(f"k = {k} exceeds {d.size} available distances")
    return float(d[k - 1])


def _insample_predictions(dist: np.ndarray, responses: np.ndarray,
                          kernel: KernelSpec, h: float) -> np.ndarray:
    """Full-sample kernel predictions at every sample point, radius h."""
    weights = eval_kernel_array(kernel, dist / h)
    denom = weights.sum(axis=1)
    bad = np.flatnonzero(denom <= 0.0)
    if bad.size:
        raise EmptyNeighborhood(
            f"in-sample prediction at point {bad[0]} has no positive weight "
            f"at radius {h}"
        )
    return (weights @ responses) / denom


def residuals(sample: FunctionalSample, kernel: KernelSpec,
              spec: SemiMetricSpec, h: float | None = None,
              k: int | None = None,
              h_per_point: Sequence[float] | None = None) -> np.ndarray:
    """In-sample residuals y_i - r_hat(X_i) on the full sample.

    Exactly one bandwidth rule must be given: a global radius ``h``, a
    neighbor count ``k`` (per-point kNN radius, the point itself excluded
    from the ranking but included in the fit), or explicit per-point radii.

    Raises:
        EmptyNeighborhood: naming the first point with no positive weight.
    """
    given = [v is not None for v in (h, k, h_per_point)]
    if sum(given) != 1:
        raise ValidationError("give exactly one of h, k, or h_per_point")
    n = len(sample)
    trans = transformed_matrix(sample, spec)
    w_quad = sample.grid.trapezoid_weights()
    dist = distance_matrix(trans, trans, w_quad)
    if h is not None:
        radii = np.full(n, float(h))
    elif k is not None:
        radii = np.array([
            _kth_smallest(dist[i], int(k), exclude_self=True) for i in range(n)
        ])
    else:
        radii = np.asarray(h_per_point, dtype=float)
        if radii.shape != (n,):
            raise ValidationError(f"h_per_point must have length {n}")
    preds = np.empty(n)
    for i in range(n):
        try:
            preds[i] = nadaraya_watson(
                dist[i], sample.responses, kernel, radii[i]
            ).prediction
        except EmptyNeighborhood as exc:
            raise EmptyNeighborhood(f"at sample point {i}: {exc}") from exc
    return sample.responses - preds


def _multiplier_matrix(seed: int, n_replications: int,
                       keys: np.ndarray) -> np.ndarray:
    """Wild multipliers, shape (n_replications, n_points).

    Row b comes from the Philox stream keyed by (seed, b); each point reads
    the draw at the position of its key, so a permuted sample with matching
    keys receives the same multipliers.
    """
    n_keys = int(keys.max()) + 1
    out = np.empty((n_replications, keys.size))
    for b in range(n_replications):
        gen = np.random.Generator(
            np.random.Philox(key=np.array([seed, b], dtype=np.uint64))
        )
        u = gen.random(n_keys)[keys]
        out[b] = np.where(u < P_LOW, MULTIPLIER_LOW, MULTIPLIER_HIGH)
    return out


def bootstrap_error_curve(sample: FunctionalSample, queries: Sequence[Curve],
                          kernel: KernelSpec, spec: SemiMetricSpec,
                          config: BootstrapConfig,
                          point_keys: Sequence[int] | None = None
                          ) -> WildBootstrapResult:
    """Wild-bootstrap error per candidate kNN bandwidth.

    For each query and each candidate k, the bandwidth is the kNN radius of
    the query; residuals are refit at that radius, perturbed by the wild
    law, added to the pilot fit, re-smoothed at the same radius, and scored
    against the pilot value at the query. ``evaluation='test_set'`` averages
    errors over all queries; ``'pointwise'`` uses the single query at
    ``config.query_index``.

    Args:
        point_keys: per-point RNG keys (defaults to 0..n-1); pass original
            indices to make results invariant to permuting the sample.

    Raises:
        DegeneratePilot: when the pilot fit fails at some point or query.
        EmptyNeighborhood: when a candidate radius leaves a query without
            positively weighted neighbors (reported with its k, h, query).
    """
    n = len(sample)
    y = sample.responses
    if config.evaluation == "pointwise":
        if not 0 <= config.query_index < len(queries):
            raise ValidationError(
                f"query_index {config.query_index} outside the query set"
            )
        active = [queries[config.query_index]]
    else:
        active = list(queries)
    if not active:
        raise ValidationError("query set must be nonempty")

    if point_keys is None:
        keys = np.arange(n)
    else:
        keys = np.asarray(point_keys, dtype=int)
        if keys.shape != (n,) or keys.min() < 0:
            raise ValidationError("point_keys must be nonnegative, one per point")

    trans = transformed_matrix(sample, spec)
    w_quad = sample.grid.trapezoid_weights()
    dist_ss = distance_matrix(trans, trans, w_quad)
    trans_q = np.vstack([
        _transform_values(q.values, sample.grid, spec) for q in active
    ])
    dist_qs = distance_matrix(trans_q, trans, w_quad)

    k_g = config.pilot_k(n)
    try:
        pilot_radii = np.array([
            _kth_smallest(dist_ss[i], k_g, exclude_self=True) for i in range(n)
        ])
        if np.any(pilot_radii <= 0.0):
            raise DegeneratePilot("pilot kNN radius is zero at some point")
        r_tilde = np.array([
            nadaraya_watson(dist_ss[i], y, kernel, pilot_radii[i]).prediction
            for i in range(n)
        ])
        r_tilde_q = np.array([
            nadaraya_watson(
                dist_qs[j], y, kernel, _kth_smallest(dist_qs[j], k_g)
            ).prediction
            for j in range(len(active))
        ])
    except EmptyNeighborhood as exc:
        raise DegeneratePilot(f"pilot fit failed: {exc}") from exc

    multipliers = _multiplier_matrix(config.seed, config.n_replications, keys)

    ks = range(config.k_min, config.k_max + 1)
    n_k = config.k_max - config.k_min + 1
    errors = np.empty((len(active), n_k))
    radii = np.empty((len(active), n_k))
    for j in range(len(active)):
        grid = knn_bandwidths(dist_qs[j], config.k_min, config.k_max)
        for ki, (k, h) in enumerate(grid.entries):
            resid = y - _insample_predictions(dist_ss, y, kernel, h)
            w_q = eval_kernel_array(kernel, dist_qs[j] / h)
            total = float(w_q.sum())
            if total <= 0.0:
                raise EmptyNeighborhood(
                    f"no positive weight at query {j} for k = {k}, h = {h}"
                )
            base = float(np.dot(w_q, r_tilde)) / total
            deviations = (multipliers @ (w_q * resid)) / total
            errors[j, ki] = float(np.mean((base + deviations - r_tilde_q[j]) ** 2))
            radii[j, ki] = h

    per_bandwidth = tuple(
        (k, float(radii[:, ki].mean()), float(errors[:, ki].mean()))
        for ki, k in enumerate(ks)
    )
    selected_k, selected_h = _argmin_entry(per_bandwidth)
    return WildBootstrapResult(
        per_bandwidth=per_bandwidth,
        selected_k=selected_k,
        selected_h=selected_h,
    )
