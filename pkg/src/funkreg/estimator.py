"""Functional Nadaraya-Watson estimation at a fixed query.

All operations here work on the vector of semi-metric distances from the
sample curves to the query, which decouples them from how curves are
represented. The estimate decomposes as a ratio of a response-weighted and
an unweighted kernel sum, both normalized by n * F_hat(h) where F_hat is
the empirical small-ball fraction; the prediction itself is invariant to
that normalizer.
"""

from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

from .errors import (
    DegenerateBall,
    DegenerateConstants,
    DegenerateGrid,
    DomainError,
    EmptyNeighborhood,
    KernelNotH2Strict,
    MissingSigma2,
    TooFewPoints,
    ValidationError,
)
from .kernels import (
    KernelConstants,
    KernelSpec,
    Tau0Model,
    compute_constants,
    eval_kernel_array,
    validate_kernel,
)


@dataclass(frozen=True)
class BandwidthGrid:
    """k-nearest-neighbor bandwidth candidates, ascending in k.

    Each entry pairs a neighbor count k with the radius of the smallest
    closed ball around the query containing k sample curves.
    """

    entries: tuple[tuple[int, float], ...]

    def __post_init__(self):
        entries = tuple((int(k), float(h)) for k, h in self.entries)
        if not entries:
            raise ValidationError("bandwidth grid must be nonempty")
        ks = [k for k, _ in entries]
        hs = [h for _, h in entries]
        if any(k2 <= k1 for k1, k2 in zip(ks, ks[1:])):
            raise ValidationError("neighbor counts must be strictly increasing")
        if any(h <= 0 for h in hs):
            raise DegenerateGrid("bandwidths must be strictly positive")
        if any(h2 < h1 for h1, h2 in zip(hs, hs[1:])):
            raise ValidationError("bandwidths must be nondecreasing in k")
        object.__setattr__(self, "entries", entries)

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def ks(self) -> tuple[int, ...]:
        return tuple(k for k, _ in self.entries)

    @property
    def hs(self) -> tuple[float, ...]:
        return tuple(h for _, h in self.entries)


@dataclass(frozen=True)
class EstimateResult:
    """A kernel regression estimate with its diagnostic decomposition.

    ``prediction`` equals ``g_hat / f_hat`` whenever ``f_hat > 0``;
    ``f_hat_empirical`` is the empirical small-ball fraction F_hat(h) and
    ``neighbor_count`` equals n * F_hat(h) exactly.
    """

    prediction: float
    g_hat: float
    f_hat: float
    f_hat_empirical: float
    neighbor_count: int
    bandwidth: float
    sigma2_hat: float | None = None
    ci: tuple[float, float, float] | None = None  # (lower, upper, level)


@dataclass(frozen=True)
class BiasVarianceReport:
    """Leading bias and variance terms of the estimator at (h, n)."""

    b_n: float
    variance_leading: float
    constants: KernelConstants
    phi_prime: float
    h: float
    n: int
    f_of_h: float


def knn_bandwidths(distances, k_min: int, k_max: int,
                   exclude_self: bool = False) -> BandwidthGrid:
    """Bandwidth grid of k-nearest-neighbor radii, k = k_min .. k_max.

    ``h_k`` is the k-th smallest distance (1-indexed); ties produce equal
    consecutive radii. When ``exclude_self`` is set, one zero distance
    (the query's own entry, for in-sample queries) is dropped before
    ranking.

    Raises:
        TooFewPoints: unless 2 <= k_min <= k_max <= n - 1.
    """
    d = np.sort(np.asarray(distances, dtype=float))
    n = d.size
    if not (2 <= k_min <= k_max <= n - 1):
        raise TooFewPoints(
            f"need 2 <= k_min <= k_max <= n - 1 with n = {n}, "
            f"got k_min = {k_min}, k_max = {k_max}"
        )
    if exclude_self and n > 0 and d[0] == 0.0:
        d = d[1:]
    entries = tuple((k, float(d[k - 1])) for k in range(k_min, k_max + 1))
    return BandwidthGrid(entries)


def empirical_sdf(distances, h: float) -> float:
    """Empirical small-ball fraction: share of distances <= h.

    Right-continuous and nondecreasing as a function of h.
    """
    d = np.asarray(distances, dtype=float)
    if d.size == 0:
        return 0.0
    return float(np.count_nonzero(d <= h)) / d.size


def empirical_tau(distances, h: float, s: float) -> float:
    """Empirical conditional small-ball ratio F_hat(h s) / F_hat(h).

    Raises:
        DomainError: if s is outside [0, 1].
        DegenerateBall: if no distance falls within h.
    """
    if s < 0.0 or s > 1.0:
        raise DomainError(f"tau argument must lie in [0, 1], got {s}")
    denom = empirical_sdf(distances, h)
    if denom == 0.0:
        raise DegenerateBall(f"no observation within radius {h}")
    return empirical_sdf(distances, h * s) / denom


def nadaraya_watson(distances, responses, kernel: KernelSpec,
                    h: float) -> EstimateResult:
    """Kernel-weighted mean of the responses at bandwidth h.

    Args:
        distances: semi-metric distances from the sample curves to the query.
        responses: scalar responses, same length and order as distances.
        kernel: weighting kernel, evaluated at distance / h.
        h: bandwidth, strictly positive.

    Raises:
        EmptyNeighborhood: when no observation receives positive weight.
    """
    d = np.asarray(distances, dtype=float)
    y = np.asarray(responses, dtype=float)
    if d.shape != y.shape:
        raise ValidationError("distances and responses must have equal length")
    if h <= 0.0:
        raise ValidationError(f"bandwidth must be positive, got {h}")
    w = eval_kernel_array(kernel, d / h)
    total = float(np.sum(w))
    if total <= 0.0:
        raise EmptyNeighborhood(f"no positive kernel weight within radius {h}")
    weighted_y = float(np.dot(w, y))
    count = int(np.count_nonzero(d <= h))
    return EstimateResult(
        prediction=weighted_y / total,
        g_hat=weighted_y / count,
        f_hat=total / count,
        f_hat_empirical=count / d.size,
        neighbor_count=count,
        bandwidth=float(h),
    )


def estimate_sigma2(distances, responses, kernel: KernelSpec,
                    h: float) -> float:
    """Plug-in conditional variance: E(Y^2 | ball) - E(Y | ball)^2.

    Both conditional expectations use the same kernel estimate; the
    difference is clamped at zero since it can round negative in finite
    samples.
    """
    y = np.asarray(responses, dtype=float)
    first = nadaraya_watson(distances, y, kernel, h).prediction
    second = nadaraya_watson(distances, y * y, kernel, h).prediction
    return max(0.0, second - first * first)


def confidence_interval(result: EstimateResult, kernel: KernelSpec,
                        tau0: Tau0Model, level: float) -> tuple[float, float]:
    """Asymptotic-normality confidence interval around the prediction.

    Half-width is z * sqrt(m2 * sigma2_hat / (count * m1^2)) with
    count = n * F_hat(h); for the uniform kernel m1 = m2 = 1 and the
    interval reduces to prediction +- z * sqrt(sigma2_hat / count). The
    interval is bias-uncorrected, which is honest only in the
    undersmoothing regime where h * sqrt(n F(h)) -> 0.

    Raises:
        KernelNotH2Strict: if K(1) = 0 (the limit constants degenerate).
        MissingSigma2: if the result carries no variance plug-in.
    """
    if not 0.0 < level < 1.0:
        raise ValidationError("confidence level must lie strictly in (0, 1)")
    validate_kernel(kernel)
    if not kernel.h2_strict:
        raise KernelNotH2Strict(
            f"kernel {kernel.family} has K(1) = 0; switch to a kernel with "
            "K(1) > 0 (e.g. uniform) for confidence intervals"
        )
    if result.sigma2_hat is None:
        raise MissingSigma2("estimate carries no sigma2_hat plug-in")
    if result.neighbor_count <= 0 or result.f_hat_empirical <= 0.0:
        raise DegenerateBall("confidence interval needs F_hat(h) > 0")
    constants = compute_constants(kernel, tau0)
    if constants.m1 <= 0.0:
        raise DegenerateConstants(f"m1 = {constants.m1} is not positive")
    z = float(norm.ppf((1.0 + level) / 2.0))
    half = z * np.sqrt(
        constants.m2 * result.sigma2_hat
        / (result.neighbor_count * constants.m1 ** 2)
    )
    return (result.prediction - half, result.prediction + half)


def theoretical_bias_variance(phi_prime: float, sigma2: float, h: float,
                              n: int, f_of_h: float,
                              constants: KernelConstants) -> BiasVarianceReport:
    """Leading-term predictions: bias phi'(0) (m0/m1) h and variance
    (m2/m1^2) sigma^2 / (n F(h)).

    Raises:
        DegenerateConstants: when m1 <= 0.
    """
    if constants.m1 <= 0.0:
        raise DegenerateConstants(f"m1 = {constants.m1} is not positive")
    if sigma2 < 0.0:
        raise ValidationError("sigma2 must be nonnegative")
    if h <= 0.0 or n <= 0 or not (0.0 < f_of_h <= 1.0):
        raise ValidationError("need h > 0, n > 0, and f_of_h in (0, 1]")
    b_n = phi_prime * (constants.m0 / constants.m1) * h
    variance = (constants.m2 / constants.m1 ** 2) * sigma2 / (n * f_of_h)
    return BiasVarianceReport(
        b_n=b_n,
        variance_leading=variance,
        constants=constants,
        phi_prime=phi_prime,
        h=float(h),
        n=int(n),
        f_of_h=float(f_of_h),
    )


def estimate_phi_prime(distances, responses, kernel: KernelSpec,
                       h_pilot: float) -> float:
    """Diagnostic slope of the regression against distance near the query.

    Fits a kernel-weighted least-squares line to (d_i, y_i) over the points
    inside the pilot ball and returns its slope, an estimate of the
    derivative at zero of E[r(X) - r(chi) | distance = s]. Exact for
    responses linear in distance. This is a pragmatic stand-in: no canonical
    estimator exists for this quantity.

    Raises:
        TooFewPoints: with fewer than 10 points inside the pilot ball.
        EmptyNeighborhood: if no in-ball point gets positive weight.
    """
    d = np.asarray(distances, dtype=float)
    y = np.asarray(responses, dtype=float)
    inside = d <= h_pilot
    if int(np.count_nonzero(inside)) < 10:
        raise TooFewPoints(
            f"phi'(0) estimation needs >= 10 points within {h_pilot}, "
            f"got {int(np.count_nonzero(inside))}"
        )
    d_in = d[inside]
    y_in = y[inside]
    w = eval_kernel_array(kernel, d_in / h_pilot)
    total = float(np.sum(w))
    if total <= 0.0:
        raise EmptyNeighborhood("all pilot-ball points have zero weight")
    d_bar = float(np.dot(w, d_in)) / total
    y_bar = float(np.dot(w, y_in)) / total
    s_dd = float(np.dot(w, (d_in - d_bar) ** 2))
    if s_dd == 0.0:
        return 0.0
    s_dy = float(np.dot(w, (d_in - d_bar) * (y_in - y_bar)))
    return s_dy / s_dd
