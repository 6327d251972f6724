"""Polynomial least squares with goodness-of-fit and confidence intervals.

The mapping of interest is real depth y (cm) as a polynomial in pixel depth
x. Fitting always happens on a shifted and scaled abscissa z = (x - mu) /
sigma: the raw basis is catastrophically ill-conditioned at the degrees and
pixel ranges used for calibration (x up to several hundred at degree 8).
Coefficients are then transformed back to the raw basis, so both
representations are available on the fitted model.

RMSE follows the n - p degrees-of-freedom convention, rmse =
sqrt(sse / (n - p)) with p = degree + 1.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.special import betainc

from .errors import InsufficientDataError, InsufficientDofError, RankDeficiencyError

RMSE_TIE_RTOL = 1e-9


@dataclass(frozen=True)
class AbscissaScale:
    """Shift/divisor pair defining the scaled abscissa z = (x - mu) / sigma."""

    mu: float
    sigma: float

    def __post_init__(self):
        if not (math.isfinite(self.sigma) and self.sigma > 0):
            raise ValueError(f"sigma must be positive, got {self.sigma}")


@dataclass(frozen=True)
class FitStats:
    """Goodness-of-fit summary for an n-point fit with p parameters.

    sse is the sum of squared residuals, sst the total sum of squares about
    the mean; r_squared = 1 - sse/sst, adj_r_squared =
    1 - (sse/(n-p)) / (sst/(n-1)), rmse = sqrt(sse/(n-p)).
    """

    n: int
    p: int
    sse: float
    sst: float
    rmse: float
    r_squared: float
    adj_r_squared: float


@dataclass(frozen=True)
class CoefficientInterval:
    """Symmetric confidence interval for one raw-basis coefficient.

    ``index`` is the power of x the coefficient multiplies.
    """

    index: int
    estimate: float
    lower: float
    upper: float


@dataclass(frozen=True)
class PolynomialModel:
    """Fitted polynomial y = sum a_n x^n with its scaled-basis twin.

    ``coeffs_raw`` and ``coeffs_scaled`` are stored lowest power first.
    Evaluation runs on the scaled basis (Horner), which stays well
    conditioned across the calibration range.
    """

    degree: int
    coeffs_raw: tuple[float, ...]
    scale: AbscissaScale
    coeffs_scaled: tuple[float, ...]

    def __post_init__(self):
        if self.degree < 0:
            raise ValueError(f"degree must be >= 0, got {self.degree}")
        object.__setattr__(self, "coeffs_raw", tuple(float(c) for c in self.coeffs_raw))
        object.__setattr__(
            self, "coeffs_scaled", tuple(float(c) for c in self.coeffs_scaled)
        )
        for name in ("coeffs_raw", "coeffs_scaled"):
            got = len(getattr(self, name))
            if got != self.degree + 1:
                raise ValueError(
                    f"{name} must have {self.degree + 1} entries, got {got}"
                )

    def evaluate(self, x):
        """Evaluate at a scalar or array of pixel depths (Horner, scaled basis)."""
        z = (np.asarray(x, dtype=float) - self.scale.mu) / self.scale.sigma
        acc = np.zeros_like(z)
        for c in reversed(self.coeffs_scaled):
            acc = acc * z + c
        if np.ndim(x) == 0:
            return float(acc)
        return acc

    __call__ = evaluate


@dataclass(frozen=True)
class FitResult:
    model: PolynomialModel
    stats: FitStats


@dataclass(frozen=True)
class SweepEntry:
    degree: int
    model: PolynomialModel
    stats: FitStats


@dataclass(frozen=True)
class SkippedDegree:
    degree: int
    reason: str


@dataclass(frozen=True)
class DegreeSweep:
    """Degree sweep outcome: entries ranked by rmse, plus the winner.

    ``entries`` are sorted by exact (rmse, degree); ``best`` applies the
    tie rule that rmse values within relative 1e-9 prefer the lower degree.
    """

    entries: tuple[SweepEntry, ...]
    skipped: tuple[SkippedDegree, ...]
    best: SweepEntry


def evaluate(model: PolynomialModel, x):
    """Real depth predicted by the model at pixel depth x."""
    return model.evaluate(x)


def _as_xy(xs, ys) -> tuple[np.ndarray, np.ndarray]:
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.ndim != 1 or ys.ndim != 1:
        raise ValueError("xs and ys must be one-dimensional")
    if xs.shape != ys.shape:
        raise ValueError(f"length mismatch: {xs.size} xs vs {ys.size} ys")
    if not (np.isfinite(xs).all() and np.isfinite(ys).all()):
        raise ValueError("xs and ys must be finite")
    return xs, ys


def _scaled_to_raw(coeffs: np.ndarray, mu: float, sigma: float) -> np.ndarray:
    """Expand sum c_k ((x - mu)/sigma)^k into raw powers of x."""
    deg = len(coeffs) - 1
    raw = np.zeros(deg + 1)
    for k, ck in enumerate(coeffs):
        for j in range(k + 1):
            raw[j] += ck * math.comb(k, j) * (-mu) ** (k - j) / sigma**k
    return raw


def _raw_to_scaled_exact(coeffs_raw, mu: float, sigma: float) -> tuple[float, ...]:
    """Expand sum a_j (mu + sigma*z)^j into powers of z, in exact rationals.

    The raw-basis representation loses information to cancellation, so this
    direction is done exactly and rounded once at the end.
    """
    deg = len(coeffs_raw) - 1
    mu_f, sig_f = Fraction(mu), Fraction(sigma)
    scaled = [Fraction(0)] * (deg + 1)
    for j, aj in enumerate(coeffs_raw):
        aj_f = Fraction(aj)
        for k in range(j + 1):
            scaled[k] += aj_f * math.comb(j, k) * mu_f ** (j - k) * sig_f**k
    return tuple(float(c) for c in scaled)


def _transform_matrix(degree: int, mu: float, sigma: float) -> np.ndarray:
    """Matrix T with raw = T @ scaled for coefficient vectors (ascending)."""
    T = np.zeros((degree + 1, degree + 1))
    for k in range(degree + 1):
        for j in range(k + 1):
            T[j, k] = math.comb(k, j) * (-mu) ** (k - j) / sigma**k
    return T


def _stats(ys: np.ndarray, yhat: np.ndarray, p: int) -> FitStats:
    n = ys.size
    resid = ys - yhat
    sse = float(resid @ resid)
    sst = float(np.sum((ys - ys.mean()) ** 2))
    rmse = math.sqrt(sse / (n - p))
    if sst > 0:
        r2 = 1.0 - sse / sst
        adj = 1.0 - (sse / (n - p)) / (sst / (n - 1))
    else:
        # all responses equal: define r^2 = 1 for a perfect fit
        r2 = adj = 1.0 if sse == 0 else float("nan")
    return FitStats(n=n, p=p, sse=sse, sst=sst, rmse=rmse,
                    r_squared=r2, adj_r_squared=adj)


def fit_polynomial(xs, ys, degree: int) -> FitResult:
    """Least-squares polynomial of the given degree mapping xs to ys.

    Solves on the scaled abscissa via an orthogonal decomposition and
    back-transforms the coefficients to the raw basis.

    Raises
    ------
    InsufficientDofError
        When n <= degree + 1 (no residual degree of freedom).
    RankDeficiencyError
        When the abscissae do not span the basis (e.g. all identical).
    """
    if degree < 0:
        raise ValueError(f"degree must be >= 0, got {degree}")
    xs, ys = _as_xy(xs, ys)
    n, p = xs.size, degree + 1
    if n <= p:
        raise InsufficientDofError(
            f"degree {degree} needs more than {p} observations, got {n}"
        )
    if np.ptp(xs) == 0:
        raise RankDeficiencyError("all pixel depths identical")

    mu = float(xs.mean())
    sigma = float(xs.std(ddof=1))
    if sigma == 0:
        sigma = 1.0
    z = (xs - mu) / sigma
    V = np.vander(z, p, increasing=True)
    coeffs, _, rank, _ = np.linalg.lstsq(V, ys, rcond=None)
    if rank < p:
        raise RankDeficiencyError(
            f"need at least {p} distinct pixel depths for degree {degree}"
        )
    model = PolynomialModel(
        degree=degree,
        coeffs_raw=tuple(_scaled_to_raw(coeffs, mu, sigma)),
        scale=AbscissaScale(mu=mu, sigma=sigma),
        coeffs_scaled=tuple(coeffs),
    )
    # evaluate through the model so these stats equal goodness_of_fit output
    return FitResult(model=model, stats=_stats(ys, model.evaluate(xs), p))


def goodness_of_fit(model: PolynomialModel, xs, ys) -> FitStats:
    """Fit statistics of the model against the given data."""
    xs, ys = _as_xy(xs, ys)
    p = model.degree + 1
    if xs.size <= p:
        raise InsufficientDofError(
            f"need more than {p} observations, got {xs.size}"
        )
    return _stats(ys, model.evaluate(xs), p)


def confidence_intervals(
    model: PolynomialModel, xs, ys, level: float = 0.95
) -> list[CoefficientInterval]:
    """Symmetric confidence intervals for the raw-basis coefficients.

    The coefficient covariance (X'X)^-1 * sse/(n-p) is formed in the scaled
    basis and mapped to the raw basis through the coefficient transform;
    half-widths are t-quantile times the resulting standard errors.
    """
    if not 0 < level < 1:
        raise ValueError(f"level must be in (0, 1), got {level}")
    xs, ys = _as_xy(xs, ys)
    n, p = xs.size, model.degree + 1
    if n <= p:
        raise InsufficientDofError(f"need more than {p} observations, got {n}")

    mu, sigma = model.scale.mu, model.scale.sigma
    z = (xs - mu) / sigma
    V = np.vander(z, p, increasing=True)
    resid = ys - model.evaluate(xs)
    s2 = float(resid @ resid) / (n - p)
    cov_scaled = np.linalg.inv(V.T @ V) * s2
    T = _transform_matrix(model.degree, mu, sigma)
    se_raw = np.sqrt(np.diag(T @ cov_scaled @ T.T))

    half = t_quantile(1 - (1 - level) / 2, n - p) * se_raw
    return [
        CoefficientInterval(
            index=i, estimate=est, lower=est - h, upper=est + h
        )
        for i, (est, h) in enumerate(zip(model.coeffs_raw, half))
    ]


def _t_cdf(t: float, dof: int) -> float:
    """Student's t CDF via the regularized incomplete beta function."""
    if t == 0:
        return 0.5
    tail = 0.5 * betainc(dof / 2.0, 0.5, dof / (dof + t * t))
    return 1.0 - tail if t > 0 else tail


def t_quantile(p: float, dof: int, tol: float = 1e-8) -> float:
    """p-quantile of Student's t, by bisection on the CDF.

    Bisection brackets the root and narrows it to absolute tolerance
    ``tol``.
    """
    if not 0 < p < 1:
        raise ValueError(f"p must be in (0, 1), got {p}")
    if dof < 1:
        raise ValueError(f"dof must be >= 1, got {dof}")
    if p == 0.5:
        return 0.0
    if p < 0.5:
        return -t_quantile(1 - p, dof, tol=tol)

    lo, hi = 0.0, 1.0
    while _t_cdf(hi, dof) < p:
        hi *= 2.0
        if hi > 1e30:
            raise ValueError(f"quantile bracket failed for p={p}, dof={dof}")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _t_cdf(mid, dof) < p:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def sweep_degrees(xs, ys, d_min: int, d_max: int) -> DegreeSweep:
    """Fit every degree in [d_min, d_max] and rank by dof-adjusted RMSE.

    Degrees that would leave no residual degree of freedom are skipped and
    noted. RMSE values within relative 1e-9 count as ties, broken toward
    the lower degree; rmse values that are zero up to rounding noise (below
    1e-9 of the response scale) tie as well.
    """
    if d_min < 1:
        raise ValueError(f"d_min must be >= 1, got {d_min}")
    if d_max < d_min:
        raise ValueError(f"d_max {d_max} < d_min {d_min}")
    xs, ys = _as_xy(xs, ys)
    n = xs.size

    fitted: list[SweepEntry] = []
    skipped: list[SkippedDegree] = []
    for degree in range(d_min, d_max + 1):
        if n <= degree + 1:
            skipped.append(
                SkippedDegree(
                    degree,
                    f"needs at least {degree + 2} observations, have {n}",
                )
            )
            continue
        result = fit_polynomial(xs, ys, degree)
        fitted.append(SweepEntry(degree, result.model, result.stats))
    if not fitted:
        raise InsufficientDataError(
            f"no degree in [{d_min}, {d_max}] admissible with {n} observations"
        )

    tie_floor = RMSE_TIE_RTOL * math.sqrt(float(ys @ ys) / n)
    best = fitted[0]
    for entry in fitted[1:]:
        a, b = entry.stats.rmse, best.stats.rmse
        if a < b and (b - a) > max(RMSE_TIE_RTOL * max(a, b), tie_floor):
            best = entry
    ranked = tuple(sorted(fitted, key=lambda e: (e.stats.rmse, e.degree)))
    return DegreeSweep(entries=ranked, skipped=tuple(skipped), best=best)
