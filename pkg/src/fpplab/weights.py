"""Edge-weight laws: sampling, survival functions, exponential-tail
exponents and Laplace transforms.

The shortest-path limit theory asks one thing of the weight law beyond
positivity: an exponential tail in the sense that -log P(W > x) / x has a
finite positive limit c.  Laws with c = 0 (sub-exponential tails) or
c = +inf (super-exponential tails) fall outside the admissible class and are
classified as such.  Each analytic family below carries closed forms where
they exist; quadrature covers the rest.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import integrate, special

QUAD_ABS_TOL = 1e-10
TRUNCATION_MASS = 1e-14


class QuadratureError(ArithmeticError):
    """Raised when the integration fallback cannot reach its tolerance."""


# ---------------------------------------------------------------------------
# families


class WeightLaw:
    """Common interface of the positive continuous edge-weight laws."""

    def sample(self, rng: np.random.Generator, size: int | None = None):
        raise NotImplementedError

    def cdf(self, x):
        raise NotImplementedError

    def survival(self, x):
        return 1.0 - self.cdf(x)

    def support_min(self) -> float:
        return 0.0

    def spec_string(self) -> str:
        raise NotImplementedError

    # closed-form hooks; None means "use quadrature"
    def _laplace_closed(self, alpha: float) -> float | None:
        return None

    def _discounted_mean_closed(self, alpha: float) -> float | None:
        return None

    def _pdf(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError


@dataclass(frozen=True)
class Exponential(WeightLaw):
    rate: float

    def __post_init__(self):
        if not (self.rate > 0 and math.isfinite(self.rate)):
            raise ValueError(f"rate must be positive and finite, got {self.rate}")

    def sample(self, rng, size=None):
        return rng.exponential(1.0 / self.rate, size=size)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x <= 0, 0.0, -np.expm1(-self.rate * np.maximum(x, 0.0)))

    def survival(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x <= 0, 1.0, np.exp(-self.rate * np.maximum(x, 0.0)))

    def _pdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x < 0, 0.0, self.rate * np.exp(-self.rate * x))

    def _laplace_closed(self, alpha):
        return self.rate / (self.rate + alpha)

    def _discounted_mean_closed(self, alpha):
        return self.rate / (self.rate + alpha) ** 2

    def spec_string(self):
        return f"exp:{self.rate!r}"


@dataclass(frozen=True)
class ShiftedExponential(WeightLaw):
    """Exponential(rate) pushed to start at ``shift`` > 0; same tail
    exponent as the unshifted law, but bounded away from zero."""

    rate: float
    shift: float

    def __post_init__(self):
        if not (self.rate > 0 and math.isfinite(self.rate)):
            raise ValueError(f"rate must be positive and finite, got {self.rate}")
        if not (self.shift > 0 and math.isfinite(self.shift)):
            raise ValueError(f"shift must be positive and finite, got {self.shift}")

    def sample(self, rng, size=None):
        return self.shift + rng.exponential(1.0 / self.rate, size=size)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x <= self.shift, 0.0, -np.expm1(-self.rate * np.maximum(x - self.shift, 0.0)))

    def survival(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x <= self.shift, 1.0, np.exp(-self.rate * np.maximum(x - self.shift, 0.0)))

    def _pdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x < self.shift, 0.0, self.rate * np.exp(-self.rate * (x - self.shift)))

    def support_min(self):
        return self.shift

    def _laplace_closed(self, alpha):
        return math.exp(-alpha * self.shift) * self.rate / (self.rate + alpha)

    def _discounted_mean_closed(self, alpha):
        lam = self.rate
        return math.exp(-alpha * self.shift) * lam / (lam + alpha) * (self.shift + 1.0 / (lam + alpha))

    def spec_string(self):
        return f"shiftexp:{self.rate!r},{self.shift!r}"


@dataclass(frozen=True)
class Gamma(WeightLaw):
    shape: float
    rate: float

    def __post_init__(self):
        if not (self.shape > 0 and math.isfinite(self.shape)):
            raise ValueError(f"shape must be positive and finite, got {self.shape}")
        if not (self.rate > 0 and math.isfinite(self.rate)):
            raise ValueError(f"rate must be positive and finite, got {self.rate}")

    def sample(self, rng, size=None):
        return rng.gamma(self.shape, 1.0 / self.rate, size=size)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        return special.gammainc(self.shape, self.rate * np.maximum(x, 0.0))

    def survival(self, x):
        x = np.asarray(x, dtype=float)
        return special.gammaincc(self.shape, self.rate * np.maximum(x, 0.0))

    def _pdf(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        pos = x > 0
        xp = x[pos] if x.ndim else (x if pos else None)
        if x.ndim == 0:
            if pos:
                return self.rate**self.shape * x ** (self.shape - 1) * np.exp(-self.rate * x) / special.gamma(self.shape)
            return 0.0
        out[pos] = (
            self.rate**self.shape
            * xp ** (self.shape - 1)
            * np.exp(-self.rate * xp)
            / special.gamma(self.shape)
        )
        return out

    def _laplace_closed(self, alpha):
        return (self.rate / (self.rate + alpha)) ** self.shape

    def _discounted_mean_closed(self, alpha):
        return self.shape * self.rate**self.shape / (self.rate + alpha) ** (self.shape + 1.0)

    def spec_string(self):
        return f"gamma:{self.shape!r},{self.rate!r}"


@dataclass(frozen=True)
class Weibull(WeightLaw):
    """Stretched/compressed exponential; survival exp(-(x/scale)^shape).

    The tail exponent is 0 for shape < 1 (too heavy), 1/scale at shape = 1
    (the exponential case) and +inf for shape > 1.  Kept as the edge-case
    family for tail classification; only shape = 1 is admissible.
    """

    shape: float
    scale: float = 1.0

    def __post_init__(self):
        if not (self.shape > 0 and math.isfinite(self.shape)):
            raise ValueError(f"shape must be positive and finite, got {self.shape}")
        if not (self.scale > 0 and math.isfinite(self.scale)):
            raise ValueError(f"scale must be positive and finite, got {self.scale}")

    def sample(self, rng, size=None):
        return self.scale * rng.weibull(self.shape, size=size)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x <= 0, 0.0, -np.expm1(-((np.maximum(x, 0.0) / self.scale) ** self.shape)))

    def survival(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x <= 0, 1.0, np.exp(-((np.maximum(x, 0.0) / self.scale) ** self.shape)))

    def _pdf(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x, dtype=float)
        pos = x > 0
        if x.ndim == 0:
            if pos:
                z = x / self.scale
                return self.shape / self.scale * z ** (self.shape - 1) * np.exp(-(z**self.shape))
            return 0.0
        z = x[pos] / self.scale
        out[pos] = self.shape / self.scale * z ** (self.shape - 1) * np.exp(-(z**self.shape))
        return out

    def _laplace_closed(self, alpha):
        if self.shape == 1.0:
            lam = 1.0 / self.scale
            return lam / (lam + alpha)
        return None

    def _discounted_mean_closed(self, alpha):
        if self.shape == 1.0:
            lam = 1.0 / self.scale
            return lam / (lam + alpha) ** 2
        return None

    def spec_string(self):
        return f"weibull:{self.shape!r},{self.scale!r}"


class Empirical(WeightLaw):
    """Resampling law over an observed positive sample.

    Sampling draws uniformly with replacement; the Laplace transform and its
    derivative are exact averages over the sample, not quadratures.
    """

    def __init__(self, samples: Sequence[float] | np.ndarray):
        arr = np.asarray(samples, dtype=float)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("empirical law needs a non-empty 1-d sample")
        if not np.all(np.isfinite(arr)) or (arr <= 0).any():
            raise ValueError("empirical samples must be positive and finite")
        self.samples = np.sort(arr)
        self.samples.setflags(write=False)

    def sample(self, rng, size=None):
        return rng.choice(self.samples, size=size, replace=True)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.searchsorted(self.samples, x, side="right") / self.samples.size

    def support_min(self):
        return float(self.samples[0])

    def _laplace_closed(self, alpha):
        return float(np.mean(np.exp(-alpha * self.samples)))

    def _discounted_mean_closed(self, alpha):
        return float(np.mean(self.samples * np.exp(-alpha * self.samples)))

    def spec_string(self):
        raise ValueError("empirical laws have no config-string form")

    def __repr__(self):
        return f"Empirical(n={self.samples.size})"


# ---------------------------------------------------------------------------
# config strings


def parse_weight_law(text: str) -> WeightLaw:
    """Parse ``family:param1[,param2]`` into a weight law.

    Accepted families: ``exp:rate``, ``shiftexp:rate,shift``,
    ``gamma:shape,rate``, ``weibull:shape[,scale]``.
    """
    head, sep, tail = text.partition(":")
    if not sep:
        raise ValueError(f"weight law {text!r} is not of the form family:params")
    try:
        params = [float(tok) for tok in tail.split(",") if tok.strip() != ""]
    except ValueError:
        raise ValueError(f"weight law {text!r} has non-numeric parameters") from None
    family = head.strip().lower()
    if family == "exp" and len(params) == 1:
        return Exponential(params[0])
    if family == "shiftexp" and len(params) == 2:
        return ShiftedExponential(params[0], params[1])
    if family == "gamma" and len(params) == 2:
        return Gamma(params[0], params[1])
    if family == "weibull" and len(params) in (1, 2):
        return Weibull(*params)
    raise ValueError(f"unknown weight law {text!r}")


def sample_weight(law: WeightLaw, rng: np.random.Generator) -> float:
    """One draw from the law."""
    return float(law.sample(rng))


# ---------------------------------------------------------------------------
# tail exponents

HEAVY = "heavy"
ADMISSIBLE = "admissible"
SUPEREXPONENTIAL = "superexponential"


@dataclass(frozen=True)
class TailExponent:
    """Limit of -log P(W > x) / x, with its admissibility class."""

    value: float

    @property
    def classification(self) -> str:
        if self.value == 0.0:
            return HEAVY
        if math.isinf(self.value):
            return SUPEREXPONENTIAL
        return ADMISSIBLE

    @property
    def is_admissible(self) -> bool:
        return self.classification == ADMISSIBLE


def tail_exponent(law: WeightLaw) -> TailExponent:
    """Analytic tail exponent of a parametric family.

    Empirical laws carry no analytic tail; estimate from samples instead
    (see :func:`estimate_tail_exponent`).
    """
    if isinstance(law, Empirical):
        raise TypeError("empirical laws have no analytic tail exponent; estimate from samples")
    if isinstance(law, Exponential):
        return TailExponent(law.rate)
    if isinstance(law, ShiftedExponential):
        return TailExponent(law.rate)
    if isinstance(law, Gamma):
        return TailExponent(law.rate)
    if isinstance(law, Weibull):
        if law.shape < 1.0:
            return TailExponent(0.0)
        if law.shape == 1.0:
            return TailExponent(1.0 / law.scale)
        return TailExponent(math.inf)
    raise TypeError(f"unknown weight law type {type(law).__name__}")


# ---------------------------------------------------------------------------
# Laplace transforms


def laplace_transform(law: WeightLaw, alpha: float) -> float:
    """E[exp(-alpha * W)] for alpha >= 0.

    Closed forms where the family has one; otherwise adaptive quadrature on
    [support_min, support_min + ln(1e14)/alpha], which bounds the discarded
    tail contribution by exp(-alpha*T) < 1e-14.
    """
    if alpha < 0 or not math.isfinite(alpha):
        raise ValueError(f"alpha must be finite and non-negative, got {alpha}")
    if alpha == 0.0:
        return 1.0
    closed = law._laplace_closed(alpha)
    if closed is not None:
        return float(closed)
    return _quad_against_density(law, alpha, lambda t: np.exp(-alpha * t))


def discounted_mean_lifetime(law: WeightLaw, alpha: float) -> float:
    """E[W * exp(-alpha * W)], the negative derivative of the Laplace
    transform; the denominator of the mean-growth prefactor."""
    if alpha < 0 or not math.isfinite(alpha):
        raise ValueError(f"alpha must be finite and non-negative, got {alpha}")
    closed = law._discounted_mean_closed(alpha)
    if closed is not None:
        return float(closed)
    if alpha == 0.0:
        raise ValueError("discounted mean at alpha=0 is the raw mean; not supported for this family")
    return _quad_against_density(law, alpha, lambda t: t * np.exp(-alpha * t))


def _truncation_point(law: WeightLaw, alpha: float) -> float:
    """Upper integration limit: stop once either the exp(-alpha*t) kernel or
    the survival mass is below 1e-16, whichever comes first.  Both integrands
    used here are bounded by min(exp(-alpha*(t-lo)), survival(t)) up to a
    factor of t, so the discarded tail is negligible next to QUAD_ABS_TOL."""
    lo = law.support_min()
    kernel_cut = lo + math.log(1e16) / alpha
    hi = lo + 1.0
    while law.survival(hi) > 1e-16 and hi < kernel_cut:
        hi = lo + 2.0 * (hi - lo)
    return min(hi, kernel_cut)


def _quad_against_density(law: WeightLaw, alpha: float, weight_fn) -> float:
    lo = law.support_min()
    hi = _truncation_point(law, alpha)
    res = integrate.tanhsinh(
        lambda t: weight_fn(t) * law._pdf(t),
        lo,
        hi,
        atol=QUAD_ABS_TOL / 100.0,
    )
    if not res.success or res.error > QUAD_ABS_TOL:
        raise QuadratureError(
            f"quadrature for {law!r} at alpha={alpha} reached abs error "
            f"{float(res.error):.3e} > {QUAD_ABS_TOL:.1e}"
        )
    return float(res.integral)


# ---------------------------------------------------------------------------
# tail estimation from samples

MIN_TAIL_SAMPLES = 10_000
HEAVY_CURVATURE_Z = -5.0


@dataclass(frozen=True)
class TailEstimate:
    """Tail exponent fitted from samples.

    value: fitted asymptotic slope of -log(empirical survival) in x.
    band: bootstrap percentile interval for value ((nan, nan) if no bootstrap).
    curvature_ratio: weighted slope of the upper half of the grid divided by
        the lower half; near 1 for a genuinely linear (admissible) tail,
        well below 1 when the tail bends down (too heavy).
    curvature_z: the same slope difference divided by its standard error.
        Admissible tails keep it within a few units of zero; heavy tails
        drive it far negative, so the cutoff ``HEAVY_CURVATURE_Z`` calls
        heaviness only on overwhelming evidence.
    grid_x / neg_log_survival: the retained grid points and fitted ordinates,
        for inspection.
    """

    value: float
    band: tuple[float, float]
    curvature_ratio: float
    curvature_z: float
    grid_x: np.ndarray = field(repr=False)
    neg_log_survival: np.ndarray = field(repr=False)

    @property
    def classification(self) -> str:
        if self.value <= 0.0 or self.curvature_z < HEAVY_CURVATURE_Z:
            return HEAVY
        return ADMISSIBLE

    @property
    def is_admissible(self) -> bool:
        return self.classification == ADMISSIBLE


def _survival_on(sorted_samples: np.ndarray, xs: np.ndarray) -> np.ndarray:
    return (
        sorted_samples.size - np.searchsorted(sorted_samples, xs, side="right")
    ) / sorted_samples.size


def _fit_increments(x: np.ndarray, surv: np.ndarray, curvature_correction: bool) -> float:
    """Weighted LS slope from the increments of -log(empirical survival).

    Empirical -log survival values at nested grid points are strongly
    correlated; their increments are independent, with variance proportional
    to the increment of 1/survival, so weighting by its inverse is the
    generalized-least-squares fit.  The optional log1p(x) column absorbs
    polynomial prefactors of the survival function (gamma-like tails) that
    would otherwise bias the slope low.  Returns nan when fewer than two
    informative increments remain.
    """
    dvar = np.diff(1.0 / surv)
    ok = dvar > 0
    if ok.sum() < 2:
        return math.nan
    dy = np.diff(-np.log(surv))[ok]
    dx = np.diff(x)[ok]
    if curvature_correction:
        design = np.column_stack([dx, np.diff(np.log1p(x))[ok]])
    else:
        design = dx[:, None]
    sw = np.sqrt(1.0 / dvar[ok])
    coef, *_ = np.linalg.lstsq(design * sw[:, None], dy * sw, rcond=None)
    return float(coef[0])


def _concavity_diagnostic(x: np.ndarray, surv: np.ndarray, n_samples: int) -> tuple[float, float]:
    """(upper/lower weighted slope ratio, slope difference in standard errors).

    Each half of the grid gets a one-parameter weighted fit of the -log
    survival increments on the x increments; the weights make the slope
    variance (1/n) / sum(w * dx^2), so the difference normalizes to an
    approximately standard-normal statistic under a straight tail.
    """
    dvar = np.diff(1.0 / surv)
    ok = dvar > 0
    dy = np.diff(-np.log(surv))[ok]
    dx = np.diff(x)[ok]
    w = 1.0 / dvar[ok]
    half = dx.size // 2

    def weighted_slope(sl: slice) -> tuple[float, float]:
        denom = float(np.sum(w[sl] * dx[sl] ** 2))
        slope = float(np.sum(w[sl] * dx[sl] * dy[sl])) / denom
        return slope, (1.0 / n_samples) / denom

    lo_slope, lo_var = weighted_slope(slice(0, half))
    hi_slope, hi_var = weighted_slope(slice(half, None))
    ratio = hi_slope / lo_slope if lo_slope > 0 else 0.0
    z = (hi_slope - lo_slope) / math.sqrt(lo_var + hi_var)
    return ratio, z


def estimate_tail_exponent(
    samples: Sequence[float] | np.ndarray,
    grid: np.ndarray | None = None,
    *,
    quantile_lo: float = 0.70,
    quantile_hi: float = 0.9999,
    grid_size: int = 40,
    curvature_correction: bool = True,
    n_boot: int = 200,
    rng: np.random.Generator | None = None,
) -> TailEstimate:
    """Fit the exponential-tail exponent from an i.i.d. sample.

    -log of the empirical survival function is fitted against x over an
    upper-tail grid (default: evenly spaced between the 0.70 and 0.9999
    sample quantiles).  The fit runs on the survival *increments* between
    adjacent grid points, weighted by their inverse variance; see
    ``_fit_increments`` for why that is the statistically sound version of
    the straight-line fit.  With ``curvature_correction`` (default) a
    log1p(x) column soaks up polynomial prefactors so that e.g. gamma tails
    come out unbiased; the returned value is the coefficient of x either
    way.  Grid points where the empirical survival hits zero are dropped.
    A percentile bootstrap over resampled data gives the band
    (``n_boot=0`` disables it).

    Needs at least ``MIN_TAIL_SAMPLES`` observations; the tail is where the
    information lives and short samples have none.
    """
    arr = np.asarray(samples, dtype=float)
    if arr.ndim != 1:
        raise ValueError("samples must be 1-d")
    if arr.size < MIN_TAIL_SAMPLES:
        raise ValueError(
            f"tail estimation needs at least {MIN_TAIL_SAMPLES} samples, got {arr.size}"
        )
    if not np.all(np.isfinite(arr)) or (arr <= 0).any():
        raise ValueError("samples must be positive and finite")
    srt = np.sort(arr)
    if grid is None:
        lo = float(np.quantile(srt, quantile_lo))
        hi = float(np.quantile(srt, quantile_hi))
        if not lo < hi:
            raise ValueError("degenerate sample: upper-tail quantiles coincide")
        grid = np.linspace(lo, hi, grid_size)
    else:
        grid = np.asarray(grid, dtype=float)
        if grid.ndim != 1 or grid.size < 2:
            raise ValueError("grid must contain at least two points")
        if (grid <= 0).any():
            raise ValueError("grid points must be positive")
        grid = np.sort(grid)

    surv = _survival_on(srt, grid)
    keep = surv > 0
    x = grid[keep]
    if x.size < 3:
        raise ValueError("degenerate grid: fewer than three points carry positive survival mass")
    surv = surv[keep]
    y = -np.log(surv)
    value = _fit_increments(x, surv, curvature_correction)
    if math.isnan(value):
        raise ValueError("degenerate grid: fewer than two informative survival increments")
    ratio, z = _concavity_diagnostic(x, surv, arr.size)

    if n_boot > 0:
        if rng is None:
            rng = np.random.default_rng(0)
        boots = np.empty(n_boot)
        for b in range(n_boot):
            res = np.sort(rng.choice(arr, size=arr.size, replace=True))
            sb = _survival_on(res, x)
            kb = sb > 0
            if kb.sum() < 3:
                boots[b] = np.nan
                continue
            boots[b] = _fit_increments(x[kb], sb[kb], curvature_correction)
        boots = boots[np.isfinite(boots)]
        if boots.size == 0:
            band = (math.nan, math.nan)
        else:
            band = (float(np.percentile(boots, 2.5)), float(np.percentile(boots, 97.5)))
    else:
        band = (math.nan, math.nan)

    return TailEstimate(
        value=value,
        band=band,
        curvature_ratio=float(ratio),
        curvature_z=float(z),
        grid_x=x,
        neg_log_survival=y,
    )
