"""Bivariate central moments, standardized co-moments and summary statistics.

All moments are averages, ``mu_rs = mean(x**r * y**s)`` on centered data,
and variances use the 1/n convention throughout.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace

import numpy as np

from .errors import DataError, DegenerateError
from .sample import BivariatePairs, center

# relative threshold below which a ratio denominator counts as zero
ZERO_DENOMINATOR_RTOL = 1e-12


@dataclass(frozen=True)
class MomentSet:
    """Averaged central moments ``mu_rs`` for every ``r + s <= 4``.

    ``n`` is ``None`` for population (analytic) moment sets.
    """

    n: int | None
    mu20: float
    mu02: float
    mu11: float
    mu30: float
    mu03: float
    mu21: float
    mu12: float
    mu40: float
    mu04: float
    mu31: float
    mu13: float
    mu22: float

    @property
    def sigma_x(self) -> float:
        return math.sqrt(max(self.mu20, 0.0))

    @property
    def sigma_y(self) -> float:
        return math.sqrt(max(self.mu02, 0.0))

    @property
    def degenerate(self) -> bool:
        """True when either series has zero spread."""
        return self.sigma_x == 0.0 or self.sigma_y == 0.0

    def mu(self, r: int, s: int) -> float:
        if (r, s) == (0, 0):
            return 1.0
        if r + s == 1:
            return 0.0
        return getattr(self, f"mu{r}{s}")

    def swapped(self) -> "MomentSet":
        """Moments with the roles of x and y exchanged."""
        kw = {f.name: getattr(self, f.name) for f in fields(self)}
        for f in fields(self):
            if f.name.startswith("mu"):
                r, s = f.name[2], f.name[3]
                kw[f"mu{s}{r}"] = getattr(self, f.name)
        return MomentSet(**kw)

    def rescaled(self, a: float, c: float) -> "MomentSet":
        """Moments of ``(a*x, c*y)``."""
        kw = {}
        for f in fields(self):
            if f.name.startswith("mu"):
                r, s = int(f.name[2]), int(f.name[3])
                kw[f.name] = a**r * c**s * getattr(self, f.name)
        return replace(self, **kw)


_ORDERS = [(int(f.name[2]), int(f.name[3])) for f in fields(MomentSet) if f.name != "n"]


def compute_moments(pairs: BivariatePairs) -> MomentSet:
    """Average every product ``x**r * y**s`` with ``2 <= r + s <= 4``.

    Degenerate inputs (a constant series) are not rejected here; check
    :attr:`MomentSet.degenerate`.
    """
    x, y = pairs.x, pairs.y
    xp = [np.ones_like(x), x, x * x, x * x * x, (x * x) ** 2]
    yp = [np.ones_like(y), y, y * y, y * y * y, (y * y) ** 2]
    values = {f"mu{r}{s}": float(np.mean(xp[r] * yp[s])) for r, s in _ORDERS}
    return MomentSet(n=pairs.n, **values)


def moments_of(x, y) -> MomentSet:
    """Convenience: center raw arrays and compute their moments."""
    return compute_moments(BivariatePairs(center(x), center(y)))


def gaussian_moments(sigma_x: float, sigma_y: float, rho: float) -> MomentSet:
    """Population moments of a zero-mean bivariate normal distribution."""
    if sigma_x <= 0 or sigma_y <= 0:
        raise DataError("standard deviations must be positive")
    if not -1.0 <= rho <= 1.0:
        raise DataError("rho must lie in [-1, 1]")
    sx, sy = sigma_x, sigma_y
    return MomentSet(
        n=None,
        mu20=sx**2,
        mu02=sy**2,
        mu11=rho * sx * sy,
        mu30=0.0,
        mu03=0.0,
        mu21=0.0,
        mu12=0.0,
        mu40=3 * sx**4,
        mu04=3 * sy**4,
        mu31=3 * rho * sx**3 * sy,
        mu13=3 * rho * sx * sy**3,
        mu22=sx**2 * sy**2 * (1 + 2 * rho**2),
    )


@dataclass(frozen=True)
class CoMomentReport:
    rho: float
    lambda21: float
    lambda12: float
    lambda31: float
    lambda13: float
    lambda22: float
    sys_coskew: float
    sys_cokurt: float
    kappa13: float
    kappa31: float
    kappa22: float
    sys_coskew_defined: bool
    sys_cokurt_defined: bool


def _ratio(num: float, den: float, scale: float) -> tuple[float, bool]:
    if abs(den) < ZERO_DENOMINATOR_RTOL * scale:
        return 0.0, False
    return num / den, True


def comoment_report(ms: MomentSet) -> CoMomentReport:
    """Standardized co-moments, systematic ratios and normal-relative excesses.

    ``kappa13`` is measured against the bivariate-normal value
    ``3 * rho * sigma_x * sigma_y**3`` so that every kappa vanishes exactly
    for normal populations.
    """
    sx, sy = ms.sigma_x, ms.sigma_y
    if sx == 0.0 or sy == 0.0:
        raise DegenerateError("co-moments undefined: a series has zero variance")
    rho = min(1.0, max(-1.0, ms.mu11 / (sx * sy)))

    def lam(r: int, s: int) -> float:
        return ms.mu(r, s) / (sx**r * sy**s)

    coskew, coskew_ok = _ratio(ms.mu21, ms.mu30, sx**3)
    cokurt, cokurt_ok = _ratio(ms.mu31, ms.mu40, sx**4)
    return CoMomentReport(
        rho=rho,
        lambda21=lam(2, 1),
        lambda12=lam(1, 2),
        lambda31=lam(3, 1),
        lambda13=lam(1, 3),
        lambda22=lam(2, 2),
        sys_coskew=coskew,
        sys_cokurt=cokurt,
        kappa13=ms.mu13 - 3 * rho * sx * sy**3,
        kappa31=ms.mu31 - 3 * rho * sx**3 * sy,
        kappa22=ms.mu22 - sx**2 * sy**2 * (1 + 2 * rho**2),
        sys_coskew_defined=coskew_ok,
        sys_cokurt_defined=cokurt_ok,
    )


@dataclass(frozen=True)
class SummaryStats:
    """Univariate descriptive statistics of one series (1/n convention).

    ``cv`` is ``st_dev / |mean|``; ``mean_negative`` records the sign that
    the absolute value hides. ``z_skew`` and ``z_kurt`` are the large-sample
    normal approximations ``skewness / sqrt(6/n)`` and
    ``excess_kurtosis / sqrt(24/n)``.
    """

    n: int
    mean: float
    variance: float
    st_dev: float
    cv: float
    mean_negative: bool
    skewness: float
    excess_kurtosis: float
    z_skew: float
    z_kurt: float


def summary_stats(values) -> SummaryStats:
    v = np.asarray(values, dtype=float)
    if v.ndim != 1 or v.size < 2:
        raise DataError("summary statistics need a 1-d series of length >= 2")
    if not np.all(np.isfinite(v)):
        raise DataError("series contains non-finite values")
    n = v.size
    mean = float(v.mean())
    d = center(v)
    m2 = float(np.mean(d * d))
    if m2 == 0.0:
        raise DegenerateError("zero variance: skewness and kurtosis undefined")
    m3 = float(np.mean(d**3))
    m4 = float(np.mean(d**4))
    sd = math.sqrt(m2)
    skew = m3 / sd**3
    exkurt = m4 / m2**2 - 3.0
    cv = sd / abs(mean) if mean != 0 else math.inf
    return SummaryStats(
        n=n,
        mean=mean,
        variance=m2,
        st_dev=sd,
        cv=cv,
        mean_negative=mean < 0,
        skewness=skew,
        excess_kurtosis=exkurt,
        z_skew=skew / math.sqrt(6.0 / n),
        z_kurt=exkurt / math.sqrt(24.0 / n),
    )
