"""Least-quartic slope estimation.

The loss ``l(b) = mean((y - b*x)**4)`` expands in the averaged moments as

    l(b) = mu40 b^4 - 4 mu31 b^3 + 6 mu22 b^2 - 4 mu13 b + mu04

and its stationary points are the real roots of the cubic

    mu40 b^3 - 3 mu31 b^2 + 3 mu22 b - mu13 = 0,     l'(b) = 4 * cubic(b).

For moments of actual data ``l`` is convex (``l'' = 12 mean(x^2 (y-bx)^2)``),
so the cubic has a single real root; arbitrary coefficient sets (as accepted
by :func:`solve_cubic`) may have three.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import DegenerateError
from .moments import MomentSet
from .sample import BivariatePairs

_EPS = np.finfo(float).eps
# a depressed-cubic coefficient within this many ulps of its rounding error is zero
_ROUNDING_SLACK = 256.0
_TIE_RTOL = 1e-12
_NEWTON_STEPS = 4

SolverPath = Literal["closed_form_single_root", "three_roots_argmin"]


@dataclass(frozen=True)
class CubicCoeffs:
    """The polynomial ``c3 b^3 + c2 b^2 + c1 b + c0``."""

    c3: float
    c2: float
    c1: float
    c0: float

    def __call__(self, b):
        return ((self.c3 * b + self.c2) * b + self.c1) * b + self.c0

    def derivative(self, b):
        return (3 * self.c3 * b + 2 * self.c2) * b + self.c1

    @property
    def scale(self) -> float:
        return max(abs(self.c3), abs(self.c2), abs(self.c1), abs(self.c0))

    def residual(self, b: float) -> float:
        """``|cubic(b)|`` relative to the coefficient and root magnitude."""
        s = self.scale
        if s == 0:
            return 0.0
        return abs(self(b)) / (s * max(1.0, abs(b)) ** 3)


def quartic_loss(ms: MomentSet, b):
    """Evaluate the quartic loss polynomial at ``b`` (scalar or array).

    No sign constraints are imposed on the moments, so illustrative
    coefficient sets can be evaluated as well.
    """
    return (
        (((ms.mu40 * b - 4 * ms.mu31) * b + 6 * ms.mu22) * b - 4 * ms.mu13) * b
        + ms.mu04
    )


def data_loss(pairs: BivariatePairs, b: float) -> float:
    """``mean((y - b*x)**4)`` straight from the observations."""
    r = pairs.y - b * pairs.x
    r2 = r * r
    return float(np.mean(r2 * r2))


def foc_cubic(ms: MomentSet) -> CubicCoeffs:
    """Coefficients of the first-order condition, ``l'(b) = 4 * cubic(b)``."""
    if not ms.mu40 > 0:
        raise DegenerateError("mu40 must be positive: market series is constant")
    return CubicCoeffs(ms.mu40, -3 * ms.mu31, 3 * ms.mu22, -ms.mu13)


def _polish(c: CubicCoeffs, r: float) -> float:
    """Newton refinement, keeping only steps that shrink ``|c(r)|``."""
    fr = abs(c(r))
    for _ in range(_NEWTON_STEPS):
        if fr == 0:
            break
        d = c.derivative(r)
        if d == 0 or not math.isfinite(d):
            break
        cand = r - c(r) / d
        fc = abs(c(cand))
        if not fc < fr:
            break
        r, fr = cand, fc
    return r


def real_roots(c: CubicCoeffs) -> list[tuple[float, int]]:
    """Distinct real roots of a cubic with their multiplicities, ascending.

    Works on the depressed form ``t^3 + p t + q`` (``b = t + shift``): a
    triple root when ``p`` and ``q`` vanish to rounding, a double root when
    the discriminant does, the trigonometric formula for three distinct real
    roots and Cardano's formula (cancellation-free variant) for one. Every
    root then gets Newton polishing on the original coefficients.
    """
    if c.c3 == 0 or not math.isfinite(c.c3):
        raise DegenerateError("leading coefficient is zero: not a cubic")
    a2, a1, a0 = c.c2 / c.c3, c.c1 / c.c3, c.c0 / c.c3
    shift = -a2 / 3.0
    p = a1 - a2 * a2 / 3.0
    q = 2.0 * a2**3 / 27.0 - a2 * a1 / 3.0 + a0
    err_p = _ROUNDING_SLACK * _EPS * (abs(a1) + a2 * a2 / 3.0)
    err_q = _ROUNDING_SLACK * _EPS * (
        2.0 * abs(a2) ** 3 / 27.0 + abs(a2 * a1) / 3.0 + abs(a0)
    )

    if abs(p) <= err_p and abs(q) <= err_q:
        return [(_polish(c, shift), 3)]

    disc = (q / 2.0) ** 2 + (p / 3.0) ** 3
    err_disc = abs(q) * err_q / 2.0 + (p / 3.0) ** 2 * err_p
    if p != 0 and abs(disc) <= err_disc:
        simple, double = 3.0 * q / p, -1.5 * q / p
        roots = [(_polish(c, simple + shift), 1), (_polish(c, double + shift), 2)]
    elif disc > 0:
        w = -q / 2.0 - math.copysign(math.sqrt(disc), q)
        u = float(np.cbrt(w))
        t = u - p / (3.0 * u) if u != 0 else 0.0
        roots = [(_polish(c, t + shift), 1)]
    else:
        m = 2.0 * math.sqrt(-p / 3.0)
        arg = 3.0 * q / (p * m)
        theta = math.acos(min(1.0, max(-1.0, arg))) / 3.0
        roots = [
            (_polish(c, m * math.cos(theta - 2.0 * math.pi * k / 3.0) + shift), 1)
            for k in range(3)
        ]

    roots.sort()
    merged: list[tuple[float, int]] = []
    for r, mult in roots:
        if merged and abs(r - merged[-1][0]) <= 1e-12 * max(1.0, abs(r)):
            merged[-1] = (merged[-1][0], merged[-1][1] + mult)
        else:
            merged.append((r, mult))
    return merged


def solve_cubic(c: CubicCoeffs) -> list[float]:
    """Distinct real roots of ``c``, ascending (repeated roots listed once)."""
    return [r for r, _ in real_roots(c)]


@dataclass(frozen=True)
class CriticalPoint:
    b: float
    # 3 mu40 b^2 - 6 mu31 b + 3 mu22, i.e. l''(b) / 4; positive at a minimum
    second_derivative: float
    loss: float
    multiplicity: int = 1

    @property
    def kind(self) -> str:
        if self.second_derivative > 0:
            return "minimum"
        if self.second_derivative < 0:
            return "maximum"
        return "flat"


@dataclass(frozen=True)
class QuarticFit:
    b_lq: float
    loss_at_min: float
    critical_points: tuple[CriticalPoint, ...]
    n_real_roots: int
    multiplicity: int
    solver_path: SolverPath
    residual_foc: float


def fit_lq(ms: MomentSet, pairs: BivariatePairs | None = None) -> QuarticFit:
    """Least-quartic slope: the global minimizer of the quartic loss.

    Every real root of the first-order cubic is classified by the sign of
    the second derivative and scored by its loss; the lowest loss wins, with
    near-ties (1e-12 relative) going to the smaller ``|b|`` and then the
    smaller ``b``.

    Parameters
    ----------
    ms : MomentSet
        Averaged central moments; ``mu40`` must be positive.
    pairs : BivariatePairs, optional
        The observations behind ``ms``. When given, losses are evaluated
        from the residuals directly, which avoids the cancellation of the
        expanded polynomial near a perfect fit.

    Raises
    ------
    DegenerateError
        If ``mu40 <= 0``.
    """
    cubic = foc_cubic(ms)
    roots = real_roots(cubic)

    def loss(b: float) -> float:
        if pairs is not None:
            return data_loss(pairs, b)
        value = float(quartic_loss(ms, b))
        # sample moments give a nonnegative loss; negatives are rounding
        return max(value, 0.0) if ms.n is not None else value

    points = tuple(
        CriticalPoint(
            b=r,
            second_derivative=3 * ms.mu40 * r * r - 6 * ms.mu31 * r + 3 * ms.mu22,
            loss=loss(r),
            multiplicity=m,
        )
        for r, m in roots
    )

    def beats(a: CriticalPoint, b: CriticalPoint) -> bool:
        tol = _TIE_RTOL * max(abs(a.loss), abs(b.loss))
        if abs(a.loss - b.loss) > tol:
            return a.loss < b.loss
        return (abs(a.b), a.b) < (abs(b.b), b.b)

    best = points[0]
    for cp in points[1:]:
        if beats(cp, best):
            best = cp

    return QuarticFit(
        b_lq=best.b,
        loss_at_min=best.loss,
        critical_points=points,
        n_real_roots=len(points),
        multiplicity=best.multiplicity,
        solver_path="closed_form_single_root" if len(points) == 1 else "three_roots_argmin",
        residual_foc=cubic.residual(best.b),
    )


def fit_ls(ms: MomentSet) -> float:
    """Ordinary least-squares slope on centered data, ``mu11 / mu20``."""
    if not ms.mu20 > 0:
        raise DegenerateError("mu20 must be positive: market series is constant")
    return ms.mu11 / ms.mu20


def closed_form_lq(ms: MomentSet, printed_mu04: bool = False) -> float:
    """Radical expression for the real root of the first-order cubic.

    Only meaningful when the cubic has a single real root. Complex
    arithmetic with principal branches is used throughout; when the
    principal cube root lands on a complex root, the other two cube-root
    branches are tried and the most nearly real result is returned.

    ``printed_mu04=True`` substitutes ``mu04`` for ``mu40`` in the first
    radical's ``-9 mu31^2 + 9 mu22 mu40`` term, reproducing a common
    misprint of this formula so that the two can be compared.
    """
    m40, m31, m22, m13 = ms.mu40, ms.mu31, ms.mu22, ms.mu13
    if not m40 > 0:
        raise DegenerateError("mu40 must be positive")
    p_term = -9 * m31**2 + 9 * m22 * m40
    p_first = -9 * m31**2 + 9 * m22 * (ms.mu04 if printed_mu04 else m40)
    q_term = 54 * m31**3 - 81 * m22 * m31 * m40 + 27 * m13 * m40**2
    inner = q_term + cmath.sqrt(4 * p_term**3 + q_term**2)
    cbrt2 = 2 ** (1 / 3)

    if inner == 0:
        return m31 / m40
    principal = inner ** (1 / 3)
    candidates = []
    for k in range(3):
        root3 = principal * cmath.exp(2j * math.pi * k / 3)
        candidates.append(
            m31 / m40
            - cbrt2 * p_first / (3 * m40 * root3)
            + root3 / (3 * cbrt2 * m40)
        )
    best = min(candidates, key=lambda z: abs(z.imag))
    return best.real


def closed_form_disagreement(ms: MomentSet) -> float:
    """Relative gap between the consistent and the misprinted closed form."""
    a = closed_form_lq(ms)
    b = closed_form_lq(ms, printed_mu04=True)
    return abs(a - b) / max(1.0, abs(a))


class TheilSen:
    """Theil-Sen slope estimator bound to one regressor ``x``.

    The pairwise index plan depends only on ``x``, so it is built once and
    reused for every response series (one market, many assets). Above
    ``direct_limit`` pairs, slopes are streamed in row blocks and the median
    is found by bracketing instead of materializing every slope.
    """

    def __init__(self, x, direct_limit: int = 4_000_000):
        self.x = np.asarray(x, dtype=float)
        n = self.x.size
        if n < 2:
            raise DegenerateError("Theil-Sen needs at least 2 observations")
        self._direct = n * (n - 1) // 2 <= direct_limit
        if self._direct:
            i, j = np.triu_indices(n, 1)
            dx = self.x[j] - self.x[i]
            keep = dx != 0
            self._i, self._j, self._dx = i[keep], j[keep], dx[keep]
            self.n_slopes = int(self._dx.size)
        else:
            order = np.argsort(self.x, kind="stable")
            xs = self.x[order]
            # for sorted x, pairs (i, j>i) with x_j == x_i are the equal runs
            _, counts = np.unique(xs, return_counts=True)
            tied = int(np.sum(counts * (counts - 1) // 2))
            self._order = order
            self.n_slopes = n * (n - 1) // 2 - tied
        if self.n_slopes == 0:
            raise DegenerateError("all x values are identical")

    def slope(self, y) -> float:
        y = np.asarray(y, dtype=float)
        if y.shape != self.x.shape:
            raise ValueError("y must match x in shape")
        if self._direct:
            return float(np.median((y[self._j] - y[self._i]) / self._dx))
        return self._streamed_median(y)

    def _blocks(self, y):
        xs, ys = self.x[self._order], y[self._order]
        n = xs.size
        for i in range(n - 1):
            dx = xs[i + 1 :] - xs[i]
            keep = dx > 0
            yield (ys[i + 1 :][keep] - ys[i]) / dx[keep]

    def _streamed_median(self, y) -> float:
        total = self.n_slopes
        ranks = sorted({(total - 1) // 2, total // 2})
        lo, hi = self._bracket(y, ranks)
        width = max(hi - lo, 1e-12 * max(1.0, abs(lo), abs(hi)))
        while True:
            below = 0
            inside = []
            for s in self._blocks(y):
                below += int(np.count_nonzero(s < lo))
                inside.append(s[(s >= lo) & (s <= hi)])
            vals = np.concatenate(inside)
            if below <= ranks[0] and below + vals.size > ranks[-1]:
                vals.sort()
                return float(np.mean([vals[r - below] for r in ranks]))
            # bracket missed the target ranks: widen the offending side
            if below > ranks[0]:
                lo -= width
            if below + vals.size <= ranks[-1]:
                hi += width
            width *= 2

    def _bracket(self, y, ranks) -> tuple[float, float]:
        # deterministic subsample of rows gives quantile estimates of the slopes
        n = self.x.size
        step = max(1, n // 400)
        sample = np.concatenate(
            [s for k, s in enumerate(self._blocks(y)) if k % step == 0]
        )
        m = sample.size
        frac = np.array(ranks) / max(self.n_slopes - 1, 1)
        slack = 4.0 / math.sqrt(max(m, 1)) + 0.01
        q_lo = max(0.0, float(frac.min()) - slack)
        q_hi = min(1.0, float(frac.max()) + slack)
        return float(np.quantile(sample, q_lo)), float(np.quantile(sample, q_hi))


def fit_theil_sen(pairs: BivariatePairs) -> float:
    """Median of all pairwise slopes ``(y_j - y_i) / (x_j - x_i)``, ``x_i != x_j``."""
    return TheilSen(pairs.x).slope(pairs.y)
