"""Seeded synthetic (market, asset) samples and a brute-force minimization oracle.

Random numbers come from numpy's PCG64 bit generator (O'Neill's permuted
congruential generator, 128-bit state) seeded with a 64-bit integer.
Uniforms are its 53-bit doubles and Gaussian variates come from the
Box-Muller transform of those uniforms, so a sample depends only on the
seed and the documented stream layout, never on numpy's sampler internals.

Every non-normal kind is a two-part Gaussian mixture: a dominant bivariate
normal component ``N(0, [[sx^2, rho sx sy], [rho sx sy, sy^2]])`` with weight
``1 - w`` and a tail part with weight ``w`` (``contamination``) split evenly
over one or more components. Tail components are centered at
``(i*D*sx, j*D*sy)`` for the listed sign pairs ``(i, j)`` and have
independent coordinates with standard deviations ``T*sx`` and ``T*sy``.

================== ======================= ===== ====== =========
kind               tail centers (i, j)     D     T      default w
================== ======================= ===== ====== =========
coskew_left_pos    (-1, +1)                4     0.5    0.05
coskew_right_pos   (+1, +1)                4     0.5    0.05
coskew_neg         (-1, -1), (+1, -1)      4     0.5    0.05
cokurt_lepto_pos   (+1, +1), (-1, -1)      4     0.5    0.05
cokurt_platy_pos   (+1, +1), (-1, +1),     1.5   0.3    0.30
                   (+1, -1), (-1, -1)
cokurt_neg         (+1, 0), (-1, 0),       4     0.5    0.10
                   (0, +1), (0, -1)
outlier_contam.    (0, 0)                  0     6      0.05
================== ======================= ===== ====== =========

Co-skewness kinds put extreme market moves (``x`` far from 0 on the named
side) together with the named sign of ``y``, which fixes the sign of
``lambda21 = mu21 / (sx^2 sy)``. ``cokurt_lepto_pos`` adds heavy tails along
the main diagonal: peaked, fat-tailed marginals and excess ``mu22``.
``cokurt_platy_pos`` puts 30% of the mass on four tight clusters at the
corners of a square: the marginals flatten (negative excess kurtosis) while
``mu22`` still exceeds its normal value, for any base correlation.
``cokurt_neg`` places the tails on the axes so that large ``|x|`` comes with
small ``|y|`` and vice versa, pushing ``mu22`` below normal.
``outlier_contaminated`` mixes in a wide, uncorrelated component.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Literal

import numpy as np

from .errors import DataError
from .moments import MomentSet
from .sample import BivariatePairs
from .sample import center as _center
from .solver import quartic_loss

Kind = Literal[
    "bivariate_normal",
    "coskew_left_pos",
    "coskew_right_pos",
    "coskew_neg",
    "cokurt_lepto_pos",
    "cokurt_platy_pos",
    "cokurt_neg",
    "outlier_contaminated",
]

# kind -> (tail centers in sigma units, distance, tail spread, default weight)
_MIXTURES: dict[str, tuple[tuple[tuple[int, int], ...], float, float, float]] = {
    "coskew_left_pos": (((-1, 1),), 4.0, 0.5, 0.05),
    "coskew_right_pos": (((1, 1),), 4.0, 0.5, 0.05),
    "coskew_neg": (((-1, -1), (1, -1)), 4.0, 0.5, 0.05),
    "cokurt_lepto_pos": (((1, 1), (-1, -1)), 4.0, 0.5, 0.05),
    "cokurt_platy_pos": (((1, 1), (-1, 1), (1, -1), (-1, -1)), 1.5, 0.3, 0.30),
    "cokurt_neg": (((1, 0), (-1, 0), (0, 1), (0, -1)), 4.0, 0.5, 0.10),
    "outlier_contaminated": (((0, 0),), 0.0, 6.0, 0.05),
}
KINDS: tuple[str, ...] = ("bivariate_normal", *_MIXTURES)


@dataclass(frozen=True)
class GeneratorSpec:
    kind: Kind = "bivariate_normal"
    n: int = 1000
    sigma_x: float = 1.0
    sigma_y: float = 1.0
    rho: float = 0.0
    # None selects the kind's default tail weight
    contamination: float | None = None
    seed: int = 0

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise DataError(f"unknown generator kind {self.kind!r}")
        if self.n < 2:
            raise DataError("n must be at least 2")
        if not (self.sigma_x > 0 and self.sigma_y > 0):
            raise DataError("sigma_x and sigma_y must be positive")
        if not -1.0 < self.rho < 1.0:
            raise DataError("rho must lie strictly inside (-1, 1)")
        if self.contamination is not None and not 0.0 <= self.contamination <= 0.5:
            raise DataError("contamination must lie in [0, 0.5]")
        if not 0 <= self.seed < 2**64:
            raise DataError("seed must be a 64-bit unsigned integer")

    @property
    def weight(self) -> float:
        if self.kind == "bivariate_normal":
            return 0.0
        if self.contamination is not None:
            return self.contamination
        return _MIXTURES[self.kind][3]


def _uniforms(rng: np.random.Generator, size: int) -> np.ndarray:
    return rng.random(size)


def _normals(rng: np.random.Generator, size: int) -> np.ndarray:
    """Box-Muller pairs from 2*ceil(size/2) uniforms, in stream order."""
    m = (size + 1) // 2
    u = _uniforms(rng, 2 * m)
    u1, u2 = 1.0 - u[0::2], u[1::2]  # u1 in (0, 1] keeps the log finite
    r = np.sqrt(-2.0 * np.log(u1))
    z = np.empty(2 * m)
    z[0::2] = r * np.cos(2.0 * np.pi * u2)
    z[1::2] = r * np.sin(2.0 * np.pi * u2)
    return z[:size]


def generate(spec: GeneratorSpec) -> BivariatePairs:
    """Draw ``spec.n`` centered pairs.

    Stream layout: ``n`` uniforms choose the mixture component, then
    ``2n`` standard normals (market noise, idiosyncratic noise) for the
    dominant component and ``2n`` more for the tail components. Every
    kind consumes the same layout, so only the mixing differs.
    """
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    n, sx, sy, rho = spec.n, spec.sigma_x, spec.sigma_y, spec.rho
    pick = _uniforms(rng, n)
    z = _normals(rng, 2 * n)
    t = _normals(rng, 2 * n)

    x = sx * z[:n]
    y = sy * (rho * z[:n] + np.sqrt(1.0 - rho * rho) * z[n:])

    if spec.kind != "bivariate_normal":
        centers, dist, spread, _ = _MIXTURES[spec.kind]
        w = spec.weight
        if w > 0:
            # tail component k owns selector values in [k*w/K, (k+1)*w/K)
            comp = np.floor(np.minimum(pick / w, 1.0) * len(centers)).astype(int)
            for k, (i, j) in enumerate(centers):
                sel = comp == k
                x[sel] = sx * (i * dist + spread * t[:n][sel])
                y[sel] = sy * (j * dist + spread * t[n:][sel])

    return BivariatePairs(_center(x), _center(y), "y", "x")


def _exact_loss(ms: MomentSet):
    """Quartic loss evaluated in rational arithmetic on the float moments."""
    m40, m31, m22, m13, m04 = (
        Fraction(v) for v in (ms.mu40, ms.mu31, ms.mu22, ms.mu13, ms.mu04)
    )

    def loss(b: float) -> Fraction:
        b = Fraction(b)
        return (((m40 * b - 4 * m31) * b + 6 * m22) * b - 4 * m13) * b + m04

    return loss


def oracle_grid_min(
    ms: MomentSet,
    center: float,
    half_width: float,
    coarse_step: float,
    tol: float = 1e-9,
) -> float:
    """Brute-force minimizer of the quartic loss.

    Scans ``[center - half_width, center + half_width]`` at ``coarse_step``,
    then narrows the best cell and its two neighbours by ternary section
    until the bracket is narrower than ``tol``.

    The scan uses floats. Near a flat minimum the expanded polynomial
    cancels badly in floating point, so the grid minimum is confirmed by
    exact (rational) evaluation, stepping to a neighbour while it is lower,
    and the ternary section compares exact values too.
    """
    if not (half_width > 0 and coarse_step > 0):
        raise DataError("half_width and coarse_step must be positive")
    k = int(np.floor(2.0 * half_width / coarse_step + 1e-9))
    grid = center - half_width + coarse_step * np.arange(k + 1)
    loss = _exact_loss(ms)

    best = int(np.argmin(quartic_loss(ms, grid)))
    here = loss(grid[best])
    while True:
        moved = False
        for nb in (best - 1, best + 1):
            if 0 <= nb <= k and (v := loss(grid[nb])) < here:
                best, here, moved = nb, v, True
                break
        if not moved:
            break

    lo = float(grid[max(best - 1, 0)])
    hi = float(grid[min(best + 1, k)])
    while hi - lo > tol:
        m1 = lo + (hi - lo) / 3.0
        m2 = hi - (hi - lo) / 3.0
        if loss(m1) <= loss(m2):
            hi = m2
        else:
            lo = m1
    return 0.5 * (lo + hi)
