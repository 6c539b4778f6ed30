"""Price panel loading and construction of centered (market, asset) pairs."""
from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from os import PathLike
from typing import Literal

import numpy as np

from .errors import DataError

log = logging.getLogger(__name__)

Transform = Literal["levels", "log_returns"]
TRANSFORMS: tuple[str, ...] = ("levels", "log_returns")

DEFAULT_DROP_THRESHOLD = 0.05
MIN_PANEL_ROWS = 5


@dataclass(frozen=True)
class PricePanel:
    """Aligned, fully numeric price series keyed by column name.

    ``columns`` preserves the input header order. ``dropped`` lists the
    columns removed by the loader for having too many missing cells.
    """

    labels: tuple[str, ...]
    columns: dict[str, np.ndarray]
    market_name: str
    dropped: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.market_name not in self.columns:
            raise DataError(f"market column {self.market_name!r} not in panel")
        n = len(self.labels)
        for name, values in self.columns.items():
            if len(values) != n:
                raise DataError(
                    f"column {name!r} has {len(values)} values, expected {n}"
                )
            if not np.all(np.isfinite(values)):
                raise DataError(f"column {name!r} contains non-finite values")

    @classmethod
    def from_columns(
        cls,
        columns: dict[str, "np.ndarray | list[float]"],
        market: str,
        labels: "list[str] | None" = None,
    ) -> "PricePanel":
        cols = {k: np.asarray(v, dtype=float) for k, v in columns.items()}
        n = len(next(iter(cols.values()))) if cols else 0
        if labels is None:
            labels = [str(i) for i in range(n)]
        return cls(tuple(labels), cols, market)

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def names(self) -> list[str]:
        return list(self.columns)

    @property
    def assets(self) -> list[str]:
        """Non-market columns, in panel order."""
        return [c for c in self.columns if c != self.market_name]


@dataclass(frozen=True)
class BivariatePairs:
    """Mean-centered market (``x``) and asset (``y``) observations."""

    x: np.ndarray
    y: np.ndarray
    asset_name: str = "y"
    market_name: str = "x"
    n: int = field(init=False)

    def __post_init__(self) -> None:
        if self.x.shape != self.y.shape or self.x.ndim != 1:
            raise DataError("x and y must be 1-d arrays of equal length")
        if len(self.x) < 2:
            raise DataError("at least 2 observations are required")
        object.__setattr__(self, "n", len(self.x))

    @classmethod
    def from_raw(
        cls, x, y, asset_name: str = "y", market_name: str = "x"
    ) -> "BivariatePairs":
        """Center two raw series and wrap them."""
        return cls(center(x), center(y), asset_name, market_name)


def center(values) -> np.ndarray:
    """Subtract the sample mean; a second pass removes residual rounding."""
    v = np.asarray(values, dtype=float)
    if v.size and np.ptp(v) == 0:
        # exact zeros so that degeneracy checks downstream are exact too
        return np.zeros_like(v)
    v = v - v.mean()
    return v - v.mean()


def _parse_cell(cell: str) -> float:
    try:
        value = float(cell)
    except ValueError:
        return math.nan
    return value if math.isfinite(value) else math.nan


def load_panel(
    path: "str | PathLike[str]",
    market: str,
    drop_threshold: float = DEFAULT_DROP_THRESHOLD,
    min_rows: int = MIN_PANEL_ROWS,
) -> PricePanel:
    """Read a wide-format price CSV into a :class:`PricePanel`.

    The first column holds row labels (kept as opaque strings); every other
    column is a numeric series. Empty, non-numeric and non-finite cells are
    missing. A column whose missing fraction exceeds ``drop_threshold`` is
    dropped (and logged); the remaining missing cells remove their whole row
    from every retained column.

    Raises
    ------
    DataError
        If the file is missing or empty, the market column is absent or was
        dropped, no asset column survives, or fewer than ``min_rows``
        complete rows remain.
    """
    if not 0.0 <= drop_threshold <= 1.0:
        raise DataError(f"drop_threshold must lie in [0, 1], got {drop_threshold}")
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = [r for r in csv.reader(fh) if r]
    except FileNotFoundError:
        raise DataError(f"no such file: {path}") from None
    if not rows:
        raise DataError(f"{path}: empty file")

    header, body = rows[0], rows[1:]
    names = [h.strip() for h in header[1:]]
    if len(set(names)) != len(names):
        raise DataError(f"{path}: duplicate column names")
    if market not in names:
        raise DataError(f"market column {market!r} not found in {path}")
    if not body:
        raise DataError(f"{path}: no data rows")

    labels = [r[0] for r in body]
    data = np.full((len(body), len(names)), np.nan)
    for i, r in enumerate(body):
        for j, cell in enumerate(r[1 : len(names) + 1]):
            data[i, j] = _parse_cell(cell.strip())

    missing_frac = np.isnan(data).mean(axis=0)
    keep = missing_frac <= drop_threshold
    dropped = tuple(nm for nm, k in zip(names, keep) if not k)
    if dropped:
        log.info("dropping incomplete columns: %s", ", ".join(dropped))
    if market in dropped:
        raise DataError(
            f"market column {market!r} dropped: "
            f"{missing_frac[names.index(market)]:.1%} missing"
        )

    data = data[:, keep]
    kept = [nm for nm, k in zip(names, keep) if k]
    if len(kept) < 2:
        raise DataError("panel needs the market column and at least one asset")
    complete = ~np.isnan(data).any(axis=1)
    if complete.sum() < min_rows:
        raise DataError(
            f"only {int(complete.sum())} complete rows, need at least {min_rows}"
        )
    data = data[complete]
    labels = [lab for lab, c in zip(labels, complete) if c]
    columns = {nm: data[:, j].copy() for j, nm in enumerate(kept)}
    return PricePanel(tuple(labels), columns, market, dropped)


def transform_series(values, transform: Transform = "levels") -> np.ndarray:
    """Apply the price transform: identity, or log(p_t / p_{t-1})."""
    v = np.asarray(values, dtype=float)
    if transform == "levels":
        return v
    if transform == "log_returns":
        if np.any(v <= 0):
            raise DataError("log_returns requires strictly positive prices")
        return np.diff(np.log(v))
    raise DataError(f"unknown transform {transform!r}; choose from {TRANSFORMS}")


def make_pairs(
    panel: PricePanel, asset: str, transform: Transform = "levels"
) -> BivariatePairs:
    """Build centered (market, asset) pairs from a panel column."""
    if asset not in panel.columns:
        raise DataError(f"asset column {asset!r} not in panel")
    if asset == panel.market_name:
        raise DataError("asset must differ from the market column")
    x = transform_series(panel.columns[panel.market_name], transform)
    y = transform_series(panel.columns[asset], transform)
    return BivariatePairs(center(x), center(y), asset, panel.market_name)
