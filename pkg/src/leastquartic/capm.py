"""Batch systematic-risk analysis of every asset in a panel against its market."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

from .errors import DataError, DegenerateError, LQError
from .moments import CoMomentReport, SummaryStats, comoment_report, compute_moments, summary_stats
from .sample import PricePanel, Transform, center, make_pairs, transform_series
from .solver import TheilSen, fit_lq, fit_ls

Criterion = Literal["ls", "lq", "ts"]
CRITERIA: tuple[str, ...] = ("ls", "lq", "ts")

DELTA_RTOL = 1e-12


@dataclass(frozen=True)
class AnalysisOptions:
    transform: Transform = "levels"


@dataclass(frozen=True)
class AssetRow:
    """One asset's co-moments and slopes.

    Rows for assets that could not be analyzed carry ``error`` and NaN
    numbers instead of aborting the batch.
    """

    asset_name: str
    n: int
    corr: float
    lambda12: float
    lambda21: float
    lambda13: float
    lambda22: float
    lambda31: float
    b_ls: float
    b_lq: float
    b_ts: float
    delta_pct: float
    delta_defined: bool
    flags: tuple[str, ...] = ()
    error: str | None = None
    comoments: CoMomentReport | None = field(default=None, compare=False, repr=False)

    @property
    def ok(self) -> bool:
        return self.error is None

    def slope(self, criterion: Criterion) -> float:
        return {"ls": self.b_ls, "lq": self.b_lq, "ts": self.b_ts}[criterion]

    @classmethod
    def failed(cls, asset: str, n: int, message: str, flags=()) -> "AssetRow":
        nan = math.nan
        return cls(asset, n, nan, nan, nan, nan, nan, nan, nan, nan, nan, nan,
                   False, tuple(flags), message)


def delta_pct(b_ls: float, b_lq: float, scale: float = 1.0,
              abs_base: bool = False) -> float:
    """Percentage gap ``(b_lq - b_ls) / b_ls * 100``.

    For positive ``b_ls``, positive values mean the least-squares slope
    understates systematic risk relative to the least-quartic one.
    ``abs_base=True`` divides by ``|b_ls|`` instead, which keeps that
    reading when ``b_ls < 0`` (useful when comparing against tables
    that report sign-flipping assets with positive gaps).

    Raises
    ------
    DegenerateError
        If ``|b_ls| <= 1e-12 * scale``.
    """
    if not abs(b_ls) > DELTA_RTOL * scale:
        raise DegenerateError("least-squares slope is zero: relative gap undefined")
    base = abs(b_ls) if abs_base else b_ls
    return (b_lq - b_ls) / base * 100.0


def _analyze(panel: PricePanel, asset: str, options: AnalysisOptions,
             theil_sen: TheilSen | None = None) -> AssetRow:
    n = panel.n
    try:
        pairs = make_pairs(panel, asset, options.transform)
        n = pairs.n
        ms = compute_moments(pairs)
        if ms.degenerate:
            return AssetRow.failed(asset, n, "zero variance series", ("degenerate",))
        report = comoment_report(ms)
        b_ls = fit_ls(ms)
        lq = fit_lq(ms, pairs)
        ts = theil_sen if theil_sen is not None else TheilSen(pairs.x)
        b_ts = ts.slope(pairs.y)
    except DegenerateError as exc:
        return AssetRow.failed(asset, n, str(exc), ("degenerate",))
    except LQError as exc:
        return AssetRow.failed(asset, n, str(exc))

    flags = []
    if not (report.sys_coskew_defined and report.sys_cokurt_defined):
        flags.append("sys_ratio_undefined")
    if lq.n_real_roots > 1:
        flags.append("three_roots")
    try:
        delta, delta_ok = delta_pct(b_ls, lq.b_lq, ms.sigma_y / ms.sigma_x), True
    except DegenerateError:
        delta, delta_ok = math.nan, False

    return AssetRow(
        asset_name=asset,
        n=n,
        corr=report.rho,
        lambda12=report.lambda12,
        lambda21=report.lambda21,
        lambda13=report.lambda13,
        lambda22=report.lambda22,
        lambda31=report.lambda31,
        b_ls=b_ls,
        b_lq=lq.b_lq,
        b_ts=b_ts,
        delta_pct=delta,
        delta_defined=delta_ok,
        flags=tuple(flags),
        comoments=report,
    )


def analyze_asset(panel: PricePanel, asset: str,
                  options: AnalysisOptions | None = None) -> AssetRow:
    """Co-moments plus LS, LQ and Theil-Sen slopes for one asset.

    Failures (degenerate series, bad prices under log returns) come back
    as an error row; only an unknown asset name raises.
    """
    if asset not in panel.columns:
        raise DataError(f"asset column {asset!r} not in panel")
    return _analyze(panel, asset, options or AnalysisOptions())


@dataclass(frozen=True)
class RankEntry:
    rank: int
    asset_name: str
    slope: float


@dataclass(frozen=True)
class RankingTable:
    criterion: Criterion
    entries: tuple[RankEntry, ...]


def rank_assets(rows: list[AssetRow], criterion: Criterion = "lq",
                top_n: int = 10) -> RankingTable:
    """Top ``top_n`` assets by slope, descending; ties go to the smaller name."""
    if criterion not in CRITERIA:
        raise DataError(f"unknown ranking criterion {criterion!r}")
    if not rows:
        raise DataError("nothing to rank")
    if top_n < 1:
        raise DataError("top_n must be positive")
    valid = [r for r in rows if r.ok and math.isfinite(r.slope(criterion))]
    if not valid:
        raise DegenerateError("every asset failed: nothing to rank")
    valid.sort(key=lambda r: (-r.slope(criterion), r.asset_name))
    entries = tuple(
        RankEntry(k, r.asset_name, r.slope(criterion))
        for k, r in enumerate(valid[:top_n], start=1)
    )
    return RankingTable(criterion, entries)


@dataclass(frozen=True)
class Report:
    """Per-asset rows plus summary statistics for every panel column.

    ``summaries`` follows panel order (market included); ``None`` marks a
    series whose statistics are undefined.
    """

    market_name: str
    rows: list[AssetRow]
    summaries: dict[str, SummaryStats | None]

    @property
    def market_stats(self) -> SummaryStats | None:
        return self.summaries[self.market_name]


def _summary_or_none(values) -> SummaryStats | None:
    try:
        return summary_stats(values)
    except LQError:
        return None


def build_report(panel: PricePanel, options: AnalysisOptions | None = None) -> Report:
    """Analyze every non-market column of ``panel``, in column order."""
    options = options or AnalysisOptions()
    theil_sen = None
    try:
        market = center(transform_series(panel.columns[panel.market_name], options.transform))
        theil_sen = TheilSen(market)
    except LQError:
        pass  # each row then reports its own failure

    rows = [_analyze(panel, a, options, theil_sen) for a in panel.assets]
    summaries = {}
    for name, values in panel.columns.items():
        try:
            series = transform_series(values, options.transform)
        except LQError:
            summaries[name] = None
            continue
        summaries[name] = _summary_or_none(series)
    return Report(panel.market_name, rows, summaries)
