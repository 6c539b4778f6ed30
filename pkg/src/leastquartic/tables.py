"""Record building and deterministic CSV / JSON serialization of result tables.

Floats are written with 6 significant digits (``'#.6g'``), independent of
locale; non-finite values become an empty CSV cell or JSON ``null``.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict
from typing import Any, Iterable, Sequence

import numpy as np

from .capm import AssetRow, RankingTable, Report
from .sample import BivariatePairs

Record = dict[str, Any]

SUMMARY_FIELDS = ("series", "n", "mean", "variance", "st_dev", "cv", "mean_negative",
                  "skewness", "excess_kurtosis", "z_skew", "z_kurt", "error")
COMOMENT_FIELDS = ("asset", "rho", "lambda21", "lambda12", "lambda31", "lambda13",
                   "lambda22", "sys_coskew", "sys_cokurt", "kappa13", "kappa31",
                   "kappa22", "sys_coskew_defined", "sys_cokurt_defined", "error")
FIT_FIELDS = ("asset", "n", "corr", "lambda12", "lambda21", "lambda13", "lambda22",
              "lambda31", "b_ls", "b_lq", "b_ts", "delta_pct", "delta_defined",
              "flags", "error")
RANK_FIELDS = ("rank", "asset", "slope")
CURVE_FIELDS = ("b", "loss")
PAIR_FIELDS = ("x", "y")


def format_float(v: float) -> str:
    if v is None or not math.isfinite(v):
        return ""
    s = format(float(v), "#.6g")
    if s.startswith("-") and float(s) == 0.0:
        s = s[1:]
    return s


def _cell(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format_float(float(v))
    return str(v)


def _json_value(v: Any) -> Any:
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        s = format_float(float(v))
        return float(s) if s else None
    if v == "":
        return None
    return v


def to_csv(records: Iterable[Record], fields: Sequence[str]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(fields)
    for rec in records:
        writer.writerow([_cell(rec.get(f)) for f in fields])
    return buf.getvalue()


def to_json(records: Iterable[Record], fields: Sequence[str]) -> str:
    rows = [{f: _json_value(rec.get(f)) for f in fields} for rec in records]
    return json.dumps(rows, indent=2) + "\n"


def render(records: Iterable[Record], fields: Sequence[str], fmt: str = "csv") -> str:
    if fmt == "csv":
        return to_csv(records, fields)
    if fmt == "json":
        return to_json(records, fields)
    raise ValueError(f"unknown format {fmt!r}")


def summary_records(report: Report) -> list[Record]:
    out = []
    for name, stats in report.summaries.items():
        if stats is None:
            out.append({"series": name, "error": "statistics undefined"})
            continue
        rec = asdict(stats)
        rec["series"] = name
        out.append(rec)
    return out


def comoment_records(rows: Iterable[AssetRow]) -> list[Record]:
    out = []
    for row in rows:
        rec: Record = {"asset": row.asset_name, "error": row.error}
        if row.comoments is not None:
            rec.update(asdict(row.comoments))
        out.append(rec)
    return out


def fit_records(rows: Iterable[AssetRow]) -> list[Record]:
    out = []
    for row in rows:
        rec = {f: getattr(row, f) for f in FIT_FIELDS if f not in ("asset", "flags")}
        rec["asset"] = row.asset_name
        rec["flags"] = ";".join(row.flags)
        out.append(rec)
    return out


def rank_records(table: RankingTable) -> list[Record]:
    return [{"rank": e.rank, "asset": e.asset_name, "slope": e.slope}
            for e in table.entries]


def curve_records(b_values, losses) -> list[Record]:
    return [{"b": float(b), "loss": float(l)} for b, l in zip(b_values, losses)]


def pair_records(pairs: BivariatePairs) -> list[Record]:
    return [{"x": float(x), "y": float(y)} for x, y in zip(pairs.x, pairs.y)]
