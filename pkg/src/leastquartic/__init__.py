"""Least-quartic regression slopes, bivariate co-moments and CAPM-style risk tables."""
from .capm import (
    AnalysisOptions,
    AssetRow,
    RankingTable,
    Report,
    analyze_asset,
    build_report,
    delta_pct,
    rank_assets,
)
from .errors import DataError, DegenerateError, LQError
from .moments import (
    CoMomentReport,
    MomentSet,
    SummaryStats,
    comoment_report,
    compute_moments,
    gaussian_moments,
    moments_of,
    summary_stats,
)
from .sample import BivariatePairs, PricePanel, load_panel, make_pairs
from .solver import (
    CubicCoeffs,
    QuarticFit,
    TheilSen,
    closed_form_lq,
    fit_lq,
    fit_ls,
    fit_theil_sen,
    foc_cubic,
    quartic_loss,
    real_roots,
    solve_cubic,
)
from .synth import GeneratorSpec, generate, oracle_grid_min

__version__ = "0.1.0"
