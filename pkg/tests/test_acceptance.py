"""Exit criteria, one test per criterion, each at its stated tolerance and time budget.

A pass/fail line per criterion is printed in the "acceptance criteria"
section of the pytest terminal summary.
"""
import time

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from leastquartic import tables
from leastquartic.capm import build_report, delta_pct
from leastquartic.moments import comoment_report, compute_moments, gaussian_moments
from leastquartic.sample import BivariatePairs, PricePanel
from leastquartic.solver import fit_lq, fit_ls, quartic_loss
from leastquartic.synth import KINDS, GeneratorSpec, generate, oracle_grid_min


def instances(count, seed, n_range=(20, 500)):
    rng = np.random.default_rng(seed)
    for k in range(count):
        spec = GeneratorSpec(
            kind=KINDS[k % len(KINDS)],
            n=int(rng.integers(*n_range, endpoint=True)),
            sigma_x=float(rng.uniform(0.2, 5.0)),
            sigma_y=float(rng.uniform(0.2, 5.0)),
            rho=float(rng.uniform(-0.95, 0.95)),
            seed=int(rng.integers(2**63)),
        )
        yield generate(spec)


class Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start


@pytest.mark.acceptance("AC1 delta formula on reference rows (+-0.05 pp)")
def test_ac1_delta_formula():
    assert delta_pct(1.625, 1.051) == pytest.approx(-35.32, abs=0.05)
    assert delta_pct(14.936, 15.568) == pytest.approx(4.23, abs=0.05)


@pytest.mark.acceptance("AC2 Gaussian population reduction (residual<=1e-12, error<=1e-10, <1 s)")
def test_ac2_gaussian_population():
    sigmas = (0.5, 1.0, 2.0)
    rhos = (-0.9, -0.5, 0.0, 0.5, 0.9)
    with Timer() as t:
        # every (sigma_x, sigma_y) combination: a superset of the 15-point grid
        for sx in sigmas:
            for sy in sigmas:
                for rho in rhos:
                    fit = fit_lq(gaussian_moments(sx, sy, rho))
                    assert abs(fit.b_lq - rho * sy / sx) <= 1e-10, (sx, sy, rho)
                    assert fit.residual_foc <= 1e-12, (sx, sy, rho)
    assert t.elapsed < 1.0


@pytest.mark.acceptance("AC3 sampled Gaussian reduction n=200000 rho=0.6 (+-0.02, <5 s)")
def test_ac3_sampled_gaussian():
    with Timer() as t:
        pairs = generate(GeneratorSpec(n=200_000, rho=0.6, seed=20240601))
        ms = compute_moments(pairs)
        b_ls = fit_ls(ms)
        b_lq = fit_lq(ms, pairs).b_lq
    assert abs(b_lq - b_ls) <= 0.02
    assert abs(b_ls - 0.6) <= 0.02
    assert t.elapsed < 5.0


@pytest.mark.acceptance("AC4 oracle equivalence, 1000 instances (<=1e-6, <60 s)")
def test_ac4_oracle_equivalence():
    failures = []
    with Timer() as t:
        for k, pairs in enumerate(instances(1000, seed=4)):
            ms = compute_moments(pairs)
            b0 = fit_ls(ms)
            s = max(1.0, abs(b0))
            oracle = oracle_grid_min(ms, b0, 10 * s, 1e-3)
            b_lq = fit_lq(ms).b_lq
            if not abs(b_lq - oracle) <= 1e-6:
                failures.append((k, b_lq, oracle))
    assert failures == []
    assert t.elapsed < 60.0


@pytest.mark.acceptance("AC5 global-minimum certificate, 200 x 10000 (<30 s)")
def test_ac5_global_minimum():
    rng = np.random.default_rng(5)
    with Timer() as t:
        for pairs in instances(200, seed=55):
            ms = compute_moments(pairs)
            b_lq = fit_lq(ms).b_lq
            b_ls = fit_ls(ms)
            at_min = quartic_loss(ms, b_lq)
            spread = 10 * max(1.0, abs(b_ls))
            probes = b_ls + rng.uniform(-spread, spread, 10_000)
            assert np.all(at_min <= quartic_loss(ms, probes))
            assert at_min <= quartic_loss(ms, b_ls)
    assert t.elapsed < 30.0


@pytest.mark.acceptance("AC6 scale equivariance a,c in {0.01,1,100} (<=1e-9 rel, <5 s)")
def test_ac6_scale_equivariance():
    factors = (0.01, 1.0, 100.0)
    rng = np.random.default_rng(6)
    with Timer() as t:
        for pairs in instances(100, seed=66):
            a, c = (float(v) for v in rng.choice(factors, 2))
            base = fit_lq(compute_moments(pairs)).b_lq
            scaled = BivariatePairs(a * pairs.x, c * pairs.y)
            b = fit_lq(compute_moments(scaled)).b_lq
            assert abs(b - c / a * base) <= 1e-9 * max(1.0, abs(base) * c / a)
    assert t.elapsed < 5.0


@pytest.mark.acceptance("AC7 perfect-fit recovery y=3.7x n=101 (+-1e-9, loss<=1e-18)")
def test_ac7_perfect_fit():
    x = np.linspace(-2.0, 3.0, 101)
    pairs = BivariatePairs.from_raw(x, 3.7 * x)
    fit = fit_lq(compute_moments(pairs), pairs)
    assert abs(fit.b_lq - 3.7) <= 1e-9
    assert fit.loss_at_min <= 1e-18


@pytest.mark.acceptance("AC8 hand fixtures: triple root at 2, single root at 0.5")
def test_ac8_hand_fixtures():
    x = np.array([-1.0, 0.0, 1.0])
    for with_pairs in (False, True):
        triple = BivariatePairs.from_raw(x, np.array([-2.0, 0.0, 2.0]))
        fit = fit_lq(compute_moments(triple), triple if with_pairs else None)
        assert fit.b_lq == pytest.approx(2.0, abs=1e-12)
        assert fit.multiplicity == 3

        single = BivariatePairs.from_raw(x, np.array([-1.0, 1.0, 0.0]))
        fit = fit_lq(compute_moments(single), single if with_pairs else None)
        assert fit.b_lq == pytest.approx(0.5, abs=1e-12)
        assert fit.n_real_roots == 1


_coords = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)
_samples = st.lists(st.tuples(_coords, _coords), min_size=5, max_size=60)


def _spread(points):
    x = np.array([p[0] for p in points])
    y = np.array([p[1] for p in points])
    return np.ptp(x) > 1e-3 and np.ptp(y) > 1e-3


def _report(points, a=1.0, c=1.0):
    x = np.array([p[0] for p in points])
    y = np.array([p[1] for p in points])
    return compute_moments(BivariatePairs.from_raw(a * x, c * y))


@given(_samples.filter(_spread))
@settings(max_examples=300, deadline=None)
def _swap_symmetry(points):
    ms = _report(points)
    sw = ms.swapped()
    for r in range(5):
        for s in range(5 - r):
            if r + s >= 2:
                assert sw.mu(r, s) == ms.mu(s, r)
    x = np.array([p[0] for p in points])
    y = np.array([p[1] for p in points])
    direct = compute_moments(BivariatePairs.from_raw(y, x))
    scale = max(ms.mu40, ms.mu04)
    assert direct.mu31 == pytest.approx(ms.mu13, rel=1e-9, abs=1e-12 * scale)
    assert direct.mu21 == pytest.approx(ms.mu12, rel=1e-9, abs=1e-12 * scale ** 0.75)


@given(_samples.filter(_spread), st.sampled_from([0.01, 0.5, 3.0, 100.0]),
       st.sampled_from([-100.0, -2.0, 0.1, 7.0]))
@settings(max_examples=300, deadline=None)
def _lambda_scale_invariance(points, a, c):
    base = comoment_report(_report(points))
    scaled = comoment_report(_report(points, a, c))
    sign = {(r, s): np.sign(a) ** r * np.sign(c) ** s
            for r, s in ((2, 1), (1, 2), (3, 1), (1, 3), (2, 2))}
    for (r, s), flip in sign.items():
        name = f"lambda{r}{s}"
        assert getattr(scaled, name) == pytest.approx(flip * getattr(base, name),
                                                      rel=1e-7, abs=1e-9)


@given(st.floats(0.01, 100.0), st.floats(0.01, 100.0), st.floats(-0.999, 0.999))
@settings(max_examples=300, deadline=None)
def _gaussian_kappas_vanish(sx, sy, rho):
    rep = comoment_report(gaussian_moments(sx, sy, rho))
    assert rep.kappa13 == pytest.approx(0.0, abs=1e-12 * sx * sy ** 3)
    assert rep.kappa31 == pytest.approx(0.0, abs=1e-12 * sx ** 3 * sy)
    assert rep.kappa22 == pytest.approx(0.0, abs=1e-12 * sx ** 2 * sy ** 2)


@pytest.mark.acceptance("AC9 co-moment identities: swap, lambda scale, Gaussian kappa (<10 s)")
def test_ac9_comoment_identities():
    with Timer() as t:
        _swap_symmetry()
        _lambda_scale_invariance()
        _gaussian_kappas_vanish()
    assert t.elapsed < 10.0


def _synthetic_panel(n_assets=36, n_obs=995, seed=10):
    rng = np.random.default_rng(seed)
    market_ret = generate(GeneratorSpec(n=n_obs, sigma_x=0.01, sigma_y=0.01, seed=seed)).x
    columns = {"market": 100.0 * np.exp(np.cumsum(market_ret))}
    for k in range(n_assets):
        spec = GeneratorSpec(kind=KINDS[k % len(KINDS)], n=n_obs, sigma_x=0.01,
                             sigma_y=float(rng.uniform(0.01, 0.03)),
                             rho=float(rng.uniform(-0.2, 0.9)), seed=seed + k + 1)
        pairs = generate(spec)
        beta = float(rng.uniform(0.2, 1.8))
        ret = beta * market_ret + (pairs.y - spec.rho * spec.sigma_y / spec.sigma_x * pairs.x)
        columns[f"asset{k:02d}"] = 50.0 * np.exp(np.cumsum(ret))
    return PricePanel.from_columns(columns, "market")


def _serialize(report):
    return (tables.to_csv(tables.fit_records(report.rows), tables.FIT_FIELDS)
            + tables.to_csv(tables.comoment_records(report.rows), tables.COMOMENT_FIELDS)
            + tables.to_csv(tables.summary_records(report), tables.SUMMARY_FIELDS))


@pytest.mark.acceptance("AC10 build_report on 36 x 995 panel (<1 s, byte-deterministic)")
def test_ac10_pipeline_throughput():
    panel = _synthetic_panel()
    with Timer() as t:
        first = build_report(panel)
    assert t.elapsed < 1.0
    second = build_report(panel)

    assert len(first.rows) == 36 and all(r.ok for r in first.rows)
    assert _serialize(first).encode() == _serialize(second).encode()
