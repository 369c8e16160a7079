import csv
import io
import json
import math
import random
from fractions import Fraction

import pytest

from oracles import census_csv, legendre
from seacount.arith import DomainError, omega_L
from seacount.census import (CSV_COLUMNS, aggregates_json, bad_pair_fraction, census_run,
                             classify_from_trace, csv_text, fq_histogram, moment_statistic)
from seacount.sea import Kind, classify_prime


@pytest.fixture(scope="module")
def rep1009_50():
    return census_run(1009, 50)


@pytest.fixture(scope="module")
def rep1009_20():
    return census_run(1009, 20)


@pytest.mark.parametrize("t, q, ell, kind", [(-3, 5, 3, "elkies"), (-3, 5, 7, "atkin")])
def test_classify_examples(t, q, ell, kind):
    assert classify_from_trace(t, q, ell) == kind


def test_classify_zero_trace():
    for q in (101, 1009, 10007):
        for ell in (3, 5, 7, 11, 13):
            if legendre(-4 * q, ell) == 1:
                assert classify_from_trace(0, q, ell) == "elkies"


def test_classify_ramified_is_elkies():
    # t^2 - 4q = 4 - 4*7 = -24, divisible by 3
    assert classify_from_trace(2, 7, 3) == "elkies"


def test_classify_rejects():
    with pytest.raises(DomainError):
        classify_from_trace(1, 15, 5)
    with pytest.raises(DomainError):
        classify_from_trace(1, 7, 2)


def test_q13_matches_brute_force_orbits():
    assert csv_text(census_run(13, 3)) == census_csv(13, 3)


@pytest.mark.parametrize("q, L", [(17, 5), (29, 4), (31, 7)])
def test_small_censuses_match_brute_force(q, L):
    assert csv_text(census_run(q, L)) == census_csv(q, L)


def test_csv_header_and_parse(rep1009_20):
    rows = list(csv.DictReader(io.StringIO(csv_text(rep1009_20))))
    assert tuple(rows[0].keys()) == CSV_COLUMNS
    assert len(rows) == rep1009_20.classes


def test_partition_and_weights(rep1009_50):
    rep = rep1009_50
    assert rep.window == [53, 59, 61, 67, 71, 73, 79, 83, 89, 97]
    n = len(rep.window)
    for r in rep.rows:
        assert r.n_atkin + (r.n_elkies - r.n_ramified) + r.n_ramified == n
        assert 0 <= r.n_ramified <= r.n_elkies
    assert rep.total_weight() == 1009 * 1008


def test_window_excludes_divisors_of_q():
    rep = census_run(53, 30)
    assert 53 not in rep.window and rep.excluded == [53]


def test_omega_matches_divisor_count(rep1009_50):
    for r in rep1009_50.rows:
        t = r.record.trace
        assert r.omega == omega_L(4 * 1009 - t * t, 50)
        assert r.n_ramified == sum(1 for ell in rep1009_50.window if (t * t - 4 * 1009) % ell == 0)


def test_histogram(rep1009_50):
    f = fq_histogram(rep1009_50)
    assert sum(f.values()) == rep1009_50.classes
    assert all(t * t <= 4 * 1009 for t in f)
    assert all(f[t] == f.get(-t) for t in f if t)


def test_histogram_symmetry_q13():
    f = fq_histogram(census_run(13, 3))
    assert all(f[t] == f.get(-t) for t in f if t)


def test_weighted_mean_1009(rep1009_50):
    assert 4.0 <= rep1009_50.mean_elkies(weighted=True) <= 6.0


@pytest.mark.parametrize("L", [20, 50])
def test_unweighted_mean_near_half_window_1009(L, rep1009_20, rep1009_50):
    rep = rep1009_20 if L == 20 else rep1009_50
    z = (float(rep.mean_elkies()) - float(rep.center)) / rep.stderr_elkies()
    assert abs(z) <= 4


@pytest.mark.parametrize("L", [20, 50])
def test_mean_matches_ramified_corrected_center_10007(L):
    """With ramified levels counted as Elkies the expected mean is the
    half-window plus half the mean number of ramified levels."""
    rep = census_run(10007, L)
    corrected = rep.center + Fraction(sum(r.n_ramified for r in rep.rows), 2 * rep.classes)
    z = (float(rep.mean_elkies()) - float(corrected)) / rep.stderr_elkies()
    assert abs(z) <= 4


def test_moment_examples(rep1009_50):
    m1 = moment_statistic(rep1009_50, 1)
    assert 1.0 <= m1 <= 5.0
    c = rep1009_50.center
    direct = sum((r.n_elkies - c) ** 2 for r in rep1009_50.rows) / Fraction(rep1009_50.classes)
    assert m1 == direct
    assert moment_statistic(rep1009_50, 2) >= m1 ** 2


def test_moment_zero_when_all_at_center(rep1009_20):
    import copy

    rep = copy.copy(rep1009_20)
    rep.rows = [r for r in rep1009_20.rows if r.n_elkies == rep1009_20.center]
    if rep.rows:
        assert moment_statistic(rep, 1) == 0


def test_moment_rejects_nu0(rep1009_20):
    with pytest.raises(DomainError):
        moment_statistic(rep1009_20, 0)


def test_bad_pair_fraction(rep1009_50):
    ba, be = bad_pair_fraction(rep1009_50)
    assert 0 <= ba < 1 and 0 <= be < 1


def test_bad_pair_fraction_empty_window():
    rep = census_run(13, 3)
    rep.window = []
    assert bad_pair_fraction(rep) == (0, 0)


def test_bad_pair_trend_10007():
    lo = bad_pair_fraction(census_run(10007, 100))
    hi = bad_pair_fraction(census_run(10007, 20))
    assert lo[0] <= hi[0] + Fraction(1, 20) and lo[1] <= hi[1] + Fraction(1, 20)


def test_agrees_with_gcd_classification(db, rep1009_50):
    rng = random.Random(1)
    for r in rng.sample(rep1009_50.rows, 50):
        E = r.record.curve
        for ell in rng.sample([l for l in rep1009_50.window if l in db.levels()], 2):
            out = classify_prime(E, ell, db, rng)
            want = classify_from_trace(r.record.trace, 1009, ell)
            if out.kind is Kind.ATKIN:
                assert want == "atkin"
            elif want == "atkin":
                # a rational root for an Atkin level needs a repeated root
                from seacount.modpoly import phi_partials_at
                assert phi_partials_at(db, ell, E.j, out.root, 1009).dy == 0


def test_aggregates_json(rep1009_20):
    d = json.loads(aggregates_json(rep1009_20))
    assert d["schema_version"] == 1 and d["classes"] == rep1009_20.classes
    assert math.isclose(d["mean_elkies"]["value"], float(rep1009_20.mean_elkies()))
    assert set(d["moments"]) == {"1", "2"}


def test_parallel_census_is_identical():
    assert csv_text(census_run(1009, 20, jobs=2)) == csv_text(census_run(1009, 20))


def test_census_domain():
    with pytest.raises(DomainError):
        census_run(15, 5)
    with pytest.raises(DomainError):
        census_run(13, 2)
    with pytest.raises(DomainError):
        census_run(65537 + 2 * 0 + 4, 5)
