import math
import random

import pytest

from oracles import count_points, legendre
from seacount.arith import prime_list
from seacount.curve import CurveModel, division_polynomial, naive_count
from seacount.poly import Poly, poly_rem
from seacount.sea import (Kind, SeaOptions, Status, classify_prime, eigenvalue, elkies_kernel,
                          sea_count, supersingular_test, torsion_eigenvalue)


def random_curve(rng, lo, hi):
    primes = [q for q in prime_list(hi) if q >= lo]
    while True:
        p = rng.choice(primes)
        a, b = rng.randrange(p), rng.randrange(p)
        if (4 * a ** 3 + 27 * b * b) % p:
            return p, a, b


def test_count_example():
    res = sea_count(5, 1, 1)
    assert res.status is Status.COUNTED and res.N == 9 and res.trace == -3


def test_singular():
    res = sea_count(7, 0, 0)
    assert res.status is Status.SINGULAR and res.N == 0


def test_carmichael(rng):
    res = sea_count(561, 1, 1, rng=rng)
    assert res.status is Status.COMPOSITE_DETECTED and res.N == 0


def test_small_p_rejected():
    with pytest.raises(ValueError):
        sea_count(3, 1, 1)


@pytest.mark.parametrize("p, a, b, expected", [(5, 0, 1, True), (5, 1, 1, False)])
def test_supersingular_examples(p, a, b, expected, rng):
    assert supersingular_test(CurveModel(p, a, b), rng) is expected


def test_supersingular_shortcut(rng):
    # y^2 = x^3 + b is supersingular for p = 2 mod 3, y^2 = x^3 + a x for p = 3 mod 4
    for p, a, b in ((10007, 0, 5), (65519, 0, 5), (1000037, 0, 5), (1000003, 7, 0)):
        res = sea_count(p, a, b, rng=rng)
        assert res.supersingular and res.N == p + 1 and not res.outcomes


def test_supersingular_detected_whenever_count_is_p_plus_1(rng):
    found = 0
    for p in prime_list(300)[2:]:
        for a in range(0, p, 11):
            for b in range(0, p, 7):
                if (4 * a ** 3 + 27 * b * b) % p == 0:
                    continue
                if count_points(p, a, b) == p + 1:
                    found += 1
                    assert supersingular_test(CurveModel(p, a, b), rng)
                    assert sea_count(p, a, b, rng=rng).supersingular
    assert found > 20


def test_classify_examples(db, rng):
    E = CurveModel(5, 1, 1)
    assert classify_prime(E, 3, db, rng).kind is Kind.ELKIES
    assert classify_prime(E, 7, db, rng).kind is Kind.ATKIN


def test_classification_matches_trace(db):
    """Over p <= 499, l <= 13: Elkies iff t^2 - 4p is a square mod l, outside
    degenerate levels."""
    rng = random.Random(4)
    checked = 0
    for _ in range(150):
        p, a, b = random_curve(rng, 17, 499)
        res = sea_count(p, a, b, rng=rng)
        if res.supersingular:
            continue
        t = p + 1 - count_points(p, a, b)
        for o in res.outcomes:
            if o.ell == 2 or o.ell > 13 or o.kind is Kind.SKIPPED_DEGENERATE:
                continue
            want = Kind.ELKIES if legendre(t * t - 4 * p, o.ell) >= 0 else Kind.ATKIN
            assert o.kind is want, (p, a, b, o.ell)
            checked += 1
    assert checked > 200


def test_two_torsion_level(rng):
    for _ in range(50):
        p, a, b = random_curve(rng, 11, 3000)
        res = sea_count(p, a, b, rng=rng)
        if res.supersingular:
            continue
        two = res.outcomes[0]
        assert two.ell == 2 and two.kind is Kind.ELKIES
        has_root = any((x ** 3 + a * x + b) % p == 0 for x in range(p))
        t = p + 1 - count_points(p, a, b)
        assert two.trace_residue == t % 2 == (0 if has_root else 1)


def test_kernel_for_l3_matches_psi3_roots(db, rng):
    hits = 0
    while hits < 10:
        p, a, b = random_curve(rng, 101, 5000)
        E = CurveModel(p, a, b)
        if a == 0 or b == 0:
            continue
        out = classify_prime(E, 3, db, rng)
        if out.kind is not Kind.ELKIES:
            continue
        try:
            h, _, _ = elkies_kernel(E, 3, out.root, db)
        except ArithmeticError:
            continue
        assert h.deg() == 1
        x0 = (-h.c[0]) % p
        psi3 = division_polynomial(E, 3)
        assert psi3(x0) == 0
        hits += 1


def test_kernel_divides_psi_and_trace_residues(db):
    rng = random.Random(8)
    levels = 0
    for _ in range(60):
        p, a, b = random_curve(rng, 29, 4096)
        res = sea_count(p, a, b, rng=rng)
        assert res.status is Status.COUNTED
        t = p + 1 - count_points(p, a, b)
        for o in res.outcomes:
            if o.kind is not Kind.ELKIES or o.ell == 2:
                continue
            assert o.kernel.deg() in ((o.ell - 1) // 2, (o.ell * o.ell - 1) // 2) or \
                o.method == "torsion"
            psi = division_polynomial(CurveModel(p, a, b), o.ell)
            assert poly_rem(psi, o.kernel).is_zero()
            assert (t - o.trace_residue) % o.ell == 0
            lam = o.eigenvalue
            assert 1 <= lam < o.ell
            mu = p * pow(lam, -1, o.ell) % o.ell
            assert lam * mu % o.ell == p % o.ell
            levels += 1
    assert levels > 50


def test_kernel_degree(db, rng):
    found = 0
    while found < 15:
        p, a, b = random_curve(rng, 200, 20000)
        E = CurveModel(p, a, b)
        ell = rng.choice([5, 7, 11, 13])
        out = classify_prime(E, ell, db, rng)
        if out.kind is not Kind.ELKIES:
            continue
        try:
            h, at, bt = elkies_kernel(E, ell, out.root, db)
        except ArithmeticError:
            continue
        assert h.deg() == (ell - 1) // 2 and h.lead() == 1
        assert CurveModel(p, at, bt).j == out.root % p
        lam = eigenvalue(E, ell, h)
        t = p + 1 - naive_count(E)
        assert lam is not None and (lam + p * pow(lam, -1, ell) - t) % ell == 0
        found += 1


def test_torsion_eigenvalue_atkin_returns_none(rng):
    hits = 0
    while hits < 5:
        p, a, b = random_curve(rng, 100, 2000)
        t = p + 1 - count_points(p, a, b)
        if legendre(t * t - 4 * p, 5) == -1:
            assert torsion_eigenvalue(CurveModel(p, a, b), 5) is None
            hits += 1


def test_oracle_equivalence_small_fields():
    """Every nonsingular curve over a few small fields, where degenerate levels
    are most common."""
    rng = random.Random(2)
    for p in (5, 7, 11, 13, 53):
        for a in range(p):
            for b in range(p):
                if (4 * a ** 3 + 27 * b * b) % p == 0:
                    continue
                res = sea_count(p, a, b, rng=rng)
                assert res.status is Status.COUNTED and res.N == count_points(p, a, b), (p, a, b)


def test_oracle_equivalence_random():
    rng = random.Random(99)
    for _ in range(100):
        p, a, b = random_curve(rng, 5, 1 << 16)
        res = sea_count(p, a, b, rng=rng)
        assert res.status is Status.COUNTED
        assert res.N == naive_count(CurveModel(p, a, b))
        if not res.supersingular:
            assert res.modulus ** 2 > 16 * p
        assert res.trace ** 2 <= 4 * p


def test_heegner_discriminant_curve():
    # t^2 - 4p = -163 is a non-residue mod every prime below 41
    res = sea_count(53, 1, 8)
    assert res.status is Status.COUNTED and res.N == 53 + 1 + 7


def test_j_zero_and_1728(rng):
    for p in (10009, 10037, 65537):
        for a, b in ((0, 3), (5, 0)):
            res = sea_count(p, a, b, rng=rng)
            assert res.N == naive_count(CurveModel(p, a, b))


def test_larger_field(rng):
    p = 1000003
    res = sea_count(p, 12345, 67890, rng=rng)
    assert res.N == naive_count(CurveModel(p, 12345, 67890))


def test_product_of_primes_composite():
    r = random.Random(7)
    primes16 = [q for q in prime_list(1 << 16) if q >= 1 << 15]
    for _ in range(20):
        n = r.choice(primes16) * r.choice(primes16)
        res = sea_count(n, r.randrange(n), r.randrange(n), rng=r)
        assert res.status is Status.COMPOSITE_DETECTED


def test_early_abort(rng):
    seen = 0
    for _ in range(200):
        p, a, b = random_curve(rng, 1 << 12, 1 << 16)
        res = sea_count(p, a, b, SeaOptions(early_abort=True), rng)
        if res.status is Status.ABORT_COMPOSITE_ORDER:
            N = naive_count(CurveModel(p, a, b))
            ell = res.outcomes[-1].ell
            assert N % ell == 0 and N > ell
            seen += 1
        else:
            assert res.status is Status.COUNTED
    assert seen > 10


def test_database_exhausted(tmp_path, db):
    from seacount.modpoly import ModPolyDB, format_record

    for ell in (2, 3, 5):
        (tmp_path / f"phi_{ell}.txt").write_text(format_record(db.get(ell)))
    small = ModPolyDB(str(tmp_path))
    res = sea_count(1000003, 12345, 67890, SeaOptions(db=small), random.Random(1))
    assert res.status is Status.DATABASE_EXHAUSTED and res.N == 0


def test_as_dict_ledger():
    d = sea_count(10007, 3, 4).as_dict()
    assert d["status"] == "counted" and d["outcomes"][0]["ell"] == 2
    assert all("kind" in o for o in d["outcomes"])


def test_deterministic_given_seed():
    r1 = sea_count(65537, 11, 13, rng=random.Random(5)).as_dict()
    r2 = sea_count(65537, 11, 13, rng=random.Random(5)).as_dict()
    assert r1 == r2


def test_kernel_eigen_consistency_math():
    p, ell = 101, 7
    for lam in range(1, ell):
        mu = p * pow(lam, -1, ell) % ell
        assert (lam * mu - p) % ell == 0
    assert math.gcd(p, ell) == 1
    assert Poly(p, [1]).deg() == 0
