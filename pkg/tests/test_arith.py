import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import is_prime_td, jacobi_by_factoring, legendre, prime_factors
from seacount.arith import (DomainError, NotInvertible, Verdict, complete_char_sum, crt_signed,
                            incomplete_char_sum, inv_mod, is_prime, isqrt, jacobi,
                            miller_rabin, mod_pow, omega_L, prime_list)

odd_moduli = st.integers(min_value=0, max_value=5000).map(lambda k: 2 * k + 1)


@pytest.mark.parametrize("args, expected", [((2, 10, 1000), 24), ((7, 0, 13), 1),
                                            ((2, 35, 561), 263)])
def test_mod_pow_examples(args, expected):
    assert mod_pow(*args) == expected


def test_mod_pow_oracle():
    # repeated multiplication
    acc = 1
    for _ in range(35):
        acc = acc * 2 % 561
    assert mod_pow(2, 35, 561) == acc


def test_mod_pow_rejects_small_modulus():
    with pytest.raises(DomainError):
        mod_pow(2, 3, 1)


@pytest.mark.parametrize("a, m, expected", [(1, 1, 1), (1, 99, 1), (2, 15, 1), (3, 9, 0)])
def test_jacobi_examples(a, m, expected):
    assert jacobi(a, m) == expected


@given(st.integers(-10**6, 10**6), odd_moduli)
def test_jacobi_matches_factored_euler(a, m):
    assert jacobi(a, m) == jacobi_by_factoring(a, m)


@given(st.integers(-10**4, 10**4), odd_moduli, odd_moduli)
def test_jacobi_multiplicative(a, m1, m2):
    assert jacobi(a, m1 * m2) == jacobi(a, m1) * jacobi(a, m2)


@pytest.mark.parametrize("m", [0, -3, 4])
def test_jacobi_bad_modulus(m):
    with pytest.raises(DomainError):
        jacobi(1, m)


def test_jacobi_is_euler_on_primes():
    for m in prime_list(400)[1:]:
        for a in range(1, m):
            e = pow(a, (m - 1) // 2, m)
            assert jacobi(a, m) == (1 if e == 1 else -1)


def test_miller_rabin_561_base_2():
    assert miller_rabin(561, 1, bases=[2]) is Verdict.COMPOSITE


def test_miller_rabin_prime_never_composite(rng):
    for n in (7, 65537, 2**61 - 1):
        assert miller_rabin(n, 20, rng) is Verdict.PROBABLE_PRIME


def test_miller_rabin_detects_15(rng):
    assert miller_rabin(15, 5, rng) is Verdict.COMPOSITE


def test_miller_rabin_per_round_error_small():
    # a single random round catches 561 far more often than 3/4 of the time
    rng = random.Random(5)
    hits = sum(miller_rabin(561, 1, rng) is Verdict.COMPOSITE for _ in range(400))
    assert hits >= 300


@pytest.mark.parametrize("n, verdict", [(2, Verdict.PROVEN_PRIME), (1, Verdict.COMPOSITE),
                                        (0, Verdict.COMPOSITE),
                                        (2**31 - 1, Verdict.PROVEN_PRIME),
                                        (561, Verdict.COMPOSITE)])
def test_is_prime_examples(n, verdict):
    assert is_prime(n) is verdict


def test_is_prime_against_trial_division():
    sieve = set(prime_list(10**6))
    assert all((is_prime(n) is not Verdict.COMPOSITE) == (n in sieve) for n in range(10**6 + 1))


def test_mersenne_by_trial_division():
    assert is_prime_td(2**31 - 1)


def test_is_prime_above_deterministic_bound():
    big = 2**89 - 1                     # Mersenne prime
    assert is_prime(big) is Verdict.PROBABLE_PRIME
    assert is_prime(big * (2**61 - 1)) is Verdict.COMPOSITE
    # strong pseudoprime to the first 13 prime bases
    assert is_prime(3317044064679887385961981) is Verdict.COMPOSITE


@pytest.mark.parametrize("residues, expected", [([(1, 3), (2, 5)], 7), ([(0, 11)], 0),
                                                ([(2, 3), (3, 5), (2, 7)], 23)])
def test_crt_examples(residues, expected):
    assert crt_signed(residues) == expected


def test_crt_brute_scan():
    M = 105
    want = [t for t in range(-52, 53) if t % 3 == 2 and t % 5 == 3 and t % 7 == 2]
    assert want == [crt_signed([(2, 3), (3, 5), (2, 7)])] and -M / 2 < want[0] <= M / 2


@given(st.lists(st.sampled_from([3, 5, 7, 11, 13, 17, 19, 23]), min_size=1, max_size=6,
                unique=True), st.integers())
def test_crt_window_property(moduli, seed):
    r = random.Random(seed)
    residues = [(r.randrange(m), m) for m in moduli]
    t = crt_signed(residues)
    M = math.prod(moduli)
    assert -M < 2 * t <= M
    assert all((t - rr) % m == 0 for rr, m in residues)


def test_crt_rejects_common_factor():
    with pytest.raises(DomainError):
        crt_signed([(1, 6), (1, 9)])


@pytest.mark.parametrize("n, r", [(0, 0), (99, 9), (10**12, 10**6), (2**200, 2**100)])
def test_isqrt(n, r):
    assert isqrt(n) == r


def test_isqrt_negative():
    with pytest.raises(DomainError):
        isqrt(-1)


def test_inv_mod_exposes_factor():
    with pytest.raises(NotInvertible) as exc:
        inv_mod(6, 15)
    assert exc.value.factor == 3


def _direct_sum(a, m, ts):
    return sum(jacobi_by_factoring(t * t - a, m) for t in ts)


@pytest.mark.parametrize("a, m, expected", [(1, 3, -1), (5, 1, 1)])
def test_complete_char_sum_examples(a, m, expected):
    assert complete_char_sum(a, m) == expected


def test_complete_char_sum_15():
    assert complete_char_sum(2, 15) == _direct_sum(2, 15, range(15))
    assert abs(complete_char_sum(2, 15)) == 1


@pytest.mark.parametrize("a, m", [(3, 15), (1, 9), (1, 4)])
def test_complete_char_sum_domain(a, m):
    with pytest.raises(DomainError):
        complete_char_sum(a, m)


def test_complete_char_sum_sign():
    # each prime factor contributes -1
    for m in (3, 5, 7, 15, 105, 1155, 3 * 5 * 7 * 11 * 13):
        s = len(prime_factors(m))
        for a in (1, 2, 4, 8, 16, 17, 19, 23):
            if math.gcd(a, m) == 1:
                assert complete_char_sum(a, m) == (-1) ** s


@pytest.mark.parametrize("a, m, T, expected", [(1, 3, 1, -1), (7, 1, 5, 11)])
def test_incomplete_char_sum_examples(a, m, T, expected):
    assert incomplete_char_sum(a, m, T) == expected


def test_incomplete_char_sum_oracle():
    val = incomplete_char_sum(1, 15, 15)
    assert val == _direct_sum(1, 15, range(-15, 16)) and abs(val) <= 31


def test_incomplete_full_period():
    # [-T, T] with 2T+1 = m covers every residue once
    for m in (15, 21, 105):
        T = (m - 1) // 2
        assert incomplete_char_sum(2, m, T) == complete_char_sum(2, m)


@pytest.mark.parametrize("n, L, expected", [(77, 5, 1), (1, 5, 0), (2310, 3, 2), (-77, 5, 1)])
def test_omega_L(n, L, expected):
    assert omega_L(n, L) == expected


def test_omega_L_trial_division():
    r = random.Random(3)
    for _ in range(200):
        n = r.randrange(1, 10**7)
        L = r.randrange(3, 200)
        want = sum(1 for q in prime_factors(n) if L <= q <= 2 * L)
        assert omega_L(n, L) == want


def test_omega_L_domain():
    with pytest.raises(DomainError):
        omega_L(0, 5)
    with pytest.raises(DomainError):
        omega_L(5, 2)


@settings(max_examples=50)
@given(st.integers(3, 2000))
def test_legendre_oracle_consistency(p):
    if is_prime_td(p):
        assert all(jacobi(a, p) == legendre(a, p) for a in range(0, p, max(1, p // 50)))
