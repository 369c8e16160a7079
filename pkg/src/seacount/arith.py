"""Integer helpers: modular powers, Jacobi symbols, primality, signed CRT and
the character sums used by the census."""

from __future__ import annotations

import enum
import functools
import math
import random

import numpy as np


class DomainError(ValueError):
    pass


class NotInvertible(ZeroDivisionError):
    """Raised when an element has no inverse modulo m.

    For composite m this usually exposes a proper factor via ``factor``.
    """

    def __init__(self, value: int, modulus: int):
        super().__init__(f"{value} is not invertible modulo {modulus}")
        self.value = value
        self.modulus = modulus

    @property
    def factor(self) -> int:
        return math.gcd(self.value, self.modulus)


class Verdict(enum.Enum):
    COMPOSITE = "composite"
    PROBABLE_PRIME = "probable_prime"
    PROVEN_PRIME = "proven_prime"

    def __bool__(self):
        return self is not Verdict.COMPOSITE


def mod_pow(base: int, exp: int, m: int) -> int:
    if m < 2:
        raise DomainError("modulus must be at least 2")
    if exp < 0:
        raise DomainError("exponent must be nonnegative")
    return pow(base, exp, m)


def inv_mod(x: int, m: int) -> int:
    x %= m
    g = math.gcd(x, m)
    if g != 1:
        raise NotInvertible(x, m)
    return pow(x, -1, m)


def jacobi(a: int, m: int) -> int:
    if m <= 0 or m % 2 == 0:
        raise DomainError("Jacobi symbol needs an odd positive modulus")
    a %= m
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if m % 8 in (3, 5):
                result = -result
        a, m = m, a
        if a % 4 == 3 and m % 4 == 3:
            result = -result
        a %= m
    return result if m == 1 else 0


def isqrt(n: int) -> int:
    if n < 0:
        raise DomainError("square root of a negative number")
    return math.isqrt(n)


# -- primality --------------------------------------------------------------

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
# first 13 prime bases are a deterministic witness set below this bound
DETERMINISTIC_BOUND = 3317044064679887385961981


def _strong_probable_prime(n: int, base: int) -> bool:
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    x = pow(base, d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def miller_rabin(n: int, rounds: int, rng: random.Random | None = None,
                 bases=None) -> Verdict:
    """``rounds`` random-base Miller-Rabin rounds (or the given ``bases``)."""
    if n < 3 or n % 2 == 0:
        raise DomainError("Miller-Rabin needs an odd n >= 3")
    if bases is None:
        if rng is None:
            raise DomainError("random rounds need an rng")
        if n <= 4:
            bases = [2] * rounds
        else:
            bases = [rng.randrange(2, n - 1) for _ in range(rounds)]
    for b in bases:
        if b % n == 0:
            continue
        if not _strong_probable_prime(n, b):
            return Verdict.COMPOSITE
    return Verdict.PROBABLE_PRIME


def _is_square(n: int) -> bool:
    r = math.isqrt(n)
    return r * r == n


def _strong_lucas(n: int) -> bool:
    # Selfridge parameters: first D in 5, -7, 9, -11, ... with (D/n) = -1
    D = 5
    while True:
        j = jacobi(D, n)
        if j == -1:
            break
        if j == 0 and abs(D) != n:
            return False
        D = -D - 2 if D > 0 else -D + 2
    P, Q = 1, (1 - D) // 4
    d, s = n + 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    inv2 = (n + 1) // 2
    U, V, Qk = 1, P, Q % n
    for bit in bin(d)[3:]:
        U, V = U * V % n, (V * V - 2 * Qk) % n
        Qk = Qk * Qk % n
        if bit == "1":
            U, V = (P * U + V) * inv2 % n, (D * U + P * V) * inv2 % n
            Qk = Qk * Q % n
    if U == 0 or V == 0:
        return True
    for _ in range(s - 1):
        V = (V * V - 2 * Qk) % n
        Qk = Qk * Qk % n
        if V == 0:
            return True
    return False


def is_prime(n: int) -> Verdict:
    """Deterministic below ``DETERMINISTIC_BOUND``; BPSW above it.

    No BPSW pseudoprime is known, but the verdict above the bound is only
    ``PROBABLE_PRIME``.
    """
    if n < 2:
        return Verdict.COMPOSITE
    for q in _SMALL_PRIMES:
        if n == q:
            return Verdict.PROVEN_PRIME
        if n % q == 0:
            return Verdict.COMPOSITE
    if n < 43 * 43:
        return Verdict.PROVEN_PRIME
    if n < DETERMINISTIC_BOUND:
        if miller_rabin(n, 0, bases=_SMALL_PRIMES) is Verdict.COMPOSITE:
            return Verdict.COMPOSITE
        return Verdict.PROVEN_PRIME
    if not _strong_probable_prime(n, 2) or _is_square(n) or not _strong_lucas(n):
        return Verdict.COMPOSITE
    return Verdict.PROBABLE_PRIME


def isprime(n: int) -> bool:
    return is_prime(n) is not Verdict.COMPOSITE


is_probable_prime_quick = isprime


def primes_between(lo: int, hi: int) -> list[int]:
    """Primes in the closed interval [lo, hi]."""
    return [n for n in range(max(lo, 2), hi + 1) if isprime(n)]


@functools.lru_cache(maxsize=64)
def prime_list(limit: int) -> tuple:
    sieve = bytearray([1]) * (limit + 1)
    sieve[:2] = b"\x00\x00"[: min(2, limit + 1)]
    for i in range(2, math.isqrt(limit) + 1):
        if sieve[i]:
            sieve[i * i:: i] = bytearray(len(range(i * i, limit + 1, i)))
    return tuple(i for i in range(limit + 1) if sieve[i])


def factorize(n: int) -> dict[int, int]:
    """Trial division; only for the small moduli of the character sums."""
    if n < 1:
        raise DomainError("factorize needs n >= 1")
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


# -- CRT --------------------------------------------------------------------

def crt_signed(residues) -> int:
    """Unique t in (-M/2, M/2] with t = r_i mod m_i, M the product of the m_i."""
    t, M = 0, 1
    for r, m in residues:
        if m < 1:
            raise DomainError("moduli must be positive")
        if math.gcd(M, m) != 1:
            raise DomainError("moduli are not pairwise coprime")
        # t + M*k = r (mod m)
        k = (r - t) * pow(M, -1, m) % m if m > 1 else 0
        t += M * k
        M *= m
    t %= M
    if 2 * t > M:
        t -= M
    return t


# -- character sums ---------------------------------------------------------

def _check_char_modulus(a: int, m: int) -> dict[int, int]:
    if m < 1 or m % 2 == 0:
        raise DomainError("modulus must be odd and positive")
    fac = factorize(m) if m > 1 else {}
    if any(e > 1 for e in fac.values()):
        raise DomainError(f"{m} is not squarefree")
    if math.gcd(a, m) != 1:
        raise DomainError(f"gcd({a}, {m}) > 1")
    return fac


@functools.lru_cache(maxsize=8)
def _legendre_table(p: int) -> np.ndarray:
    chi = -np.ones(p, dtype=np.int64)
    x = np.arange(1, p, dtype=np.int64)
    chi[x * x % p] = 1
    chi[0] = 0
    return chi


@functools.lru_cache(maxsize=8)
def jacobi_table(m: int) -> np.ndarray:
    """Array of (x/m) for x in [0, m), for odd squarefree m."""
    chi = np.ones(m, dtype=np.int64)
    x = np.arange(m, dtype=np.int64)
    for q in factorize(m) if m > 1 else {}:
        chi *= _legendre_table(q)[x % q]
    return chi


def complete_char_sum(a: int, m: int) -> int:
    """sum_{t=0}^{m-1} ((t^2 - a) / m)."""
    _check_char_modulus(a, m)
    if m == 1:
        return 1
    t = np.arange(m, dtype=np.int64)
    return int(jacobi_table(m)[(t * t - a) % m].sum())


def incomplete_char_sum(a: int, m: int, T: int) -> int:
    """sum_{|t| <= T} ((t^2 - a) / m)."""
    _check_char_modulus(a, m)
    if T < 1:
        raise DomainError("T must be at least 1")
    if m == 1:
        return 2 * T + 1
    t = np.arange(-T, T + 1, dtype=object if T > 3_000_000_000 else np.int64)
    return int(jacobi_table(m)[(t * t - a) % m].sum())


def omega_L(n: int, L: int) -> int:
    """Number of primes in [L, 2L] dividing n."""
    if n == 0:
        raise DomainError("omega_L(0) is undefined")
    if L < 3:
        raise DomainError("L must be at least 3")
    return sum(1 for q in primes_between(L, 2 * L) if n % q == 0)
