"""Short Weierstrass curves y^2 = x^3 + a x + b over F_p, p > 3."""

from __future__ import annotations

import functools
import math
import random
from dataclasses import dataclass

import numpy as np

from .arith import DomainError, inv_mod, isprime, jacobi
from .poly import Modulus, Poly

ORACLE_CAP = 1 << 26


class OracleCapExceeded(DomainError):
    pass


@dataclass(frozen=True)
class CurveModel:
    p: int
    a: int
    b: int

    def __post_init__(self):
        if self.p <= 3:
            raise DomainError("characteristic must exceed 3")
        object.__setattr__(self, "a", self.a % self.p)
        object.__setattr__(self, "b", self.b % self.p)
        if discriminant_part(self.p, self.a, self.b) == 0:
            raise DomainError(f"singular curve ({self.a}, {self.b}) mod {self.p}")

    @property
    def j(self) -> int:
        return j_invariant(self)

    def rhs(self, x: int) -> int:
        return (x * x * x + self.a * x + self.b) % self.p

    def rhs_poly(self) -> Poly:
        return Poly(self.p, [self.b, self.a, 0, 1])

    def contains(self, P) -> bool:
        if P is None:
            return True
        x, y = P
        return (y * y - self.rhs(x)) % self.p == 0


def discriminant_part(p: int, a: int, b: int) -> int:
    """4a^3 + 27b^2 mod p."""
    return (4 * a * a * a + 27 * b * b) % p


def j_invariant(E: CurveModel) -> int:
    p = E.p
    a3 = 4 * E.a * E.a * E.a % p
    return 1728 * a3 * inv_mod(a3 + 27 * E.b * E.b, p) % p


# -- group law (None is the point at infinity) -------------------------------

def _check(E, P):
    if not E.contains(P):
        raise DomainError(f"point {P} is not on the curve")


def ec_add(E: CurveModel, P, Q, check: bool = True):
    if check:
        _check(E, P)
        _check(E, Q)
    if P is None:
        return Q
    if Q is None:
        return P
    p = E.p
    x1, y1 = P
    x2, y2 = Q
    if x1 == x2:
        if (y1 + y2) % p == 0:
            return None
        lam = (3 * x1 * x1 + E.a) * inv_mod(2 * y1, p) % p
    else:
        lam = (y2 - y1) * inv_mod(x2 - x1, p) % p
    x3 = (lam * lam - x1 - x2) % p
    return x3, (lam * (x1 - x3) - y1) % p


def ec_neg(E: CurveModel, P):
    if P is None:
        return None
    return P[0], (-P[1]) % E.p


def ec_mul(E: CurveModel, k: int, P, check: bool = True):
    if check:
        _check(E, P)
    if k < 0:
        k, P = -k, ec_neg(E, P)
    R = None
    for bit in bin(k)[2:]:
        R = ec_add(E, R, R, check=False)
        if bit == "1":
            R = ec_add(E, R, P, check=False)
    return R


class PointSamplingFailed(ArithmeticError):
    """No point found; over a prime field this has probability about 2^-max_tries."""


def random_point(E: CurveModel, rng: random.Random, max_tries: int = 256):
    """Uniform affine point: random x until the right-hand side is a square."""
    from .poly import sqrt_mod

    p = E.p
    for _ in range(max_tries):
        x = rng.randrange(p)
        rhs = E.rhs(x)
        if rhs == 0:
            return x, 0
        y = sqrt_mod(rhs, p, rng)
        if y is not None:
            return (x, y) if rng.getrandbits(1) else (x, (-y) % p)
    raise PointSamplingFailed(f"no point on the curve mod {p} after {max_tries} tries")


# -- exhaustive counting -----------------------------------------------------

@functools.lru_cache(maxsize=4)
def _chi_table(p: int) -> np.ndarray:
    chi = -np.ones(p, dtype=np.int8)
    x = np.arange(1, (p - 1) // 2 + 1, dtype=np.int64)
    chi[x * x % p] = 1
    chi[0] = 0
    return chi


@functools.lru_cache(maxsize=4)
def _cubes(p: int) -> np.ndarray:
    x = np.arange(p, dtype=np.int64)
    return x * x % p * x % p


def naive_count(E: CurveModel, cap: int = ORACLE_CAP) -> int:
    """#E(F_p) = p + 1 + sum_x ((x^3 + a x + b) / p), by direct summation."""
    return naive_counts(E.p, [(E.a, E.b)], cap)[0]


def naive_counts(p: int, pairs, cap: int = ORACLE_CAP) -> list[int]:
    """Exhaustive counts for many curves over the same field."""
    if p > cap:
        raise OracleCapExceeded(f"p = {p} exceeds the exhaustive-count cap {cap}")
    chi = _chi_table(p)
    cubes = _cubes(p)
    x = np.arange(p, dtype=np.int64)
    pairs = list(pairs)
    out = []
    block = max(1, (1 << 21) // p)
    for s in range(0, len(pairs), block):
        chunk = np.array(pairs[s:s + block], dtype=np.int64).reshape(-1, 2)
        vals = (cubes[None, :] + chunk[:, :1] * x[None, :] + chunk[:, 1:]) % p
        sums = chi[vals].sum(axis=1, dtype=np.int64)
        out.extend(int(p + 1 + v) for v in sums)
    return out


def trace_of(E: CurveModel, cap: int = ORACLE_CAP) -> int:
    return E.p + 1 - naive_count(E, cap)


# -- division polynomials ----------------------------------------------------
#
# psi_n = f_n for odd n and psi_n = y f_n for even n, so every f_n lies in
# F_p[x]; y^2 is replaced by F = x^3 + a x + b.

class DivisionPolynomials:
    """The x-only factors f_n, optionally reduced modulo a fixed polynomial."""

    def __init__(self, E: CurveModel, modulus: Modulus | None = None):
        self.E = E
        self.mod = modulus
        p, a, b = E.p, E.a, E.b
        F = E.rhs_poly()
        self.F = self._red(F)
        self.F2 = self._mul(self.F, self.F)
        self._f = {
            0: Poly(p, []),
            1: Poly(p, [1]),
            2: Poly(p, [2]),
            3: self._red(Poly(p, [-a * a, 12 * b, 6 * a, 0, 3])),
            4: self._red(Poly(p, [-8 * b * b - a * a * a, -4 * a * b, -5 * a * a,
                                  20 * b, 5 * a, 0, 1]) * 4),
        }
        self._half = inv_mod(2, p)

    def _red(self, u: Poly) -> Poly:
        return self.mod.reduce(u) if self.mod is not None else u

    def _mul(self, u: Poly, v: Poly) -> Poly:
        return self._red(u * v)

    def __getitem__(self, n: int) -> Poly:
        if n < 0:
            return -self[-n]
        f = self._f.get(n)
        if f is None:
            f = self._compute(n)
            self._f[n] = f
        return f

    def _compute(self, n: int) -> Poly:
        m = n // 2
        mul = self._mul
        # make sure smaller indices exist without deep recursion
        for k in range(5, m + 3):
            if k not in self._f:
                self._f[k] = self._compute(k)
        f = self._f
        if n % 2:
            t1 = mul(f[m + 2], mul(f[m], mul(f[m], f[m])))
            t2 = mul(f[m - 1], mul(f[m + 1], mul(f[m + 1], f[m + 1])))
            if m % 2 == 0:
                t1 = mul(t1, self.F2)
            else:
                t2 = mul(t2, self.F2)
            return t1 - t2
        inner = mul(f[m + 2], mul(f[m - 1], f[m - 1])) - mul(f[m - 2], mul(f[m + 1], f[m + 1]))
        return mul(f[m], inner) * self._half


def division_polynomial(E: CurveModel, ell: int) -> Poly:
    """psi_l for odd l, of degree (l^2 - 1)/2."""
    if ell % 2 == 0 or ell < 3:
        raise DomainError("division polynomial requested for an even or too small level")
    if ell == E.p:
        raise DomainError("level equals the characteristic")
    return DivisionPolynomials(E)[ell]


# -- twists and isomorphism classes ------------------------------------------

@functools.lru_cache(maxsize=64)
def least_nonresidue(p: int) -> int:
    c = 2
    while jacobi(c, p) != -1:
        c += 1
    return c


@functools.lru_cache(maxsize=64)
def primitive_root(p: int) -> int:
    from .arith import factorize

    qs = list(factorize(p - 1))
    g = 2
    while any(pow(g, (p - 1) // q, p) == 1 for q in qs):
        g += 1
    return g


def quadratic_twist(E: CurveModel, c: int | None = None) -> CurveModel:
    """Twist by a non-residue c: (a c^2, b c^3)."""
    p = E.p
    if c is None:
        c = least_nonresidue(p)
    elif jacobi(c, p) != -1:
        raise DomainError(f"{c} is not a quadratic non-residue mod {p}")
    return CurveModel(p, E.a * c * c, E.b * c * c * c)


@dataclass(frozen=True)
class ClassRecord:
    j: int
    twist: int
    curve: CurveModel
    trace: int
    weight: int


def class_representatives(p: int) -> list[tuple[int, CurveModel, int]]:
    """(j, some curve, weight) for every class, before canonicalisation."""
    if p <= 3 or not isprime(p):
        raise DomainError("need a prime p > 3")
    j1728 = 1728 % p
    c = least_nonresidue(p)
    g = primitive_root(p)
    out = []
    half = (p - 1) // 2
    for j in range(p):
        if j == 0:
            n = math.gcd(6, p - 1)
            out.extend((0, CurveModel(p, 0, pow(g, i, p)), (p - 1) // n) for i in range(n))
        elif j == j1728:
            n = math.gcd(4, p - 1)
            out.extend((j, CurveModel(p, pow(g, i, p), 0), (p - 1) // n) for i in range(n))
        else:
            k = j * inv_mod(1728 - j, p) % p
            E = CurveModel(p, 3 * k, 2 * k)
            out.append((j, E, half))
            out.append((j, quadratic_twist(E, c), half))
    return out


@functools.lru_cache(maxsize=4)
def _unit_powers(p: int) -> tuple[np.ndarray, np.ndarray]:
    u = np.arange(1, p, dtype=np.int64)
    u2 = u * u % p
    u4 = u2 * u2 % p
    return u4, u4 * u2 % p


def canonical_pair(p: int, a: int, b: int) -> tuple[int, int]:
    """Lexicographically least (u^4 a, u^6 b) over u in F_p^*."""
    u4, u6 = _unit_powers(p)
    key = (a * u4 % p) * p + (b * u6 % p)
    k = int(key.min())
    return k // p, k % p


def _class_chunk(p: int, pairs: list, cap: int) -> list[tuple[int, int, int]]:
    canon = [canonical_pair(p, a, b) for a, b in pairs]
    counts = naive_counts(p, canon, cap)
    return [(a, b, p + 1 - n) for (a, b), n in zip(canon, counts)]


def enumerate_classes(p: int, cap: int = ORACLE_CAP, jobs: int = 1) -> list[ClassRecord]:
    """One record per F_p-isomorphism class, sorted by (j, twist).

    Each class is represented by its least (a, b); the twist index is the rank
    of that pair among the classes sharing the j-invariant.  Traces come from
    exhaustive counts.
    """
    if p > cap:
        raise OracleCapExceeded(f"p = {p} exceeds the class enumeration cap {cap}")
    reps = class_representatives(p)
    pairs = [(E.a, E.b) for _, E, _ in reps]
    if jobs > 1 and len(pairs) > 256:
        from concurrent.futures import ProcessPoolExecutor

        step = -(-len(pairs) // (4 * jobs))
        chunks = [pairs[i:i + step] for i in range(0, len(pairs), step)]
        with ProcessPoolExecutor(jobs) as ex:
            parts = ex.map(_class_chunk, [p] * len(chunks), chunks, [cap] * len(chunks))
            done = [row for part in parts for row in part]
    else:
        done = _class_chunk(p, pairs, cap)
    rows = sorted((j, a, b, t, w) for (j, _, w), (a, b, t) in zip(reps, done))
    out = []
    prev_j, twist = None, 0
    for j, a, b, t, w in rows:
        twist = twist + 1 if j == prev_j else 0
        prev_j = j
        out.append(ClassRecord(j, twist, CurveModel(p, a, b), t, w))
    return out
