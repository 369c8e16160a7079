"""Dense univariate polynomials over Z/pZ.

Coefficients are stored lowest degree first and always reduced; the zero
polynomial has no coefficients.  Large products go through Kronecker
substitution so that CPython's big-integer multiplication does the work.
"""

from __future__ import annotations

import random

from .arith import DomainError, inv_mod

KRONECKER_MIN = 12


class RootFindingFailed(RuntimeError):
    pass


def _trim(c: list) -> list:
    while c and not c[-1]:
        c.pop()
    return c


def _pack(c, w):
    return int.from_bytes(b"".join(x.to_bytes(w, "little") for x in c), "little")


def _mul_coeffs(a: list, b: list, p: int) -> list:
    if not a or not b:
        return []
    la, lb = len(a), len(b)
    if la < KRONECKER_MIN or lb < KRONECKER_MIN:
        if la < lb:
            a, b, la, lb = b, a, lb, la
        out = [0] * (la + lb - 1)
        for j, y in enumerate(b):
            if y:
                for i, x in enumerate(a):
                    out[i + j] += x * y
        return [x % p for x in out]
    bits = 2 * (p - 1).bit_length() + min(la, lb).bit_length()
    w = (bits + 7) // 8
    prod = _pack(a, w) * _pack(b, w) if a is not b else _pack(a, w) ** 2
    n = la + lb - 1
    raw = prod.to_bytes(n * w, "little")
    fb = int.from_bytes
    return [fb(raw[k:k + w], "little") % p for k in range(0, n * w, w)]


class Poly:
    __slots__ = ("p", "c")

    def __init__(self, p: int, coeffs=(), reduced: bool = False):
        self.p = p
        if reduced:
            self.c = _trim(list(coeffs))
        else:
            self.c = _trim([x % p for x in coeffs])

    @classmethod
    def x(cls, p: int) -> "Poly":
        return cls(p, [0, 1], reduced=True)

    @classmethod
    def const(cls, p: int, v: int) -> "Poly":
        return cls(p, [v])

    def deg(self) -> int:
        return len(self.c) - 1

    def is_zero(self) -> bool:
        return not self.c

    def lead(self) -> int:
        return self.c[-1] if self.c else 0

    def __repr__(self):
        return f"Poly({self.p}, {self.c})"

    def __eq__(self, other):
        if isinstance(other, int):
            other = Poly(self.p, [other])
        return isinstance(other, Poly) and self.p == other.p and self.c == other.c

    def __hash__(self):
        return hash((self.p, tuple(self.c)))

    def _coerce(self, other) -> "Poly":
        if isinstance(other, int):
            return Poly(self.p, [other])
        if other.p != self.p:
            raise DomainError("modulus mismatch")
        return other

    def __add__(self, other):
        other = self._coerce(other)
        a, b = self.c, other.c
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, y in enumerate(b):
            out[i] = (out[i] + y) % self.p
        return Poly(self.p, out, reduced=True)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.p, [(-x) % self.p for x in self.c], reduced=True)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, int):
            k = other % self.p
            return Poly(self.p, [x * k % self.p for x in self.c], reduced=True)
        other = self._coerce(other)
        return Poly(self.p, _mul_coeffs(self.c, other.c, self.p), reduced=True)

    __rmul__ = __mul__

    def __divmod__(self, other):
        return poly_divmod(self, other)

    def __mod__(self, other):
        return poly_rem(self, other)

    def __floordiv__(self, other):
        return poly_divmod(self, other)[0]

    def __call__(self, x: int) -> int:
        acc = 0
        for coef in reversed(self.c):
            acc = (acc * x + coef) % self.p
        return acc

    def monic(self) -> "Poly":
        if not self.c or self.c[-1] == 1:
            return self
        inv = inv_mod(self.c[-1], self.p)
        return Poly(self.p, [x * inv % self.p for x in self.c], reduced=True)

    def derivative(self) -> "Poly":
        return Poly(self.p, [i * x for i, x in enumerate(self.c)][1:])

    def shift(self, k: int) -> "Poly":
        """Multiply by X^k."""
        if not self.c:
            return self
        return Poly(self.p, [0] * k + self.c, reduced=True)


def poly_mul(u: Poly, v: Poly) -> Poly:
    return u * v


def poly_divmod(u: Poly, v: Poly) -> tuple[Poly, Poly]:
    if u.p != v.p:
        raise DomainError("modulus mismatch")
    if v.is_zero():
        raise DomainError("division by the zero polynomial")
    p = u.p
    dv = v.deg()
    if u.deg() < dv:
        return Poly(p, [], reduced=True), u
    r = list(u.c)
    inv = inv_mod(v.c[-1], p)
    vc = v.c
    q = [0] * (len(r) - dv)
    for k in range(len(r) - 1, dv - 1, -1):
        coef = r[k] * inv % p
        if coef:
            q[k - dv] = coef
            base = k - dv
            for i in range(dv):
                r[base + i] = (r[base + i] - coef * vc[i]) % p
        r[k] = 0
    return Poly(p, q, reduced=True), Poly(p, r[:dv], reduced=True)


def poly_rem(u: Poly, v: Poly) -> Poly:
    return poly_divmod(u, v)[1]


def poly_gcd(u: Poly, v: Poly) -> Poly:
    """Monic gcd."""
    if u.p != v.p:
        raise DomainError("modulus mismatch")
    if u.is_zero() and v.is_zero():
        raise DomainError("gcd of two zero polynomials")
    while not v.is_zero():
        u, v = v, poly_rem(u, v)
    return u.monic()


def _series_inverse(f: list, n: int, p: int) -> list:
    """First n coefficients of 1/f, f[0] invertible."""
    g = [inv_mod(f[0], p)]
    k = 1
    while k < n:
        k = min(2 * k, n)
        fg = _mul_coeffs(f[:k], g, p)[:k]
        # g <- g * (2 - f g)
        corr = [(-x) % p for x in fg]
        corr += [0] * (k - len(corr))
        corr[0] = (corr[0] + 2) % p
        g = _mul_coeffs(g, corr, p)[:k]
    return g + [0] * (n - len(g))


class Modulus:
    """Fast reduction modulo a fixed nonconstant polynomial."""

    def __init__(self, f: Poly):
        if f.deg() < 1:
            raise DomainError("modulus must be nonconstant")
        self.f = f.monic()
        self.p = f.p
        self.d = self.f.deg()
        self._inv = None

    def _rev_inverse(self):
        if self._inv is None:
            rev = list(reversed(self.f.c))
            self._inv = _series_inverse(rev, max(self.d - 1, 1), self.p)
        return self._inv

    def reduce(self, a: Poly) -> Poly:
        d, p = self.d, self.p
        n = a.deg()
        if n < d:
            return a
        if n > 2 * d - 2 or d < KRONECKER_MIN:
            return poly_rem(a, self.f)
        m = n - d + 1
        rev_a = list(reversed(a.c))[:m]
        q_rev = _mul_coeffs(rev_a, self._rev_inverse()[:m], p)[:m]
        q_rev += [0] * (m - len(q_rev))
        q = list(reversed(q_rev))
        qf = _mul_coeffs(q, self.f.c, p)
        r = [(x - y) % p for x, y in zip(a.c[:d], qf[:d])]
        return Poly(p, r, reduced=True)

    def mul(self, a: Poly, b: Poly) -> Poly:
        return self.reduce(a * b)

    def pow(self, base: Poly, e: int) -> Poly:
        if e < 0:
            raise DomainError("negative exponent")
        base = self.reduce(base)
        result = Poly(self.p, [1], reduced=True)
        if e == 0:
            return self.reduce(result)
        is_x = base.c == [0, 1]
        for bit in bin(e)[2:]:
            result = self.reduce(result * result)
            if bit == "1":
                result = self.reduce(result.shift(1) if is_x else result * base)
        return result


def powmod(base: Poly, e: int, f: Poly | Modulus) -> Poly:
    mod = f if isinstance(f, Modulus) else Modulus(f)
    return mod.pow(base, e)


def frobenius_power(f: Poly | Modulus, p: int | None = None) -> Poly:
    """X^p mod f."""
    mod = f if isinstance(f, Modulus) else Modulus(f)
    if p is None:
        p = mod.p
    return mod.pow(Poly.x(mod.p), p)


def rational_roots_part(f: Poly, frob: Poly | None = None) -> Poly:
    """gcd(X^p - X, f): the product of the distinct linear factors of f."""
    if f.is_zero():
        raise DomainError("zero polynomial")
    if f.deg() < 1:
        return Poly(f.p, [1], reduced=True)
    if frob is None:
        frob = frobenius_power(f)
    return poly_gcd(f, frob - Poly.x(f.p))


def find_root(f: Poly, rng: random.Random, max_tries: int = 64,
              split: bool = False) -> int | None:
    """A root of f in F_p, or None when f has none.

    ``split=True`` promises that f is already a product of distinct linear
    factors, which skips the initial gcd with X^p - X.
    """
    if f.is_zero():
        raise DomainError("zero polynomial")
    p = f.p
    g = f.monic() if split else rational_roots_part(f)
    if g.deg() < 1:
        return None
    e = (p - 1) // 2
    while g.deg() > 1:
        if g.deg() == 2 and p > 2:
            root = _quadratic_root(g, rng, max_tries)
            if root is not None:
                return root
        mod = Modulus(g)
        for _ in range(max_tries):
            delta = rng.randrange(p)
            w = mod.pow(Poly(p, [delta, 1], reduced=True), e) - 1
            if w.is_zero():
                continue
            h = poly_gcd(g, w)
            if 0 < h.deg() < g.deg():
                other = poly_divmod(g, h)[0]
                g = h if h.deg() <= other.deg() else other.monic()
                break
        else:
            raise RootFindingFailed(f"no split of degree-{g.deg()} factor after {max_tries} tries")
    c0, c1 = g.c
    return (-c0) * inv_mod(c1, p) % p


def _quadratic_root(g: Poly, rng, max_tries) -> int | None:
    p = g.p
    c, b, _ = g.c  # monic: X^2 + bX + c
    disc = (b * b - 4 * c) % p
    s = sqrt_mod(disc, p, rng, max_tries)
    if s is None:
        return None
    return (-b + s) * inv_mod(2, p) % p


def sqrt_mod(a: int, p: int, rng: random.Random, max_tries: int = 64) -> int | None:
    """A square root of a mod odd prime p (Cipolla), None for non-residues."""
    a %= p
    if a == 0:
        return 0
    if pow(a, (p - 1) // 2, p) != 1:
        return None
    if p % 4 == 3:
        r = pow(a, (p + 1) // 4, p)
        return r if r * r % p == a else None
    for _ in range(max_tries):
        t = rng.randrange(p)
        w = (t * t - a) % p
        if w and pow(w, (p - 1) // 2, p) == p - 1:
            break
    else:
        return None
    # (t + sqrt(w))^((p+1)/2) in F_p[sqrt(w)]
    x0, x1 = 1, 0
    b0, b1 = t, 1
    e = (p + 1) // 2
    while e:
        if e & 1:
            x0, x1 = (x0 * b0 + x1 * b1 * w) % p, (x0 * b1 + x1 * b0) % p
        b0, b1 = (b0 * b0 + b1 * b1 * w) % p, 2 * b0 * b1 % p
        e >>= 1
    return x0 if x0 * x0 % p == a else None
