"""Point counting over F_p with Elkies primes only.

For each prime l the modular polynomial decides whether l is an Elkies prime
for E.  If it is, a rational l-isogeny kernel polynomial h is built from a
root of Phi_l(j, X), the Frobenius eigenvalue on that kernel gives t mod l,
and the residues are recombined once their product exceeds 4 sqrt(p).
Atkin primes are skipped outright.
"""

from __future__ import annotations

import enum
import logging
import math
import random
from dataclasses import dataclass, field

from .arith import DomainError, NotInvertible, Verdict, crt_signed, inv_mod, miller_rabin
from .curve import (CurveModel, DivisionPolynomials, PointSamplingFailed, discriminant_part,
                    ec_mul, naive_count, random_point)
from .modpoly import ModPolyDB, default_db, eval_phi_at_j, phi_partials_at
from .poly import (Modulus, Poly, RootFindingFailed, find_root, frobenius_power, poly_divmod,
                   poly_gcd)

log = logging.getLogger(__name__)

COMPOSITE_RETRY_ROUNDS = 32


class Kind(str, enum.Enum):
    ATKIN = "atkin"
    ELKIES = "elkies"
    SKIPPED_DEGENERATE = "skipped_degenerate"


class Status(str, enum.Enum):
    COUNTED = "counted"
    COMPOSITE_DETECTED = "composite_detected"
    SINGULAR = "singular"
    TRACE_OUT_OF_RANGE = "trace_out_of_range"
    DATABASE_EXHAUSTED = "database_exhausted"
    ABORT_COMPOSITE_ORDER = "abort_composite_order"


class KernelUnavailable(ArithmeticError):
    """The isogeny formulas divide by zero for this (E, l, root)."""


class DegenerateRoot(KernelUnavailable):
    """Phi_X or Phi_Y vanishes at (j, root)."""


class DatabaseExhausted(RuntimeError):
    pass


@dataclass
class PrimeOutcome:
    ell: int
    kind: Kind
    root: int | None = None
    eigenvalue: int | None = None
    trace_residue: int | None = None
    method: str | None = None        # "kernel", "torsion" or "two-torsion"
    kernel: Poly | None = field(default=None, repr=False)
    factor: Poly | None = field(default=None, repr=False, compare=False)

    def as_dict(self) -> dict:
        d = {"ell": self.ell, "kind": self.kind.value}
        if self.kind is Kind.ELKIES:
            d.update(root=self.root, eigenvalue=self.eigenvalue,
                     trace_residue=self.trace_residue, method=self.method,
                     kernel_degree=None if self.kernel is None else self.kernel.deg())
        return d


@dataclass
class CountResult:
    p: int
    a: int
    b: int
    N: int
    status: Status
    outcomes: list = field(default_factory=list)
    modulus: int = 1
    trace: int | None = None
    supersingular: bool = False
    mr_rounds: int = 0

    @property
    def elkies_levels(self) -> int:
        return sum(1 for o in self.outcomes if o.kind is Kind.ELKIES)

    def as_dict(self) -> dict:
        return {
            "p": self.p, "a": self.a, "b": self.b, "N": self.N,
            "status": self.status.value, "trace": self.trace,
            "modulus": self.modulus, "supersingular": self.supersingular,
            "mr_rounds": self.mr_rounds,
            "outcomes": [o.as_dict() for o in self.outcomes],
        }


@dataclass
class SeaOptions:
    early_abort: bool = False
    supersingular_trials: int = 20
    confirm_cap: int = 1 << 26        # exhaustive confirmation of a supersingular verdict
    root_tries: int = 64
    torsion_fallback_max_ell: int = 31
    small_field: int = 1 << 12          # below this p the fallback has no level cap
    db: ModPolyDB | None = None


# -- Step 3 ------------------------------------------------------------------

def supersingular_test(E: CurveModel, rng: random.Random, trials: int = 20,
                       confirm_cap: int = 1 << 26) -> bool:
    """Monte Carlo: every sampled point is killed by p + 1.

    A curve with N != p + 1 passes one trial with probability at most
    4 sqrt(p) / N.  Positive verdicts for p <= confirm_cap are confirmed by an
    exhaustive count.
    """
    p = E.p
    for _ in range(trials):
        if ec_mul(E, p + 1, random_point(E, rng), check=False) is not None:
            return False
    if p <= confirm_cap:
        return naive_count(E, cap=confirm_cap) == p + 1
    return True


# -- Steps 4b, 4c --------------------------------------------------------------

def _two_torsion_outcome(E: CurveModel) -> PrimeOutcome:
    F = E.rhs_poly()
    g = poly_gcd(F, frobenius_power(F) - Poly.x(E.p))
    return PrimeOutcome(2, Kind.ELKIES, trace_residue=0 if g.deg() > 0 else 1,
                        method="two-torsion")


def isogenous_roots_factor(E: CurveModel, ell: int, db: ModPolyDB) -> Poly:
    """f = gcd(X^p - X, Phi_l(j, X))."""
    phi = eval_phi_at_j(db, ell, E.j, E.p)
    return poly_gcd(phi, frobenius_power(phi) - Poly.x(E.p))


def classify_prime(E: CurveModel, ell: int, db: ModPolyDB, rng: random.Random,
                   max_tries: int = 64) -> PrimeOutcome:
    """Atkin when Phi_l(j, X) has no root in F_p, else Elkies with one root."""
    if ell == 2:
        return _two_torsion_outcome(E)
    f = isogenous_roots_factor(E, ell, db)
    if f.deg() == 0:
        return PrimeOutcome(ell, Kind.ATKIN)
    root = find_root(f, rng, max_tries=max_tries, split=True)
    return PrimeOutcome(ell, Kind.ELKIES, root=root, factor=f)


# -- Step 4d: kernel polynomial ------------------------------------------------

def _weierstrass_coeffs(a: int, b: int, n: int, p: int) -> list[int]:
    """c_1..c_n with wp(z) = z^-2 + sum c_k z^(2k) for y^2 = x^3 + a x + b."""
    c = [-a * inv_mod(5, p) % p]
    if n >= 2:
        c.append(-b * inv_mod(7, p) % p)
    for k in range(3, n + 1):
        s = sum(c[i - 1] * c[k - 2 - i] for i in range(1, k - 1))
        c.append(3 * s * inv_mod((k - 2) * (2 * k + 3), p) % p)
    return c[:n]


def _series_mul(u, v, n, p):
    out = [0] * (n + 1)
    for i, x in enumerate(u[: n + 1]):
        if x:
            for j in range(min(len(v), n + 1 - i)):
                out[i + j] += x * v[j]
    return [x % p for x in out]


def _series_exp(s, n, p):
    """exp of a series with zero constant term, to degree n."""
    out = [1] + [0] * n
    for m in range(1, n + 1):
        acc = sum(k * s[k] * out[m - k] for k in range(1, m + 1) if k < len(s))
        out[m] = acc * inv_mod(m, p) % p
    return out


def elkies_kernel(E: CurveModel, ell: int, root: int, db: ModPolyDB):
    """Kernel polynomial of the normalized l-isogeny E -> E~ with j(E~) = root.

    Returns (h, a~, b~) with h monic of degree (l - 1)/2.
    """
    p, a, b = E.p, E.a, E.b
    d = (ell - 1) // 2
    if ell < 3 or ell % 2 == 0:
        raise DomainError("kernel polynomial needs an odd level")
    if p <= ell + 2:
        raise KernelUnavailable("characteristic too small for the isogeny formulas")
    j = E.j
    jt = root % p
    if a == 0 or b == 0 or jt in (0, 1728 % p):
        raise KernelUnavailable("j or the isogenous j is 0 or 1728")
    P = phi_partials_at(db, ell, j, jt, p)
    if P.dx == 0 or P.dy == 0:
        raise DegenerateRoot(f"vanishing partial of Phi_{ell} at ({j}, {jt})")
    try:
        return _kernel_formulas(p, a, b, ell, d, j, jt, P)
    except NotInvertible as exc:
        if exc.factor % p == 0:
            raise KernelUnavailable(str(exc)) from None
        raise


def _kernel_formulas(p, a, b, ell, d, j, jt, P):
    def inv(x):
        return inv_mod(x, p)

    E4 = -48 * a % p
    E6 = 864 * b % p
    jp = -E6 * j * inv(E4) % p
    jtp = -jp * P.dx * inv(ell * P.dy) % p
    at = -jtp * jtp * inv(48 * jt * (jt - 1728)) % p
    bt = -jtp * jtp * jtp * inv(864 * jt * jt * (jt - 1728)) % p
    E4t = -48 * at % p
    E6t = 864 * bt % p
    fracjs = -(jp * jp * P.dxx + 2 * ell * jp * jtp * P.dxy
               + ell * ell * jtp * jtp * P.dyy) * inv(jp * P.dx) % p
    p1 = (ell * fracjs * inv(2)
          + ell * inv(4) * (E4 * E4 * inv(E6) - ell * E4t * E4t * inv(E6t))
          + ell * inv(3) * (E6 * inv(E4) - ell * E6t * inv(E4t))) % p
    a_iso = pow(ell, 4, p) * at % p
    b_iso = pow(ell, 6, p) * bt % p

    half_p1 = -p1 * inv(2) % p
    hc = [1, half_p1]
    if d >= 2:
        c = _weierstrass_coeffs(a, b, d, p)
        ct = [(x - ell * y) % p for x, y in zip(_weierstrass_coeffs(a_iso, b_iso, d, p), c)]
        evp = [0, half_p1] + [0] * (d - 1)
        for i in range(1, d):
            evp[i + 1] = -ct[i - 1] * inv((2 * i + 1) * (2 * i + 2)) % p
        A = _series_exp(evp, d, p)
        C = [0] + c
        Cpow = [[1] + [0] * d, C]
        for _ in range(2, d + 1):
            Cpow.append(_series_mul(Cpow[-1], C, d, p))
        for i in range(2, d + 1):
            coef = A[i]
            for k in range(1, i + 1):
                inner = sum(math.comb(d - i + k, k - jj) * Cpow[k - jj][jj] for jj in range(k + 1))
                coef -= inner * hc[i - k]
            hc.append(coef % p)
    h = Poly(p, list(reversed(hc)))
    return h, a_iso, b_iso


# -- Step 4e: Frobenius eigenvalue ----------------------------------------------

def _mult_map_parts(divp: DivisionPolynomials, lam: int):
    """x([lam]P) = num/den and y([lam]P) = y * A/D as polynomials in x."""
    f = divp.__getitem__
    mul = divp._mul
    F = divp.F
    x = divp._red(Poly.x(divp.E.p))
    fl2 = mul(f(lam), f(lam))
    cross = mul(f(lam - 1), f(lam + 1))
    if lam % 2:
        num = mul(x, fl2) - mul(F, cross)
        den = fl2
    else:
        den = mul(F, fl2)
        num = mul(x, den) - cross
    A = mul(f(lam + 2), mul(f(lam - 1), f(lam - 1))) - mul(f(lam - 2), mul(f(lam + 1), f(lam + 1)))
    D = mul(fl2, f(lam)) * 4
    if lam % 2 == 0:
        D = mul(D, divp.F2)
    return num, den, A, D


def eigenvalue(E: CurveModel, ell: int, h: Poly) -> int | None:
    """lam in [1, l-1] with (x^p, y^p) = [lam](x, y) modulo h, or None."""
    p = E.p
    mod = Modulus(h)
    divp = DivisionPolynomials(E, mod)
    xp = frobenius_power(mod)
    ypart = None
    for lam in range(1, (ell - 1) // 2 + 1):
        num, den, A, D = _mult_map_parts(divp, lam)
        if mod.reduce(xp * den) != num:
            continue
        if ypart is None:
            ypart = mod.pow(divp.F, (p - 1) // 2)
        lhs = mod.reduce(ypart * D)
        if lhs == A:
            return lam
        if lhs == -A:
            return ell - lam
        return None
    return None


def torsion_eigenvalue(E: CurveModel, ell: int):
    """Eigenvalue search on the full l-torsion, for levels where the isogeny
    formulas are unavailable.  Returns (lam, h) with h | psi_l, or None."""
    p = E.p
    divp_full = DivisionPolynomials(E)
    psi = divp_full[ell].monic()
    mod = Modulus(psi)
    divp = DivisionPolynomials(E, mod)
    xp = frobenius_power(mod)
    for lam in range(1, (ell - 1) // 2 + 1):
        num, den, A, D = _mult_map_parts(divp, lam)
        g = poly_gcd(psi, mod.reduce(xp * den) - num)
        if g.deg() < 1:
            continue
        gmod = Modulus(g)
        ypart = gmod.pow(gmod.reduce(divp.F), (p - 1) // 2)
        lhs = gmod.reduce(ypart * gmod.reduce(D))
        A_red = gmod.reduce(A)
        plus = poly_gcd(g, lhs - A_red)
        if plus.deg() > 0:
            return lam, plus
        minus = poly_gcd(g, lhs + A_red)
        if minus.deg() > 0:
            return ell - lam, minus
        return None
    return None


# -- the full count --------------------------------------------------------------

def _trace_residue(lam: int, p: int, ell: int) -> int:
    return (lam + p * inv_mod(lam, ell)) % ell


def _resolve_elkies(E, outcome, db, rng, opts) -> None:
    """Fill eigenvalue, kernel and trace residue of an Elkies outcome in place.

    When no root gives a usable kernel (vanishing partials, j or the isogenous
    j in {0, 1728}, tiny p, no eigenvalue) the eigenvalue is searched on the
    full l-torsion for l up to the configured cap (any l in small fields).  If that search finds none,
    Frobenius has no eigenvalue mod l and the level is reclassified as Atkin;
    the rational root came from a repeated factor of Phi_l(j, X).  Otherwise
    such levels are skipped.
    """
    ell, p = outcome.ell, E.p
    f, root = outcome.factor, outcome.root
    for _ in range(3):
        try:
            h, _, _ = elkies_kernel(E, ell, root, db)
        except KernelUnavailable:
            pass
        else:
            lam = eigenvalue(E, ell, h)
            if lam is not None:
                outcome.root, outcome.eigenvalue, outcome.kernel = root, lam, h
                outcome.method = "kernel"
                outcome.trace_residue = _trace_residue(lam, p, ell)
                return
            log.debug("no eigenvalue on kernel, l=%d root=%d", ell, root)
        if f is None or f.deg() <= 1:
            break
        f = poly_divmod(f, Poly(p, [-root, 1]))[0].monic()
        root = find_root(f, rng, max_tries=opts.root_tries, split=True)
    if ell > opts.torsion_fallback_max_ell and p >= opts.small_field:
        outcome.kind = Kind.SKIPPED_DEGENERATE
        return
    found = torsion_eigenvalue(E, ell)
    outcome.method = "torsion"
    if found is None:
        outcome.kind = Kind.ATKIN
        return
    lam, h = found
    outcome.eigenvalue, outcome.kernel = lam, h
    outcome.trace_residue = _trace_residue(lam, p, ell)


def _mr_round(p, rng, result) -> bool:
    """One interleaved Miller-Rabin round; True when p is shown composite."""
    result.mr_rounds += 1
    if p % 2 == 0:
        return True
    return miller_rabin(p, 1, rng) is Verdict.COMPOSITE


def sea_count(p: int, a: int, b: int, opts: SeaOptions | None = None,
              rng: random.Random | None = None) -> CountResult:
    opts = opts or SeaOptions()
    rng = rng or random.Random(0)
    db = opts.db or default_db()
    if p <= 3:
        raise DomainError("p must exceed 3")
    a %= p
    b %= p
    res = CountResult(p, a, b, 0, Status.COUNTED)

    def composite():
        res.N, res.status = 0, Status.COMPOSITE_DETECTED
        return res

    if _mr_round(p, rng, res):
        return composite()
    if math.gcd(discriminant_part(p, a, b), p) != 1:
        if discriminant_part(p, a, b) != 0:
            return composite()
        res.status = Status.SINGULAR
        return res
    try:
        E = CurveModel(p, a, b)
        if supersingular_test(E, rng, opts.supersingular_trials, opts.confirm_cap):
            res.N, res.trace, res.supersingular = p + 1, 0, True
            return res
        residues = []
        M = 1
        ell = 1
        levels_tried = 0
        while M * M <= 16 * p:
            ell = _next_prime(ell)
            if ell == p:
                continue
            if ell > 2 and ell not in db:
                if _mr_round(p, rng, res):
                    return composite()
                res.status = Status.DATABASE_EXHAUSTED
                res.modulus = M
                return res
            levels_tried += 1
            outcome = classify_prime(E, ell, db, rng, opts.root_tries)
            if outcome.kind is Kind.ELKIES and ell > 2:
                _resolve_elkies(E, outcome, db, rng, opts)
            outcome.factor = None
            res.outcomes.append(outcome)
            if _mr_round(p, rng, res):
                return composite()
            if outcome.kind is not Kind.ELKIES:
                continue
            residues.append((outcome.trace_residue, ell))
            M *= ell
            if opts.early_abort and (p + 1 - outcome.trace_residue) % ell == 0:
                # N = 0 mod l with N >= p + 1 - 2 sqrt(p) > l: N is composite
                if (p + 1 - ell) ** 2 > 4 * p:
                    res.status = Status.ABORT_COMPOSITE_ORDER
                    res.modulus = M
                    return res
    except NotInvertible as exc:
        if 1 < exc.factor < p:
            return composite()
        raise
    except (PointSamplingFailed, RootFindingFailed):
        # practically impossible over a field; a liar for the interleaved rounds is likelier
        for _ in range(COMPOSITE_RETRY_ROUNDS):
            if _mr_round(p, rng, res):
                return composite()
        raise
    t = crt_signed(residues)
    res.modulus, res.trace = M, t
    if t * t > 4 * p:
        res.status = Status.TRACE_OUT_OF_RANGE
        return res
    res.N = p + 1 - t
    return res


def _next_prime(n: int) -> int:
    from .arith import isprime

    n += 1
    while not isprime(n):
        n += 1
    return n
