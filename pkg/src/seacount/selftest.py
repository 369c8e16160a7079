"""Built-in invariant checks for ``seacount selftest``."""

from __future__ import annotations

import random
import time

from .arith import complete_char_sum, crt_signed, is_prime, isprime, jacobi, omega_L
from .census import census_run
from .curve import CurveModel, naive_count
from .curvegen import generate
from .modpoly import ModPolyDB, validate_kronecker
from .sea import SeaOptions, Status, sea_count


def _quick(rng, db):
    yield "jacobi multiplicative", all(
        jacobi(a, 15) == jacobi(a, 3) * jacobi(a, 5) for a in range(60)), ""
    yield "crt window", crt_signed([(1, 3), (4, 5)]) == 4, ""
    yield "is_prime vs sieve", all(bool(is_prime(n)) == isprime(n) for n in range(2000)), ""
    yield "complete char sum", all(abs(complete_char_sum(a, 105)) == 1
                                   for a in (1, 2, 4, 8, 11, 13)), ""
    yield "omega_L", omega_L(77, 5) == 1 and omega_L(2310, 3) == 2, ""
    res = sea_count(5, 1, 1, SeaOptions(db=db), rng)
    yield "count over F_5", res.N == 9, f"N = {res.N}"
    phi2 = db.get(2)
    yield "Phi_2 Kronecker", validate_kronecker(phi2), ""


def _full(rng, db):
    levels = db.levels()
    bad = [ell for ell in levels if not validate_kronecker(db.get(ell))]
    yield "all levels pass Kronecker", not bad, f"{len(levels)} levels, bad {bad}"
    mism = 0
    opts = SeaOptions(db=db)
    for _ in range(40):
        while True:
            p = rng.randrange(5, 1 << 14)
            if isprime(p):
                break
        a, b = rng.randrange(p), rng.randrange(p)
        if (4 * a ** 3 + 27 * b * b) % p == 0:
            continue
        res = sea_count(p, a, b, opts, rng)
        mism += res.status is not Status.COUNTED or res.N != naive_count(CurveModel(p, a, b))
    yield "sea_count vs exhaustive count", mism == 0, f"{mism} mismatches"
    rep = census_run(1009, 20)
    yield "class count near 2q", abs(rep.classes - 2 * 1009) <= 10, f"{rep.classes} classes"
    g = generate(1 << 12, rng, db=db)
    yield "prime-order generation", bool(is_prime(g.p)) and bool(is_prime(g.N)), \
        f"p = {g.p}, N = {g.N}"


def run_checks(quick: bool = False, seed: int = 0, db: ModPolyDB | None = None):
    """List of (name, passed, detail)."""
    from .modpoly import default_db

    db = db or default_db()
    rng = random.Random(seed)
    out = []
    suites = [_quick] if quick else [_quick, _full]
    for suite in suites:
        for name, passed, detail in suite(rng, db):
            out.append((name, bool(passed), detail))
    return out


if __name__ == "__main__":
    t0 = time.perf_counter()
    for name, passed, detail in run_checks():
        print("PASS" if passed else "FAIL", name, detail)
    print(f"{time.perf_counter() - t0:.1f}s")
