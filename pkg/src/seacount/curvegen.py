"""Random curves of prime order: propose (p, a, b), count, test, repeat."""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field

from .arith import DomainError, Verdict, is_prime, miller_rabin
from .modpoly import ModPolyDB, default_db
from .sea import SeaOptions, Status, sea_count

SAMPLER = "uniform over {(p, a, b): x <= p <= 2x, 0 <= a, b < p}; a, b drawn from [0, floor(2x)] with rejection"


class GenerationRefused(RuntimeError):
    def __init__(self, message: str, max_x: float):
        super().__init__(f"{message}; largest supported x is about {max_x:.3g}")
        self.max_x = max_x


@dataclass
class Counters:
    proposals: int = 0
    rejected_draws: int = 0       # a or b >= p, redrawn inside propose_triple
    composite_p: int = 0          # case 1
    composite_n: int = 0          # case 2
    singular: int = 0
    early_aborts: int = 0
    elkies_levels: int = 0
    sea_calls: int = 0
    seconds: dict = field(default_factory=lambda: {"propose": 0.0, "count": 0.0,
                                                   "miller_rabin": 0.0, "confirm": 0.0})

    def reconciles(self) -> bool:
        return self.proposals == (self.composite_p + self.composite_n + self.singular
                                  + self.early_aborts + 1)


@dataclass
class GenResult:
    p: int
    a: int
    b: int
    N: int
    counters: Counters
    sampler: str = SAMPLER

    def as_dict(self) -> dict:
        c = self.counters
        return {
            "p": self.p, "a": self.a, "b": self.b, "N": self.N,
            "sampler": self.sampler,
            "counters": {
                "proposals": c.proposals, "rejected_draws": c.rejected_draws,
                "composite_p": c.composite_p, "composite_n": c.composite_n,
                "singular": c.singular, "early_aborts": c.early_aborts,
                "elkies_levels": c.elkies_levels, "sea_calls": c.sea_calls,
                "seconds": {k: round(v, 6) for k, v in c.seconds.items()},
            },
        }


def _bounds(x: float) -> tuple[int, int]:
    if not x > 3:
        raise DomainError("x must exceed 3")
    return math.ceil(x), math.floor(2 * x)


def propose_triple(x: float, rng: random.Random, counters: Counters | None = None):
    """Uniform (p, a, b) with p in [x, 2x] and 0 <= a, b < p."""
    lo, hi = _bounds(x)
    while True:
        p = rng.randint(lo, hi)
        a = rng.randint(0, hi)
        b = rng.randint(0, hi)
        if a < p and b < p:
            return p, a, b
        if counters is not None:
            counters.rejected_draws += 1


def mr_rounds_for(x: float) -> int:
    return max(1, math.ceil(math.log(x)))


def _passes_mr(n: int, rounds: int, rng) -> bool:
    if n < 5:
        return n in (2, 3)
    if n % 2 == 0:
        return False
    return miller_rabin(n, rounds, rng) is not Verdict.COMPOSITE


def supported_x(db: ModPolyDB) -> float:
    """Rough largest x for which the bundled levels usually suffice.

    About half of the levels are Elkies primes for a given curve, so the
    usable modulus is taken as the square root of the full product.
    """
    prod = 2
    for ell in db.levels():
        if ell > 2:
            prod *= ell
    m = math.isqrt(prod)
    return (m / 4) ** 2 / 2


def generate(x: float, rng: random.Random, early_abort: bool = False,
             db: ModPolyDB | None = None, max_proposals: int | None = None) -> GenResult:
    db = db or default_db()
    _bounds(x)
    opts = SeaOptions(early_abort=early_abort, db=db)
    rounds = mr_rounds_for(x)
    c = Counters()
    clock = time.perf_counter
    while True:
        if max_proposals is not None and c.proposals >= max_proposals:
            raise RuntimeError(f"no prime-order curve after {max_proposals} proposals")
        t0 = clock()
        p, a, b = propose_triple(x, rng, c)
        c.proposals += 1
        t1 = clock()
        res = sea_count(p, a, b, opts, rng)
        c.sea_calls += 1
        c.elkies_levels += res.elkies_levels
        t2 = clock()
        c.seconds["propose"] += t1 - t0
        c.seconds["count"] += t2 - t1
        if res.status is Status.DATABASE_EXHAUSTED:
            raise GenerationRefused(f"modular polynomial levels exhausted at p = {p}",
                                    supported_x(db))
        if res.status is Status.SINGULAR:
            c.singular += 1
            continue
        if res.status is Status.ABORT_COMPOSITE_ORDER:
            c.early_aborts += 1
            continue
        if res.status is not Status.COUNTED:
            # composite p, or a failure that only a composite p can cause
            c.composite_p += 1
            continue
        N = res.N
        ok_p = _passes_mr(p, rounds, rng)
        ok_n = ok_p and _passes_mr(N, rounds, rng)
        t3 = clock()
        c.seconds["miller_rabin"] += t3 - t2
        if not ok_p:
            c.composite_p += 1
            continue
        if not ok_n:
            c.composite_n += 1
            continue
        vp, vn = is_prime(p), is_prime(N)
        c.seconds["confirm"] += clock() - t3
        if vp is Verdict.COMPOSITE:
            c.composite_p += 1
            continue
        if vn is Verdict.COMPOSITE:
            c.composite_n += 1
            continue
        return GenResult(p, a, b, N, c)
