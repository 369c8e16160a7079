"""Atkin/Elkies census over all isomorphism classes of curves over F_q."""

from __future__ import annotations

import csv
import io
import json
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

from .arith import DomainError, isprime, jacobi, omega_L, primes_between
from .curve import ClassRecord, enumerate_classes

SCHEMA_VERSION = 1
CSV_COLUMNS = ("j", "twist", "a", "b", "trace", "weight",
               "n_atkin", "n_elkies", "n_ramified", "omega_L")
CENSUS_CAP = 1 << 16


def classify_from_trace(t: int, q: int, ell: int) -> str:
    """'elkies' when t^2 - 4q is a square mod l (zero included), else 'atkin'."""
    if ell % 2 == 0 or ell < 3:
        raise DomainError("level must be an odd prime")
    if q % ell == 0:
        raise DomainError(f"{ell} divides q")
    return "atkin" if jacobi(t * t - 4 * q, ell) == -1 else "elkies"


@dataclass(frozen=True)
class CensusRow:
    record: ClassRecord
    n_atkin: int
    n_elkies: int        # includes the ramified levels
    n_ramified: int      # levels dividing t^2 - 4q
    omega: int           # omega_L(4q - t^2)


@dataclass
class CensusReport:
    q: int
    L: int
    window: list[int]
    excluded: list[int]
    rows: list[CensusRow] = field(default_factory=list)

    @property
    def classes(self) -> int:
        return len(self.rows)

    @property
    def center(self) -> Fraction:
        return Fraction(len(self.window), 2)

    def total_weight(self) -> int:
        return sum(r.record.weight for r in self.rows)

    def mean_elkies(self, weighted: bool = False) -> Fraction:
        if weighted:
            return Fraction(sum(r.n_elkies * r.record.weight for r in self.rows),
                            self.total_weight())
        return Fraction(sum(r.n_elkies for r in self.rows), self.classes)

    def mean_atkin(self, weighted: bool = False) -> Fraction:
        if weighted:
            return Fraction(sum(r.n_atkin * r.record.weight for r in self.rows),
                            self.total_weight())
        return Fraction(sum(r.n_atkin for r in self.rows), self.classes)

    def stderr_elkies(self) -> float:
        n = self.classes
        mean = self.mean_elkies()
        var = sum((r.n_elkies - mean) ** 2 for r in self.rows) / (n - 1)
        return math.sqrt(var / n)


def census_run(q: int, L: int, cap: int = CENSUS_CAP, jobs: int = 1) -> CensusReport:
    if q <= 3 or not isprime(q):
        raise DomainError("q must be a prime above 3")
    if L < 3:
        raise DomainError("L must be at least 3")
    if q > cap:
        raise DomainError(f"q = {q} exceeds the census cap {cap}")
    all_window = primes_between(L, 2 * L)
    window = [ell for ell in all_window if ell % 2 and q % ell]
    excluded = [ell for ell in all_window if ell not in window]
    records = enumerate_classes(q, cap=cap, jobs=jobs)
    report = CensusReport(q, L, window, excluded)
    for rec in records:
        disc = rec.trace * rec.trace - 4 * q
        n_e = n_a = n_0 = 0
        for ell in window:
            s = jacobi(disc, ell)
            if s == -1:
                n_a += 1
            else:
                n_e += 1
                n_0 += s == 0
        report.rows.append(CensusRow(rec, n_a, n_e, n_0, omega_L(-disc, L)))
    return report


def moment_statistic(report: CensusReport, nu: int, weighted: bool = False) -> Fraction:
    """Mean of |N_e - (window size)/2|^(2 nu) over classes (or over pairs)."""
    if nu < 1:
        raise DomainError("nu must be positive")
    c = report.center
    if weighted:
        num = sum((r.n_elkies - c) ** (2 * nu) * r.record.weight for r in report.rows)
        return num / report.total_weight()
    return sum(((r.n_elkies - c) ** (2 * nu) for r in report.rows), Fraction(0)) / report.classes


def bad_pair_fraction(report: CensusReport) -> tuple[Fraction, Fraction]:
    """Fraction of pairs (a, b) whose class has N_a, resp. N_e, below a third
    of the window size."""
    if not report.window:
        return Fraction(0), Fraction(0)
    third = Fraction(len(report.window), 3)
    total = report.total_weight()
    bad_a = sum(r.record.weight for r in report.rows if r.n_atkin < third)
    bad_e = sum(r.record.weight for r in report.rows if r.n_elkies < third)
    return Fraction(bad_a, total), Fraction(bad_e, total)


def fq_histogram(report: CensusReport) -> dict[int, int]:
    """Number of classes with each trace."""
    return dict(sorted(Counter(r.record.trace for r in report.rows).items()))


# -- serialization -------------------------------------------------------------

def write_csv(report: CensusReport, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in report.rows:
        rec = r.record
        w.writerow((rec.j, rec.twist, rec.curve.a, rec.curve.b, rec.trace, rec.weight,
                    r.n_atkin, r.n_elkies, r.n_ramified, r.omega))


def csv_text(report: CensusReport) -> str:
    buf = io.StringIO()
    write_csv(report, buf)
    return buf.getvalue()


def _frac(x: Fraction) -> dict:
    return {"num": x.numerator, "den": x.denominator, "value": float(x)}


def aggregates(report: CensusReport, nus=(1, 2)) -> dict:
    bad_a, bad_e = bad_pair_fraction(report)
    return {
        "schema_version": SCHEMA_VERSION,
        "q": report.q,
        "L": report.L,
        "window": report.window,
        "excluded": report.excluded,
        "classes": report.classes,
        "total_weight": report.total_weight(),
        "mean_elkies": _frac(report.mean_elkies()),
        "mean_elkies_weighted": _frac(report.mean_elkies(weighted=True)),
        "mean_atkin": _frac(report.mean_atkin()),
        "mean_atkin_weighted": _frac(report.mean_atkin(weighted=True)),
        "stderr_elkies": report.stderr_elkies() if report.classes > 1 else None,
        "moments": {str(nu): {"classes": _frac(moment_statistic(report, nu)),
                              "pairs": _frac(moment_statistic(report, nu, weighted=True))}
                    for nu in nus},
        "bad_pair_fraction": {"atkin": _frac(bad_a), "elkies": _frac(bad_e)},
        "fq_histogram": {str(t): n for t, n in fq_histogram(report).items()},
    }


def aggregates_json(report: CensusReport, nus=(1, 2)) -> str:
    return json.dumps(aggregates(report, nus), indent=2, sort_keys=False)
