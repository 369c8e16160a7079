"""Classical modular polynomials read from a bundled integer coefficient table.

A table file holds one or more records::

    # comment
    ell 3
    4 0 1
    3 3 -1
    ...
    <blank line>

Each line ``i j c`` is the coefficient ``c`` of ``X^i Y^j`` with ``i >= j``;
the mirror monomial ``X^j Y^i`` is implied by symmetry.  Lines are sorted by
``(i, j)`` descending.
"""

from __future__ import annotations

import functools
import gzip
import io
import os
import threading
from dataclasses import dataclass, field
from typing import IO, Iterable

from .arith import is_probable_prime_quick
from .poly import Poly

ENV_DB_DIR = "SEACOUNT_MODPOLY_DIR"
DEFAULT_DB_DIR = os.path.join(os.path.dirname(__file__), "data", "modpoly")


class ModPolyError(ValueError):
    pass


class ModPolyParseError(ModPolyError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class ModPolyValidationError(ModPolyError):
    def __init__(self, ell: int, message: str):
        super().__init__(f"level {ell}: {message}")
        self.ell = ell


class LevelMissing(KeyError):
    """Raised when a level is not available in the database."""

    def __init__(self, ell: int):
        super().__init__(ell)
        self.ell = ell

    def __str__(self):
        return f"modular polynomial of level {self.ell} not in database"


@dataclass(frozen=True)
class ModPoly:
    ell: int
    coeffs: dict  # (i, j) -> int, i >= j

    def full(self) -> dict:
        out = {}
        for (i, j), c in self.coeffs.items():
            out[(i, j)] = c
            out[(j, i)] = c
        return out

    def coefficient(self, i: int, j: int) -> int:
        if i < j:
            i, j = j, i
        return self.coeffs.get((i, j), 0)

    @property
    def degree(self) -> int:
        return max(i for i, _ in self.coeffs)


@dataclass(frozen=True)
class Partials:
    dx: int
    dy: int
    dxx: int
    dxy: int
    dyy: int


def format_record(phi: ModPoly) -> str:
    lines = [f"ell {phi.ell}"]
    for (i, j) in sorted(phi.coeffs, reverse=True):
        c = phi.coeffs[(i, j)]
        if c:
            lines.append(f"{i} {j} {c}")
    return "\n".join(lines) + "\n\n"


def _check_structure(phi: ModPoly) -> None:
    ell = phi.ell
    if ell < 2 or not is_probable_prime_quick(ell):
        raise ModPolyValidationError(ell, "level is not prime")
    for (i, j) in phi.coeffs:
        if i < j or j < 0 or i > ell + 1:
            raise ModPolyValidationError(ell, f"monomial ({i}, {j}) out of range")
    if phi.coeffs.get((ell + 1, 0)) != 1:
        raise ModPolyValidationError(ell, "coefficient of X^(l+1) is not 1")
    for j in range(1, ell + 2):
        if phi.coeffs.get((ell + 1, j), 0):
            raise ModPolyValidationError(ell, "degree in X exceeds l+1")


def validate_kronecker(phi: ModPoly) -> bool:
    """True iff Phi_l == (X^l - Y)(X - Y^l) coefficientwise modulo l."""
    ell = phi.ell
    # (X^l - Y)(X - Y^l) = X^(l+1) - X^l Y^l - X Y + Y^(l+1)
    expected = {(ell + 1, 0): 1, (0, ell + 1): 1, (ell, ell): -1, (1, 1): -1}
    full = phi.full()
    for key in set(full) | set(expected):
        if (full.get(key, 0) - expected.get(key, 0)) % ell:
            return False
    return True


def parse_records(source: IO[str] | Iterable[str]) -> list[ModPoly]:
    records = []
    ell = None
    coeffs: dict = {}
    last_key = None
    header_line = 0

    def close():
        nonlocal ell, coeffs, last_key
        if ell is not None:
            records.append(ModPoly(ell, coeffs))
        ell, coeffs, last_key = None, {}, None

    lineno = 0
    for lineno, raw in enumerate(source, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            if not raw.strip().startswith("#"):
                close()
            continue
        parts = line.split()
        if parts[0] == "ell":
            if ell is not None:
                raise ModPolyParseError(lineno, "record header before blank line")
            if len(parts) != 2:
                raise ModPolyParseError(lineno, "malformed header")
            try:
                ell = int(parts[1])
            except ValueError:
                raise ModPolyParseError(lineno, f"bad level {parts[1]!r}") from None
            header_line = lineno
            continue
        if ell is None:
            raise ModPolyParseError(lineno, "coefficient line outside a record")
        if len(parts) != 3:
            raise ModPolyParseError(lineno, "expected '<i> <j> <coefficient>'")
        try:
            i, j, c = int(parts[0]), int(parts[1]), int(parts[2])
        except ValueError:
            raise ModPolyParseError(lineno, "non-integer field") from None
        if i < j:
            raise ModPolyParseError(lineno, "monomial must have i >= j")
        key = (i, j)
        if last_key is not None and key >= last_key:
            raise ModPolyParseError(lineno, "monomials not sorted descending")
        last_key = key
        coeffs[key] = c
    close()
    del header_line
    return records


def load_db(source, validate: bool = True) -> "ModPolyDB":
    """Parse a byte or text stream of records into a database."""
    if isinstance(source, (bytes, bytearray)):
        source = io.StringIO(source.decode("utf-8"))
    elif isinstance(source, io.BufferedIOBase) or (
        hasattr(source, "mode") and "b" in getattr(source, "mode", "")
    ):
        source = io.TextIOWrapper(source, encoding="utf-8")
    db = ModPolyDB()
    for phi in parse_records(source):
        db.add(phi, validate=validate)
    return db


def _read_file(path: str) -> list[ModPoly]:
    opener = gzip.open if path.endswith(".gz") else open
    with opener(path, "rt", encoding="utf-8") as fh:
        return parse_records(fh)


class ModPolyDB:
    """Levels keyed by l.  Levels backed by a directory are read on first use."""

    def __init__(self, directory: str | None = None):
        self._levels: dict[int, ModPoly] = {}
        self._files: dict[int, str] = {}
        self._lock = threading.Lock()
        self._reduced: dict = {}
        if directory is not None:
            for name in os.listdir(directory):
                stem = name.split(".", 1)[0]
                if stem.startswith("phi_") and stem[4:].isdigit():
                    self._files[int(stem[4:])] = os.path.join(directory, name)

    def add(self, phi: ModPoly, validate: bool = True) -> None:
        if validate:
            _check_structure(phi)
            if not validate_kronecker(phi):
                raise ModPolyValidationError(phi.ell, "Kronecker congruence fails")
        self._levels[phi.ell] = phi

    def levels(self) -> list[int]:
        return sorted(set(self._levels) | set(self._files))

    def __contains__(self, ell: int) -> bool:
        return ell in self._levels or ell in self._files

    def get(self, ell: int) -> ModPoly:
        phi = self._levels.get(ell)
        if phi is not None:
            return phi
        path = self._files.get(ell)
        if path is None:
            raise LevelMissing(ell)
        with self._lock:
            if ell not in self._levels:
                recs = _read_file(path)
                if len(recs) != 1 or recs[0].ell != ell:
                    raise ModPolyValidationError(ell, f"{path} does not hold exactly level {ell}")
                self.add(recs[0])
        return self._levels[ell]

    def reduced(self, ell: int, p: int) -> list[list[int]]:
        """Dense (l+2) x (l+2) matrix of Phi_l coefficients reduced mod p.

        Row i holds the coefficients of X^i as a polynomial in Y.
        """
        key = (ell, p)
        mat = self._reduced.get(key)
        if mat is None:
            phi = self.get(ell)
            n = ell + 2
            mat = [[0] * n for _ in range(n)]
            for (i, j), c in phi.coeffs.items():
                c %= p
                mat[i][j] = c
                mat[j][i] = c
            if len(self._reduced) > 1024:
                self._reduced.clear()
            self._reduced[key] = mat
        return mat


def eval_phi_at_j(db: ModPolyDB, ell: int, j: int, p: int) -> Poly:
    """phi(X) = Phi_l(j, X) over F_p."""
    if ell == p:
        raise ValueError("level equals the characteristic")
    mat = db.reduced(ell, p)
    n = ell + 2
    j %= p
    out = [0] * n
    jpow = 1
    for i in range(n):
        row = mat[i]
        if jpow:
            for k in range(n):
                if row[k]:
                    out[k] += row[k] * jpow
        jpow = jpow * j % p
    return Poly(p, out)


def phi_partials_at(db: ModPolyDB, ell: int, j1: int, j2: int, p: int) -> Partials:
    """First and second partial derivatives of Phi_l at (j1, j2) mod p."""
    mat = db.reduced(ell, p)
    n = ell + 2
    j1 %= p
    j2 %= p
    xp = [1] * n
    yp = [1] * n
    for k in range(1, n):
        xp[k] = xp[k - 1] * j1 % p
        yp[k] = yp[k - 1] * j2 % p
    dx = dy = dxx = dxy = dyy = 0
    for i in range(n):
        row = mat[i]
        for k in range(n):
            c = row[k]
            if not c:
                continue
            if i >= 1:
                dx += c * i * xp[i - 1] * yp[k]
                if i >= 2:
                    dxx += c * i * (i - 1) * xp[i - 2] * yp[k]
                if k >= 1:
                    dxy += c * i * k * xp[i - 1] * yp[k - 1]
            if k >= 1:
                dy += c * k * xp[i] * yp[k - 1]
                if k >= 2:
                    dyy += c * k * (k - 1) * xp[i] * yp[k - 2]
    return Partials(dx % p, dy % p, dxx % p, dxy % p, dyy % p)


@functools.lru_cache(maxsize=None)
def _default_db(directory: str) -> ModPolyDB:
    return ModPolyDB(directory)


def default_db() -> ModPolyDB:
    """Process-wide shared database (bundled tables unless overridden by env)."""
    return _default_db(os.environ.get(ENV_DB_DIR, DEFAULT_DB_DIR))
