"""Regenerate the bundled classical modular polynomial tables.

Phi_l(X, j(q)) = (X - j(q^l)) * prod_k (X - j(zeta^k q^(1/l))).  The product
over the l conjugates is rebuilt from its power sums, which only need the
coefficients of j^m at exponents divisible by l.  Everything is done modulo
a batch of word-size primes with numpy and recombined by CRT.

    python tools/gen_modpoly.py 2 3 5 7 ... --out src/seacount/data/modpoly
"""

import argparse
import math
import os
import sys

import numpy as np
from sympy import prevprime

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

PRIME_TOP = 1 << 23  # products < 2^46, sums of 2^12 terms stay below 2^63


def partitions(n):
    p = [1] + [0] * n
    for m in range(1, n + 1):
        total, k = 0, 1
        while True:
            g1 = k * (3 * k - 1) // 2
            if g1 > m:
                break
            sign = 1 if k % 2 else -1
            total += sign * p[m - g1]
            g2 = k * (3 * k + 1) // 2
            if g2 <= m:
                total += sign * p[m - g2]
            k += 1
        p[m] = total
    return p


def sigma3(n):
    s = [0] * (n + 1)
    for d in range(1, n + 1):
        d3 = d ** 3
        for m in range(d, n + 1, d):
            s[m] += d3
    return s


def mulmod(u, v, r, n):
    return np.convolve(u[:n], v[:n])[:n] % r


def j_shifted(n, r, part, sig):
    """Coefficients c[0..n-1] with j(q) = q^-1 * sum c[k] q^k, modulo r."""
    e4 = np.array([1] + [240 * s % r for s in sig[1:n]], dtype=np.int64)
    pinv = np.array([x % r for x in part[:n]], dtype=np.int64)
    p24 = np.zeros(n, dtype=np.int64)
    p24[0] = 1
    base, e = pinv, 24
    while e:
        if e & 1:
            p24 = mulmod(p24, base, r, n)
        e >>= 1
        if e:
            base = mulmod(base, base, r, n)
    e4c = mulmod(mulmod(e4, e4, r, n), e4, r, n)
    return mulmod(e4c, p24, r, n)


def phi_mod(ell, r, part, sig):
    prec = ell + 1                      # G needed up to q^ell, one spare
    n = ell * prec + ell + 2            # shifted length for j^m
    jc = j_shifted(n, r, part, sig)
    inv = [0] + [pow(k, -1, r) for k in range(1, ell + 2)]

    # power sums s_m of the l conjugates, as power series in q with offset 1
    # (index 0 <-> q^-1); only s_l has a pole.
    width = prec + 2
    s = [None]
    jm = np.zeros(n, dtype=np.int64)
    jm[0] = 1
    jpow_low = [np.array([1], dtype=np.int64)]   # j^m coefficients, exps -m..0
    for m in range(1, ell + 2):
        jm = mulmod(jm, jc, r, n)
        jpow_low.append(jm[: m + 1].copy())
        if m > ell:
            break
        sm = np.zeros(width, dtype=np.int64)
        # exponent e = (k - m) with k the shifted index; need e = l*t, t in [-1, prec]
        for t in range(-1, prec + 1):
            k = ell * t + m
            if 0 <= k < n:
                sm[t + 1] = ell * int(jm[k]) % r
        s.append(sm)

    def smul(u, v):
        # both with offset 1; result offset 2 then shifted back to offset 1
        w = np.convolve(u, v) % r
        out = np.zeros(width, dtype=np.int64)
        # w index i <-> exponent i - 2
        out[:] = w[1: width + 1]
        return out

    e = [np.zeros(width, dtype=np.int64) for _ in range(ell + 1)]
    e[0][1] = 1
    for i in range(1, ell + 1):
        acc = np.zeros(width, dtype=np.int64)
        for k in range(1, i + 1):
            term = smul(e[i - k], s[k])
            acc = (acc + term) % r if k % 2 else (acc - term) % r
        e[i] = acc * inv[i] % r

    # G_k = coefficient of X^k in prod (X - conj) = (-1)^(l-k) e_(l-k)
    G = []
    for k in range(ell + 1):
        g = e[ell - k]
        G.append(g if (ell - k) % 2 == 0 else (-g) % r)

    def coeff(series, ex):
        idx = ex + 1
        return int(series[idx]) if 0 <= idx < width else 0

    table = [[0] * (ell + 2) for _ in range(ell + 2)]
    for k in range(ell + 2):
        # F_k = G_(k-1) - j(q^l) G_k on exponents -(l+1)..0
        F = {}
        for ex in range(-(ell + 1), 1):
            v = coeff(G[k - 1], ex) if k >= 1 else 0
            if k <= ell:
                v -= coeff(G[k], ex + ell) + 744 * coeff(G[k], ex)
            F[ex] = v % r
        for m in range(ell + 1, -1, -1):
            a = F[-m]
            table[k][m] = a
            if a:
                low = jpow_low[m]
                for idx in range(m + 1):
                    ex = idx - m
                    F[ex] = (F[ex] - a * int(low[idx])) % r
    return table


def height_bits(ell):
    # h(Phi_l) <= 6 l log l + 18 l (natural log)
    return int((6 * ell * math.log(ell) + 18 * ell) / math.log(2)) + 64


def compute_phi(ell, verbose=True):
    n = ell * (ell + 1) + ell + 2
    part = partitions(n)
    sig = sigma3(n)
    bits = height_bits(ell)
    acc, mod = None, 1
    r = PRIME_TOP
    count = 0
    while mod.bit_length() <= bits + 1:
        r = prevprime(r)
        t = phi_mod(ell, r, part, sig)
        count += 1
        if acc is None:
            acc = [[x for x in row] for row in t]
            mod = r
            continue
        inv = pow(mod, -1, r)
        for i in range(ell + 2):
            row, trow = acc[i], t[i]
            for k in range(ell + 2):
                x = row[k]
                row[k] = x + mod * ((trow[k] - x) * inv % r)
        mod *= r
    half = mod // 2
    out = {}
    for i in range(ell + 2):
        for k in range(ell + 2):
            v = acc[i][k]
            if v > half:
                v -= mod
            if v:
                out[(i, k)] = v
    if verbose:
        print(f"ell={ell}: {count} primes, {len(out)} nonzero terms", file=sys.stderr)
    return out


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("levels", type=int, nargs="+")
    ap.add_argument("--out", required=True)
    args = ap.parse_args(argv)

    from seacount.modpoly import ModPoly, format_record, validate_kronecker

    os.makedirs(args.out, exist_ok=True)
    for ell in args.levels:
        coeffs = compute_phi(ell)
        for (i, k), v in coeffs.items():
            if coeffs.get((k, i)) != v:
                raise SystemExit(f"ell={ell}: asymmetric at {(i, k)}")
        stored = {(i, k): v for (i, k), v in coeffs.items() if i >= k}
        phi = ModPoly(ell, stored)
        if not validate_kronecker(phi):
            raise SystemExit(f"ell={ell}: Kronecker congruence fails")
        path = os.path.join(args.out, f"phi_{ell}.txt")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(format_record(phi))


if __name__ == "__main__":
    main()
