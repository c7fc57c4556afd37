"""Exploratory fit of count_W(q) + q*S_q against a cubic in q.

The relation between the threefold count and the curve character sum is only
known up to lower-order terms, so this reports least-squares residuals rather
than a pass/fail verdict.
"""
import argparse

import mpmath

from jkmirror.pencil import charsum_Y, is_degenerate_mod, is_odd_prime
from jkmirror.threefold import count_W


def collect(k: int, alpha: int, qmax: int):
    rows = []
    for q in range(5, qmax + 1):
        if not is_odd_prime(q) or alpha % q == 0 or is_degenerate_mod(k, alpha, q):
            continue
        w = count_W(k, alpha, q)
        s = charsum_Y(k, alpha, q).S
        rows.append((q, w, s, w + q * s))
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k", type=int, default=1)
    ap.add_argument("--alpha", type=int, default=1)
    ap.add_argument("--qmax", type=int, default=61)
    o = ap.parse_args()
    rows = collect(o.k, o.alpha, o.qmax)
    if len(rows) < 5:
        ap.error("need at least five good primes; raise --qmax")
    A = mpmath.matrix([[q**i for i in range(4)] for q, *_ in rows])
    b = mpmath.matrix([r[3] for r in rows])
    coef, _ = mpmath.qr_solve(A, b)
    print(f"k={o.k} alpha={o.alpha}  fit: " + " + ".join(f"{mpmath.nstr(c, 6)} q^{i}" for i, c in enumerate(coef)))
    print(f"{'q':>4} {'count_W':>10} {'S_q':>6} {'W+qS':>10} {'residual':>10}")
    for q, w, s, v in rows:
        fit = sum(coef[j] * q**j for j in range(4))
        print(f"{q:>4} {w:>10} {s:>6} {v:>10} {mpmath.nstr(v - fit, 5):>10}")


if __name__ == "__main__":
    main()
