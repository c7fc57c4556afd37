"""Period versus series across arguments of alpha on a fixed modulus."""
import argparse
from fractions import Fraction

import mpmath

from jkmirror.periods import period_series_check, scaled_alpha


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k", type=int, default=1)
    ap.add_argument("--factor", default="1e-3", help="|alpha| as a multiple of alpha_crit")
    ap.add_argument("--steps", type=int, default=8)
    ap.add_argument("--prec", type=int, default=256)
    o = ap.parse_args()
    for i in range(o.steps):
        angle = Fraction(2 * i, o.steps)
        al = scaled_alpha(o.k, o.factor, angle, o.prec)
        res = period_series_check(o.k, al, o.prec)
        print(f"arg/pi={str(angle):>5}  agreement={mpmath.nstr(res.agreement, 3):>10}  "
              f"N={res.period.sample_count:>5}  period={mpmath.nstr(res.period.value, 20)}")


if __name__ == "__main__":
    main()
