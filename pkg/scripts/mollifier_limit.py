"""Scaled gaps ``n (y_n(xi) - y(xi))`` for the mollified atom against ``Phi^{-1}(xi / alpha)``.

``gap`` uses the characteristic of the mollified state (split energy
``mu_n``); ``gap_hat`` uses the unsplit mollified energy.
"""
import argparse

from chlab.reference import mollifier_limit_rows


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--alpha", type=float, default=2.0)
    ap.add_argument("--fractions", type=float, nargs="+", default=[0.1, 0.25, 0.5, 0.75, 0.9])
    ap.add_argument("--n", type=int, nargs="+", default=[2, 4, 8, 16, 32, 64, 128, 256])
    args = ap.parse_args()

    for frac in args.fractions:
        rows = mollifier_limit_rows(args.alpha, frac * args.alpha, args.n)
        print(f"xi/alpha = {frac}: target {rows[0].target:+.6f}")
        for r in rows:
            print(f"  n={r.n:4d}  gap {r.gap:+.6f} ({r.gap - r.target:+.2e})  gap_hat {r.gap_hat:+.6f} "
                  f"({r.gap_hat - r.target:+.2e})")


if __name__ == "__main__":
    main()
