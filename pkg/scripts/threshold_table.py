#!/usr/bin/env python3
"""Print c_k, mu_k, d_k, the core fraction and the two-term residuals for a range of k."""

import argparse

from regsub.thresholds import emergence_threshold, expansion_residual


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--k", type=int, nargs="+", default=[3, 4, 5, 6, 10, 20, 50, 100, 200, 500])
    args = p.parse_args()
    print(f"{'k':>5} {'c_k':>12} {'mu_k':>12} {'d_k':>12} {'f_k(mu_k)':>10} {'res(d_k)':>9}")
    for k in args.k:
        t = emergence_threshold(k)
        print(f"{k:>5} {t.c_k:12.6f} {t.mu_k:12.6f} {t.d_k:12.6f} {t.core_fraction:10.6f} "
              f"{expansion_residual(t.d_k, k):9.3f}")


if __name__ == "__main__":
    main()
