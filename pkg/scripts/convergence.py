"""Iteration counts and timings of the rounded Newton solver on closed-form instances.

For each instance and precision j, prints the worst-case budget h, the number
of iterations actually run (the solver stops once an iterate repeats), the
first iterate within 2^-j of the reference value, and wall time. Irrational
references carry 128 bits, so errors bottom out near 1e-39.
"""

import argparse
import time
from fractions import Fraction
from math import isqrt

from ppsolve.gnm import solve
from ppsolve.textio import parse_system


def quadratic(a, b):
    """Text and 128-bit reference for the least root of x = a x^2 + b."""
    text = f"x1 = {a}*x2 + {b}\nx2 = x1*x1\n"
    a, b = Fraction(a), Fraction(b)
    disc = 1 - 4 * a * b
    scale = 2 ** 128
    root = Fraction(isqrt(int(disc * scale * scale)), scale)
    return text, (1 - root) / (2 * a)


INSTANCES = {
    "rational 1/3": quadratic("3/4", "1/4"),
    "1-sqrt(2/5)": quadratic("1/2", "3/10"),
    "1-sqrt(1/2)": quadratic("1/2", "1/4"),
    "near-critical": quadratic("1/2", "499/1000"),
}


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--js", type=int, nargs="+", default=[5, 10, 20, 50, 100])
    args = p.parse_args(argv)
    print(f"{'instance':<15}{'j':>5}{'h':>6}{'run':>6}{'first':>7}{'error':>12}{'secs':>9}")
    for name, (text, ref) in INSTANCES.items():
        sys_ = parse_system(text)
        for j in args.js:
            t = time.perf_counter()
            rep = solve(sys_, j)
            dt = time.perf_counter() - t
            bound = Fraction(1, 2 ** j)
            first = next((k + 1 for k, it in enumerate(rep.iterates)
                          if abs(it.rounded[0] - ref) <= bound), None)
            err = float(abs(rep.approximation[0] - ref))
            print(f"{name:<15}{j:>5}{rep.h:>6}{rep.iterations_run:>6}{str(first):>7}{err:>12.2e}{dt:>9.4f}")


if __name__ == "__main__":
    main()
