"""Shortfall of extracted epsilon-optimal policies against exhaustive enumeration.

Generates random max and min systems, extracts a policy per instance, and
compares its value with the best value over all positional policies.
"""

import argparse
import random
import time
from fractions import Fraction

from ppsolve.generate import random_nontrivial
from ppsolve.policy import epsilon_policy, evaluate_policy
from ppsolve.qualitative import all_policies


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--count", type=int, default=50)
    p.add_argument("--epsilon", type=Fraction, default=Fraction(1, 1024))
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args(argv)
    rng = random.Random(args.seed)
    j = 20
    for flavor in ("max", "min"):
        worst, switches, secs = Fraction(0), 0, 0.0
        for _ in range(args.count):
            n = rng.randint(3, 6)
            s = random_nontrivial(rng, n, choices=rng.randint(1, min(3, n - 2)), flavor=flavor,
                                  min_choices=1)
            t = time.perf_counter()
            rep = epsilon_policy(s, args.epsilon)
            secs += time.perf_counter() - t
            switches += rep.switches
            values = [evaluate_policy(s, q, j) for q in all_policies(s)]
            chosen = evaluate_policy(s, rep.policy, j)
            pick = max if flavor == "max" else min
            for i in range(s.n):
                best = pick(v[i] for v in values)
                worst = max(worst, abs(best - chosen[i]))
        print(f"{flavor}: {args.count} instances, worst shortfall {float(worst):.3e} "
              f"(epsilon {float(args.epsilon):.3e}), repair switches {switches}, "
              f"mean extraction {secs / args.count * 1000:.1f} ms")


if __name__ == "__main__":
    main()
