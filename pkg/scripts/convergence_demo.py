"""Monotone approximation of a supremum by an increasing Dirac sequence.

Prints the Levy and Wasserstein distances from the running join to the
limit, which should both decay like 1/n.

Run:  python3 scripts/convergence_demo.py [steps]
"""

import itertools
import sys

from sdlattice import DirectedFamily, dirac, levy, monotone_sup_approx, wasserstein1


def main(steps=64):
    family = DirectedFamily(lambda: (dirac(1 - 1 / n) for n in itertools.count(1)))
    res = monotone_sup_approx(family, "st", tolerance=1e-12, max_steps=steps, reference=dirac(1.0))
    print(f"{'n':>5} {'levy':>12} {'w1':>12}")
    for n, mu in enumerate(res.sequence, start=1):
        if n & (n - 1) == 0 or n == steps:
            print(f"{n:>5} {levy(mu, dirac(1.0)):>12.3e} {wasserstein1(mu, dirac(1.0)):>12.3e}")
    print(f"converged={res.converged} steps={res.steps}")


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 64)
