"""Build growth functions for an exponential tail and for an explicit family.

Run:  python3 scripts/psi_demo.py
"""

import math

import numpy as np

from sdlattice import ExplicitFamily, TailOracle, build_psi_dlvp, build_psi_tight, make_discrete


def main():
    oracle = TailOracle(lambda s: math.exp(-s), lambda s: (s + 1) * math.exp(-s))
    tight = build_psi_tight(oracle, 6)
    print("exponential tail, thresholds:", np.round(tight.thresholds, 4).tolist())
    print(f"  sup_mu int psi dmu <= {tight.certificate}")

    psi = build_psi_dlvp(oracle, 0.5, levels=12)
    grid = np.array([0.0, 1.0, 5.0, 10.0, 20.0])
    print("  superlinear psi on", grid.tolist())
    print("    psi(s)   ", np.round(psi(grid), 4).tolist())
    print("    psi(s)/s ", np.round(psi.ratio(grid), 4).tolist())
    print(f"  bound {psi.certificate:.4g}")

    fam = ExplicitFamily.of(make_discrete([(0, 0.5), (1, 0.3), (5, 0.2)]), make_discrete([(2, 0.9), (10, 0.1)]))
    res = build_psi_tight(fam, 4)
    print("explicit family, thresholds:", list(res.thresholds), "exact:", res.exact)


if __name__ == "__main__":
    main()
