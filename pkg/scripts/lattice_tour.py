"""Joins and meets of two small distributions under each order.

Run:  python3 scripts/lattice_tour.py
"""

from sdlattice import dirac, join, leq, make_discrete, mean, meet


def show(label, mu):
    pts = ", ".join(f"{x:g}:{p:.4g}" for x, p in zip(mu.support, mu.weights))
    print(f"  {label:<6} {{{pts}}}  mean={mean(mu):.4g}")


def main():
    a = make_discrete([(0, 0.5), (2, 0.5)])
    b = dirac(1.5)
    for order in ("st", "icv", "icx"):
        print(f"order {order}: a <= b {bool(leq(a, b, order))}, b <= a {bool(leq(b, a, order))}")
        top, bottom = join(a, b, order), meet(a, b, order)
        show("join", top)
        show("meet", bottom)
        assert leq(a, top, order) and leq(b, top, order)
        assert leq(bottom, a, order) and leq(bottom, b, order)


if __name__ == "__main__":
    main()
