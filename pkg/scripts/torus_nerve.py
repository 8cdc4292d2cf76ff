"""Nerves of arc covers of the circle and patch covers of the flat torus, with their homology."""

from visbound.cover import Arc, ProductPatch, exact_oracle, nerve
from visbound.homology import homology


def report(name, cover):
    nc = nerve(cover, exact_oracle(cover))
    h = homology(nc, primes=(2, 3))
    print(f"{name:>14}: f = {nc.f_vector()}, betti = {h.betti()}")


def main():
    for k in range(3, 7):
        report(f"circle, {k} arcs", [Arc(i / k, 1 / k + 0.05) for i in range(k)])
    for m in (3, 4):
        cover = [ProductPatch((Arc(i / m, 1 / m + 0.1), Arc(j / m, 1 / m + 0.1)))
                 for i in range(m) for j in range(m)]
        report(f"torus, {m}x{m}", cover)


if __name__ == "__main__":
    main()
