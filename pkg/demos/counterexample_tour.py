"""Tour of small families that have no full rainbow matching.

Three constructions where every colour class is reasonably large yet no
system of disjoint representatives exists, each certified by the exact
oracle: two edge-disjoint K4's sharing a proper 3-colouring, the
double-star families, and even-order cyclic Latin squares (their
transversals are exactly full rainbow matchings of the row/column family).

Run: python demos/counterexample_tour.py
"""

from rainbow_nibble import (compute_stats, enumerate_oracle, find_full,
                            gen_double_star, gen_latin, gen_two_k4,
                            lift_to_3uniform, max_rainbow)


def show(name, fam):
    st = compute_stats(fam)
    res = find_full(fam)
    best = max_rainbow(fam)
    print(f"{name}: k={fam.k} n={fam.num_vertices} m={fam.m} "
          f"sizes={st.min_size}..{st.max_size} max_degree={st.max_degree}")
    print(f"  full rainbow matching: {res.status} "
          f"({res.nodes} search nodes); best partial size {best.size}")
    return res.status


def main():
    print("-- two K4's, 3 colour classes of 4 edges each --")
    show("two-K4", gen_two_k4())

    print("\n-- double stars: m+1 classes of size m, none selectable --")
    for m in (2, 4, 6):
        show(f"double-star m={m}", gen_double_star(m))

    print("\n-- cyclic Latin squares: transversal iff order is odd --")
    for order in range(2, 8):
        fam = gen_latin(order)
        count = enumerate_oracle(fam)
        status = show(f"cyclic order {order}", fam)
        print(f"  transversal count = {count}")
        assert (status == "found") == (order % 2 == 1) == (count > 0)

    print("\n-- the obstruction survives lifting to 3-uniform hypergraphs --")
    lifted = lift_to_3uniform(gen_latin(4))
    show("lifted cyclic order 4", lifted.family)


if __name__ == "__main__":
    main()
