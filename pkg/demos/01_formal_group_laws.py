"""Formal group laws, their p-series, and the height read off the
Weierstrass degree of [p](x)."""

from fgl_lab import (Zmod, check_axioms, divided_p_series, honda, make_builtin,
                     n_series, p_series, weierstrass_prepare)

N = 12
G = make_builtin("multiplicative", N)
print("multiplicative law:", G.series)
print("axioms hold:", check_axioms(G).passed)

# [n](x) for the multiplicative law is (1+x)^n - 1
for n in (2, 3, -1):
    print(f"[{n}](x) =", n_series(G, n).series)

# [p](x) = x <p>(x); the height is the Weierstrass degree of [p] mod p^k
for p in (2, 3):
    for label, law in (("multiplicative", G), ("honda h=2", honda(p, 2, 16))):
        prep = weierstrass_prepare(p_series(law, p).change_ring(Zmod(p, 6)))
        print(f"p={p} {label}: Weierstrass degree {prep.degree}")
    print(f"<{p}>(x) =", divided_p_series(G, p))
