"""The two quotient rings attached to a law at p, their invariants under
the F_p^x action, and the injectivity of the combined map."""

from fgl_lab import (Precision, ZpLocal, build_bcp_ring, build_transfer_quotient,
                     fpx_invariants, injectivity_property, make_builtin)

p = 3
G = make_builtin("multiplicative", 16, ZpLocal(p))
prec = Precision(16, 6)

bcp = build_bcp_ring(G, p, prec)
transfer = build_transfer_quotient(G, p, prec)
print("ring cut out by <p>:     ", bcp)
print("transfer quotient:       ", transfer)
print("guaranteed p-adic digits:", bcp.precision, "and", transfer.precision)

inv = fpx_invariants(bcp, G, p)
print("F_p^x invariants: rank", inv.rank, "basis", [str(b) for b in inv.basis])

report = injectivity_property(G, p, prec, samples=200, seed=0)
print(f"injectivity on {report.samples} random elements:", "ok" if report.passed else report.failures[:3])
