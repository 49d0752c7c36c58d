"""Checking whether a candidate power operation satisfies the Ando
condition: the Lubin product of x must agree with psi(x) modulo the
transfer ideal."""

from fgl_lab import Precision, ZpLocal, ando_check, candidate, make_builtin

prec = Precision(16, 8)
for p in (3, 5):
    G = make_builtin("multiplicative", 16, ZpLocal(p))
    print(ando_check(G, p, candidate("adams", G, p, prec), prec))

# a deliberately wrong candidate fails at the first grlex monomial
G = make_builtin("multiplicative", 16, ZpLocal(3))
print(ando_check(G, 3, candidate("identity", G, 3, prec), prec))

# at p=2 the Adams operation only agrees up to the unit -1
G = make_builtin("multiplicative", 16, ZpLocal(2))
print(ando_check(G, 2, candidate("adams", G, 2, prec), prec))

# the additive law with the Frobenius candidate works at every prime
A = make_builtin("additive", 16)
for p in (2, 3, 5):
    print(ando_check(A, p, candidate("frobenius", A, p, prec), prec))

# too little precision leaves the verdict open rather than wrong
G = make_builtin("multiplicative", 4, ZpLocal(3))
print(ando_check(G, 3, candidate("adams", G, 3, Precision(4, 8)), Precision(4, 8)))
