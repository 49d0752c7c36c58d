"""Reference computations that share no code with the package."""


def _cyclotomic_reduce(v, p):
    """Reduce a polynomial in w modulo 1 + w + ... + w^(p-1)."""
    v = list(v) + [0] * max(0, p - 1 - len(v))
    for k in range(len(v) - 1, p - 2, -1):
        c = v[k]
        if c:
            v[k] = 0
            for j in range(1, p):
                v[k - j] -= c
    return v[:p - 1]


def _cyclotomic_mul(a, b, p):
    out = [0] * (len(a) + len(b))
    for i, s in enumerate(a):
        for j, t in enumerate(b):
            out[i + j] += s * t
    return _cyclotomic_reduce(out, p)


def root_of_unity_product(p):
    """prod_i ((1+x) w^i - 1) as {x-degree: element of Z[w]/Phi_p}."""
    one = _cyclotomic_reduce([1], p)
    prod = {0: one}
    for i in range(p):
        w = _cyclotomic_reduce([0] * i + [1], p)
        factor = {0: [a - b for a, b in zip(w, one)], 1: w}
        nxt = {}
        for d1, a in prod.items():
            for d2, b in factor.items():
                c = _cyclotomic_mul(a, b, p)
                nxt[d1 + d2] = [s + t for s, t in zip(nxt.get(d1 + d2, [0] * (p - 1)), c)]
        prod = nxt
    return prod


def frobenius_product(p, N):
    """prod_i (x + i z) mod p by plain expansion."""
    prod = {(0, 0): 1}
    for i in range(p):
        nxt = {}
        for (a, b), c in prod.items():
            for (da, db), k in (((0, 1), 1), ((1, 0), i)):
                key = (a + da, b + db)
                nxt[key] = (nxt.get(key, 0) + c * k) % p
        prod = {k: v for k, v in nxt.items() if v and sum(k) < N}
    return prod




def binomial_n_series(n, order):
    """Coefficients of (1 + x)^n - 1 below ``order``, for n >= 0."""
    from math import comb
    return {k: comb(n, k) for k in range(1, min(n, order - 1) + 1)}


def cyclotomic_at_one(p):
    """prod_{i=1}^{p-1} (w^i - 1) in Z[w]/Phi_p: the x-coefficient of the product."""
    acc = _cyclotomic_reduce([1], p)
    for i in range(1, p):
        w = _cyclotomic_reduce([0] * i + [1], p)
        acc = _cyclotomic_mul(acc, [a - b for a, b in zip(w, _cyclotomic_reduce([1], p))], p)
    return acc
