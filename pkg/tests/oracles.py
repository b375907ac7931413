"""Independent oracles shared by the unit and acceptance tests (sympy and enumeration only)."""

import itertools

from sympy import GF, Poly, symbols
from sympy.polys.matrices import DomainMatrix

T = symbols("t")


def trace_of_t(r):
    """Tr_{F_p[t]/(r) / F_p}(t) for a monic irreducible FpPoly r, via sympy."""
    p = r.p
    R = Poly(list(reversed(r.coeffs)), T, modulus=p)
    x = Poly(T, T, modulus=p)
    acc = Poly(0, T, modulus=p)
    for _ in range(r.degree):
        acc = acc + x
        x = (x**p).rem(R)
    acc = acc.rem(R)
    assert acc.degree() <= 0
    return int(acc.all_coeffs()[-1]) % p


def split_by_trace(r):
    # X^p - X - t has a root in F_p[t]/(r) iff the trace of t vanishes
    return trace_of_t(r) == 0


def jordan_partition(rows, p):
    """Unipotent block sizes from ranks of (A - I)^k over GF(p), descending."""
    size = len(rows)
    K = GF(p)
    N = DomainMatrix([[K(x) for x in row] for row in rows], (size, size), K) - DomainMatrix.eye(size, K)
    ranks = [size]
    P = DomainMatrix.eye(size, K)
    while ranks[-1]:
        P = P * N
        ranks.append(P.rank())
    ge = [ranks[k - 1] - ranks[k] for k in range(1, len(ranks))]
    out = []
    for k, count in enumerate(ge, start=1):
        nxt = ge[k] if k < len(ge) else 0
        out += [k] * (count - nxt)
    return sorted(out, reverse=True)


def span_set(gens, dim, mod):
    """All integer combinations of gens mod `mod`, by enumeration."""
    out = set()
    for coeffs in itertools.product(range(mod), repeat=len(gens)):
        out.add(tuple(sum(c * g[k] for c, g in zip(coeffs, gens)) % mod for k in range(dim)))
    return out
