"""Valuation argument for condition (*): a norm equation with no solution.

Setting: constants C = F_ell inside D = F_{ell^(p^n)}, cyclic of degree p^n
with Frobenius as generator.  A = D(x_0, ..., x_n) over B = C(x_0, ..., x_n),
and H_j = Gal(A/A_j) is generated by Frob^(p^j), of order p^(n-j).  For
0 <= j < n the norm equation

    x_j^(p^(n-j-1)) = x_1^(c_1 p^(n-1)) ... x_n^(c_n) N_{A/A_j}(gamma)

has no solution: the x_j-adic valuation of the right side is a multiple of
p^(n-j) (Galois elements fix the variables), the left side is not.  This
module computes both sides' valuations explicitly and reports the
two-case prediction alongside the factorization-free congruence.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

from .fpoly import FpPoly, is_irreducible, is_prime, monic_polys, powmod, prime_factors

FIELD_SIZE_CAP = 10**6

CASE_COPRIME = "x_j does not divide any q_l"
CASE_DIVIDES = "x_j divides some q_l"


class GF:
    """GF(ell^k) with elements encoded as ints (base-ell digit vectors) and log/exp tables."""

    def __init__(self, ell: int, k: int):
        if not is_prime(ell):
            raise ValueError(f"ell = {ell} is not prime")
        q = ell**k
        if q > FIELD_SIZE_CAP:
            raise ValueError(f"GF({ell}^{k}) exceeds the table cap {FIELD_SIZE_CAP}")
        self.ell, self.k, self.q = ell, k, q
        self.modulus = self._primitive_poly()
        g = list(self.modulus.coeffs)
        self.exp = [0] * (q - 1)
        self.log = [-1] * q
        cur = [1] + [0] * (k - 1)
        for e in range(q - 1):
            code = self._encode(cur)
            self.exp[e] = code
            self.log[code] = e
            # multiply by z and reduce by the monic modulus
            top = cur[-1]
            cur = [0] + cur[:-1]
            if top:
                cur = [(a - top * b) % ell for a, b in zip(cur, g[:k])]
        if sorted(self.log[1:]) != list(range(q - 1)):
            raise AssertionError("modulus is not primitive")

    def _primitive_poly(self) -> FpPoly:
        ell, k, q = self.ell, self.k, self.ell**self.k
        z = FpPoly.x(ell)
        for g in monic_polys(ell, k):
            if not is_irreducible(g):
                continue
            if k == 1:
                # degree-1 modulus: field is F_ell; z = -g_0 must be a generator
                root = -g.coeffs[0] % ell
                if root and all(pow(root, (q - 1) // r, ell) != 1 for r in prime_factors(q - 1)):
                    return g
                continue
            if all(powmod(z, (q - 1) // r, g) != FpPoly.const(ell, 1) for r in prime_factors(q - 1)):
                return g
        raise AssertionError("no primitive polynomial found")

    def _encode(self, digits: Sequence[int]) -> int:
        code = 0
        for d in reversed(digits):
            code = code * self.ell + d
        return code

    def digits(self, a: int) -> list[int]:
        out = []
        for _ in range(self.k):
            out.append(a % self.ell)
            a //= self.ell
        return out

    def add(self, a: int, b: int) -> int:
        ell = self.ell
        code, place = 0, 1
        while a or b:
            code += ((a % ell + b % ell) % ell) * place
            a //= ell
            b //= ell
            place *= ell
        return code

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self.exp[(self.log[a] + self.log[b]) % (self.q - 1)]

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            if e <= 0:
                raise ZeroDivisionError("0 to a non-positive power")
            return 0
        return self.exp[(self.log[a] * e) % (self.q - 1)]

    def inv(self, a: int) -> int:
        return self.pow(a, -1)

    def frob(self, a: int, times: int = 1) -> int:
        """a^(ell^times)."""
        if a == 0:
            return 0
        return self.exp[(self.log[a] * pow(self.ell, times, self.q - 1)) % (self.q - 1)]

    def from_int(self, c: int) -> int:
        """Embed the prime-field element c."""
        return c % self.ell

    def in_prime_field(self, a: int) -> bool:
        return a < self.ell


@dataclass(frozen=True)
class CoeffTower:
    p: int
    n: int
    ell: int

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"p = {self.p} is not prime")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        object.__setattr__(self, "field", GF(self.ell, self.p**self.n))
        gen = self.field.exp[1] if self.field.q > 2 else 1
        order = next(k for k in range(1, self.p**self.n + 1) if self.field.frob(gen, k) == gen)
        if order != self.p**self.n:
            raise AssertionError("Frobenius does not have order p^n")

    @property
    def D(self) -> GF:
        return self.field  # type: ignore[attr-defined]

    @property
    def nvars(self) -> int:
        return self.n + 1

    def h_order(self, j: int) -> int:
        return self.p ** (self.n - j)

    def h_elements(self, j: int) -> list[int]:
        """Frobenius powers making up H_j = <Frob^(p^j)>."""
        step = self.p**j
        return [k * step for k in range(self.h_order(j))]


class MultiPoly:
    """Sparse Laurent polynomial in x_0..x_n over D: {exponent tuple: nonzero D element}."""

    __slots__ = ("D", "nvars", "terms")

    def __init__(self, D: GF, nvars: int, terms: dict | None = None):
        self.D = D
        self.nvars = nvars
        self.terms = {e: c for e, c in (terms or {}).items() if c}

    @classmethod
    def const(cls, D: GF, nvars: int, c: int) -> MultiPoly:
        return cls(D, nvars, {(0,) * nvars: c})

    @classmethod
    def monomial(cls, D: GF, exps: Sequence[int], c: int = 1) -> MultiPoly:
        return cls(D, len(exps), {tuple(exps): c})

    @classmethod
    def var(cls, D: GF, nvars: int, j: int, power: int = 1) -> MultiPoly:
        e = [0] * nvars
        e[j] = power
        return cls.monomial(D, e)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        return isinstance(other, MultiPoly) and self.terms == other.terms and self.nvars == other.nvars

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other: MultiPoly) -> MultiPoly:
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = self.D.add(out.get(e, 0), c)
        return MultiPoly(self.D, self.nvars, out)

    def __mul__(self, other: MultiPoly) -> MultiPoly:
        D = self.D
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = D.add(out.get(e, 0), D.mul(c1, c2))
        return MultiPoly(D, self.nvars, out)

    def __pow__(self, k: int) -> MultiPoly:
        if k < 0:
            if len(self.terms) != 1:
                raise ValueError("only monomials have Laurent inverses")
            (e, c), = self.terms.items()
            return MultiPoly(self.D, self.nvars, {tuple(-a for a in e): self.D.inv(c)}) ** (-k)
        out = MultiPoly.const(self.D, self.nvars, 1)
        for _ in range(k):
            out = out * self
        return out

    def frob(self, times: int) -> MultiPoly:
        """Apply Frob^times to every coefficient; variables are fixed."""
        return MultiPoly(self.D, self.nvars, {e: self.D.frob(c, times) for e, c in self.terms.items()})

    def vj(self, j: int) -> int:
        """Largest power of x_j dividing self (minimum x_j-exponent)."""
        if not self.terms:
            raise ValueError("valuation of zero")
        return min(e[j] for e in self.terms)

    def coefficients_fixed_by(self, times: int) -> bool:
        return all(self.D.frob(c, times) == c for c in self.terms.values())

    def __repr__(self) -> str:
        return f"MultiPoly({self.terms})"


@dataclass(frozen=True)
class FactoredMultivar:
    """unit * prod num^mult / prod den^mult."""

    unit: int
    numerator: tuple[tuple[MultiPoly, int], ...] = ()
    denominator: tuple[tuple[MultiPoly, int], ...] = ()

    def __post_init__(self):
        if self.unit == 0:
            raise ValueError("zero unit")
        for f, _ in self.numerator + self.denominator:
            if f.is_zero():
                raise ValueError("zero factor")

    def expand(self, nvars: int, D: GF) -> tuple[MultiPoly, MultiPoly]:
        num = MultiPoly.const(D, nvars, self.unit)
        for f, k in self.numerator:
            num = num * f**k
        den = MultiPoly.const(D, nvars, 1)
        for f, k in self.denominator:
            den = den * f**k
        return num, den


def vj(f: FactoredMultivar, j: int) -> int:
    """x_j-adic valuation: numerator factors minus denominator factors."""
    return sum(k * g.vj(j) for g, k in f.numerator) - sum(k * g.vj(j) for g, k in f.denominator)


def galois_norm(tower: CoeffTower, f: FactoredMultivar, j: int) -> FactoredMultivar:
    """N_{A/A_j}(f) = prod over h in H_j of h(f), kept in factored form."""
    if not 0 <= j <= tower.n:
        raise ValueError(f"j = {j} outside [0, {tower.n}]")
    D = tower.D
    hs = tower.h_elements(j)
    unit = 1
    for h in hs:
        unit = D.mul(unit, D.frob(f.unit, h))
    num = tuple((g.frob(h), k) for g, k in f.numerator for h in hs)
    den = tuple((g.frob(h), k) for g, k in f.denominator for h in hs)
    return FactoredMultivar(unit, num, den)


@dataclass
class EquationReport:
    j: int
    case: str
    lhs_vj: int
    rhs_vj: int
    predicted_lhs_vj: int
    modulus: int
    lhs_residue: int
    rhs_residue: int
    mismatch: bool
    congruence_ok: bool
    norm_invariant_ok: bool
    expanded_ok: bool | None = None

    @property
    def impossible(self) -> bool:
        return self.mismatch and self.congruence_ok

    def to_dict(self) -> dict:
        return {k: v for k, v in self.__dict__.items()} | {"impossible": self.impossible}


def check_equation_impossible(
    tower: CoeffTower,
    j: int,
    c: Sequence[int],
    gamma: FactoredMultivar,
    *,
    expand: bool = False,
) -> EquationReport:
    """Valuations of both sides of x_j^(p^(n-j-1)) prod h(q) = x^c N(u) prod h(p).

    c = (c_1, ..., c_n); x_k carries exponent c_k p^(n-k).  With
    ``expand=True`` both sides are multiplied out and v_j is recomputed
    from the expanded Laurent polynomials.
    """
    p, n = tower.p, tower.n
    if not 0 <= j < n:
        raise ValueError(f"j = {j} outside [0, {n})")
    if len(c) != n:
        raise ValueError(f"expected exponents c_1..c_{n}")
    D = tower.D
    nv = tower.nvars
    N = galois_norm(tower, gamma, j)
    lhs_x = MultiPoly.var(D, nv, j, p ** (n - j - 1))
    lhs = FactoredMultivar(1, ((lhs_x, 1),) + N.denominator)
    exps = [0] * nv
    for k in range(1, n + 1):
        exps[k] = c[k - 1] * p ** (n - k)
    rhs = FactoredMultivar(N.unit, ((MultiPoly.monomial(D, exps), 1),) + N.numerator)
    lhs_v, rhs_v = vj(lhs, j), vj(rhs, j)

    q_val = sum(k * g.vj(j) for g, k in gamma.denominator)
    divides = any(g.vj(j) > 0 for g, _ in gamma.denominator)
    case = CASE_DIVIDES if divides else CASE_COPRIME
    predicted_lhs = p ** (n - j - 1) + p ** (n - j) * q_val

    mod = p ** (n - j)
    lhs_res, rhs_res = lhs_v % mod, rhs_v % mod
    congruence = rhs_res == 0 and lhs_res == p ** (n - j - 1)
    invariant = vj(N, j) == tower.h_order(j) * vj(gamma, j)

    expanded_ok = None
    if expand:
        ln, ld = lhs.expand(nv, D)
        rn, rd = rhs.expand(nv, D)
        expanded_ok = ln.vj(j) - ld.vj(j) == lhs_v and rn.vj(j) - rd.vj(j) == rhs_v
        nn, nd = N.expand(nv, D)
        fixed = tower.p**j
        expanded_ok = expanded_ok and nn.coefficients_fixed_by(fixed) and nd.coefficients_fixed_by(fixed)

    return EquationReport(
        j=j,
        case=case,
        lhs_vj=lhs_v,
        rhs_vj=rhs_v,
        predicted_lhs_vj=predicted_lhs,
        modulus=mod,
        lhs_residue=lhs_res,
        rhs_residue=rhs_res,
        mismatch=lhs_v != rhs_v,
        congruence_ok=congruence,
        norm_invariant_ok=invariant,
        expanded_ok=expanded_ok,
    )


def random_multipoly(tower: CoeffTower, rng: random.Random, max_terms: int = 3, max_deg: int = 2) -> MultiPoly:
    D = tower.D
    nv = tower.nvars
    while True:
        terms = {}
        for _ in range(rng.randint(1, max_terms)):
            e = tuple(rng.randint(0, max_deg) for _ in range(nv))
            terms[e] = rng.randrange(1, D.q)
        f = MultiPoly(D, nv, terms)
        if not f.is_zero():
            return f


def random_gamma(tower: CoeffTower, rng: random.Random, max_factors: int = 2, max_terms: int = 3, max_deg: int = 2) -> FactoredMultivar:
    """Random gamma = u * (prod p_i) / (prod q_i); some factors are bare variables."""
    D = tower.D
    nv = tower.nvars

    def factor_list():
        out = []
        for _ in range(rng.randint(0, max_factors)):
            if rng.random() < 0.35:
                g = MultiPoly.var(D, nv, rng.randrange(nv))
            else:
                g = random_multipoly(tower, rng, max_terms, max_deg)
            out.append((g, rng.randint(1, 2)))
        return tuple(out)

    return FactoredMultivar(rng.randrange(1, D.q), factor_list(), factor_list())


def fuzz_condition_star(
    tower: CoeffTower,
    trials: int,
    seed: int = 0,
    *,
    c_bound: int = 2,
    max_factors: int = 2,
    max_terms: int = 3,
    max_deg: int = 2,
    expand_every: int = 10,
) -> dict:
    """Random (c, gamma) for every j; each trial must show a v_j mismatch for all j.

    Trial k draws from ``random.Random(f"{seed}:{k}")`` so any trial can be
    replayed alone.  Every ``expand_every``-th trial also multiplies the
    sides out to cross-check the factored valuations.
    """
    case_counts = {CASE_COPRIME: 0, CASE_DIVIDES: 0}
    mismatches = 0
    invariant_failures = []
    counterexamples = []
    expanded = 0
    for k in range(trials):
        rng = random.Random(f"{seed}:{k}")
        gamma = random_gamma(tower, rng, max_factors, max_terms, max_deg)
        c = [rng.randint(-c_bound, c_bound) for _ in range(tower.n)]
        do_expand = expand_every > 0 and k % expand_every == 0
        ok = True
        for j in range(tower.n):
            rep = check_equation_impossible(tower, j, c, gamma, expand=do_expand)
            case_counts[rep.case] += 1
            if not rep.norm_invariant_ok:
                invariant_failures.append({"trial": k, "j": j})
            if not rep.impossible or rep.expanded_ok is False:
                ok = False
                counterexamples.append({"trial": k, "j": j, "c": c, "report": rep.to_dict()})
        expanded += do_expand
        mismatches += ok
    if counterexamples:
        raise AssertionError(f"valuation mismatch missing; reproduce with seed={seed}: {counterexamples[0]}")
    return {
        "p": tower.p,
        "n": tower.n,
        "ell": tower.ell,
        "trials": trials,
        "seed": seed,
        "mismatches": mismatches,
        "case_counts": case_counts,
        "invariant_failures": invariant_failures,
        "expanded_trials": expanded,
        "counterexamples": counterexamples,
    }
