"""Milnor K-theory mod p^s over iterated Laurent towers K((y_1))...((y_h)).

K is one of the two rational function fields of :mod:`artin_schreier`.
Symbol entries are monomials u * y_1^a_1 ... y_h^a_h with u in K^x.  A
class is stored in normal form: each symbol is a sorted tuple of atoms,
where an atom is a monic irreducible of K (an :class:`FpPoly`) or a tower
variable (its index, an int).  Base atoms precede variables and variables
are ascending, so the top variable, when present, is always last.

Rules used by the normalization, all valid in K_*/p^s in characteristic p:

* multilinearity, splitting every entry into prime and variable atoms;
* constants of F_p are p^s-th powers, hence vanish;
* antisymmetry {a, b} = -{b, a};
* {a, a} = {a, -1} = 0.

The Steinberg relation is not applied.  Two monic primes differing by a
nonzero constant satisfy c f + (-c) g = 1, so {f, g} = 0; symbols built
from such a pair are refused rather than silently mis-normalized.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence, Union

from . import fpoly
from .artin_schreier import (
    E_SIDE,
    F_SIDE,
    FactoredElement,
    enumerate_orbits,
    f_primes,
    factor,
    norm_E_to_F,
    rewrite_invariant,
)
from .fpoly import FpPoly
from .grouprings import PrimeParams
from .modp_linalg import MatrixModPS, solve

Atom = Union[FpPoly, int]


class SteinbergRequired(ValueError):
    """The symbol contains two primes linked by a Steinberg relation."""


class NotComputable(Exception):
    """The norm of a symbol with two or more genuinely E-side entries."""


@dataclass(frozen=True)
class TowerField:
    side: str
    p: int
    height: int = 0  # number of Laurent variables y_1..y_height

    def __post_init__(self):
        if self.side not in (E_SIDE, F_SIDE):
            raise ValueError(f"unknown side {self.side!r}")
        if self.height < 0:
            raise ValueError("negative tower height")

    @property
    def m(self) -> int:
        return self.height + 1

    def drop_top(self) -> TowerField:
        if self.height == 0:
            raise ValueError("no tower variable to remove")
        return TowerField(self.side, self.p, self.height - 1)

    def with_side(self, side: str) -> TowerField:
        return TowerField(side, self.p, self.height)


@dataclass(frozen=True)
class MonomialEntry:
    coefficient: FactoredElement
    exponents: tuple[int, ...] = ()

    @classmethod
    def var(cls, tower: TowerField, i: int, power: int = 1) -> MonomialEntry:
        if not 1 <= i <= tower.height:
            raise ValueError(f"y_{i} is not a variable of the tower")
        e = [0] * tower.height
        e[i - 1] = power
        return cls(FactoredElement.one(tower.side, tower.p), tuple(e))

    @classmethod
    def base(cls, tower: TowerField, u: FactoredElement) -> MonomialEntry:
        return cls(u, (0,) * tower.height)

    def atoms(self) -> list[tuple[Atom, int]]:
        out: list[tuple[Atom, int]] = [(f, e) for f, e in self.coefficient.factors]
        out += [(i + 1, a) for i, a in enumerate(self.exponents) if a]
        return out


def atom_key(a: Atom) -> tuple:
    if isinstance(a, int):
        return (1, a)
    return (0,) + a.sort_key()


def normalize(atoms: Sequence[Atom]) -> tuple[int, tuple[Atom, ...]] | None:
    """Sort atoms with the sign of the permutation; None if an atom repeats."""
    keys = [atom_key(a) for a in atoms]
    if len(set(keys)) != len(keys):
        return None
    order = sorted(range(len(atoms)), key=lambda k: keys[k])
    # parity via cycle decomposition
    seen = [False] * len(order)
    sign = 1
    for start in range(len(order)):
        if seen[start]:
            continue
        length = 0
        j = start
        while not seen[j]:
            seen[j] = True
            j = order[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign, tuple(atoms[k] for k in order)


def steinberg_pair(f: FpPoly, g: FpPoly) -> bool:
    """True when monic primes f != g differ by a nonzero constant."""
    return f != g and f.degree == g.degree and (f - g).degree == 0


@dataclass(frozen=True)
class MilnorClass:
    tower: TowerField
    s: int
    degree: int
    terms: tuple[tuple[tuple[Atom, ...], int], ...] = ()

    def __post_init__(self):
        mod = self.tower.p**self.s
        acc: dict[tuple[Atom, ...], int] = {}
        for sym, c in self.terms:
            if len(sym) != self.degree:
                raise ValueError("symbol length differs from the class degree")
            norm = normalize(sym)
            if norm is None:
                continue
            sign, key = norm
            acc[key] = (acc.get(key, 0) + sign * c) % mod
        items = sorted(((k, c) for k, c in acc.items() if c), key=lambda kc: [atom_key(a) for a in kc[0]])
        object.__setattr__(self, "terms", tuple(items))

    @property
    def modulus(self) -> int:
        return self.tower.p**self.s

    @classmethod
    def zero(cls, tower: TowerField, s: int, degree: int) -> MilnorClass:
        return cls(tower, s, degree)

    def is_zero(self) -> bool:
        return not self.terms

    def _check(self, other: MilnorClass) -> None:
        if (self.tower, self.s, self.degree) != (other.tower, other.s, other.degree):
            raise ValueError("classes live in different groups")

    def __add__(self, other: MilnorClass) -> MilnorClass:
        self._check(other)
        return MilnorClass(self.tower, self.s, self.degree, self.terms + other.terms)

    def __neg__(self) -> MilnorClass:
        return MilnorClass(self.tower, self.s, self.degree, tuple((k, -c) for k, c in self.terms))

    def __sub__(self, other: MilnorClass) -> MilnorClass:
        return self + (-other)

    def __mul__(self, c: int) -> MilnorClass:
        return MilnorClass(self.tower, self.s, self.degree, tuple((k, c * v) for k, v in self.terms))

    __rmul__ = __mul__

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        var = "theta" if self.tower.side == E_SIDE else "t"
        parts = []
        for sym, c in self.terms:
            inner = ", ".join(f"y_{a}" if isinstance(a, int) else a.to_str(var) for a in sym)
            parts.append(("" if c == 1 else f"{c}*") + "{" + inner + "}")
        return " + ".join(parts)

    def to_dict(self) -> dict:
        t = self.tower
        terms = []
        for sym, c in self.terms:
            entries = []
            for a in sym:
                if isinstance(a, int):
                    e = MonomialEntry.var(t, a)
                else:
                    e = MonomialEntry(FactoredElement.prime(t.side, a), (0,) * t.height)
                entries.append({"coefficient": e.coefficient.to_dict(), "exponents": list(e.exponents)})
            terms.append({"entries": entries, "coeff": c})
        return {"side": t.side, "p": t.p, "s": self.s, "height": t.height, "degree": self.degree, "terms": terms}

    @classmethod
    def from_dict(cls, d: dict) -> MilnorClass:
        tower = TowerField(d["side"], int(d["p"]), int(d["height"]))
        s = int(d["s"])
        out = cls.zero(tower, s, int(d["degree"]))
        for term in d["terms"]:
            entries = [
                MonomialEntry(FactoredElement.from_dict(e["coefficient"]), tuple(e["exponents"])) for e in term["entries"]
            ]
            out = out + symbol(tower, s, entries, check_steinberg=False) * int(term["coeff"])
        return out


def _expand(tower: TowerField, s: int, atom_lists: Sequence[list[tuple[Atom, int]]]) -> MilnorClass:
    terms = []
    for combo in itertools.product(*atom_lists):
        coeff = 1
        for _, e in combo:
            coeff *= e
        terms.append((tuple(a for a, _ in combo), coeff))
    return MilnorClass(tower, s, len(atom_lists), tuple(terms))


def symbol(tower: TowerField, s: int, entries: Sequence[MonomialEntry], *, check_steinberg: bool = True) -> MilnorClass:
    """{e_1, ..., e_k} in normal form."""
    if not entries:
        raise ValueError("a symbol needs at least one entry")
    for e in entries:
        if e.coefficient.side != tower.side or e.coefficient.p != tower.p:
            raise ValueError("entry coefficient lives in a different field")
        if len(e.exponents) != tower.height:
            raise ValueError("entry exponents do not match the tower height")
    out = _expand(tower, s, [e.atoms() for e in entries])
    if check_steinberg:
        for sym, _ in out.terms:
            base = [a for a in sym if not isinstance(a, int)]
            for f, g in itertools.combinations(base, 2):
                if steinberg_pair(f, g):
                    raise SteinbergRequired(f"{{{f}, {g}}} needs the Steinberg relation")
    return out


def residue(c: MilnorClass, var: int | None = None) -> MilnorClass:
    """Tame symbol for the y_h-adic valuation, h the tower height.

    In normal form the top variable sits last, so
    d{u_1, ..., u_{k-1}, y_h} = {u_1, ..., u_{k-1}} with no sign, and
    symbols without y_h are unramified and map to 0.
    """
    top = c.tower.height
    if var is not None and var != top:
        raise ValueError(f"residue is only defined for the top variable y_{top}")
    if top == 0:
        raise ValueError("no tower variable to take a residue at")
    if c.degree < 1:
        raise ValueError("residue of a degree-0 class")
    terms = tuple((sym[:-1], k) for sym, k in c.terms if sym[-1] == top)
    return MilnorClass(c.tower.drop_top(), c.s, c.degree - 1, terms)


def is_fixed_prime(f: FpPoly) -> bool:
    return f.shift(1) == f


def norm_symbols(c: MilnorClass, seed: int = 0) -> MilnorClass:
    """Transfer from the E-tower to the F-tower via the projection formula.

    N{e, rest} = {N e, rest} when rest comes from F, and N{all from F} =
    p {same}.  E-primes fixed by sigma are images of F-primes; variables
    come from F.  Two or more non-fixed primes in one symbol raise
    :class:`NotComputable`.
    """
    if c.tower.side != E_SIDE:
        raise ValueError("norm_symbols expects a class over the E-tower")
    ftower = c.tower.with_side(F_SIDE)
    out = MilnorClass.zero(ftower, c.s, c.degree)
    for sym, k in c.terms:
        moving = [idx for idx, a in enumerate(sym) if not isinstance(a, int) and not is_fixed_prime(a)]
        if len(moving) > 1:
            raise NotComputable(f"symbol with {len(moving)} entries outside the image of F")
        lists: list[list[tuple[Atom, int]]] = []
        for idx, a in enumerate(sym):
            if isinstance(a, int):
                lists.append([(a, 1)])
            elif idx in moving:
                lists.append([(r, e) for r, e in norm_E_to_F(FactoredElement.prime(E_SIDE, a), seed).factors])
            else:
                lists.append([(rewrite_invariant(a), 1)])
        term = _expand(ftower, c.s, lists) * k
        if not moving:
            term = term * c.tower.p
        out = out + term
    return out


def check_norm_residue_diagram(c: MilnorClass, seed: int = 0) -> bool:
    """(residue o norm)(c) == (norm o residue)(c) in normal form."""
    return residue(norm_symbols(c, seed)) == norm_symbols(residue(c), seed)


def alpha(x: FactoredElement, m: int, s: int) -> MilnorClass:
    """{x, y_1, ..., y_{m-1}} over the F-tower of height m - 1."""
    tower = TowerField(x.side, x.p, m - 1)
    entries = [MonomialEntry.base(tower, x)] + [MonomialEntry.var(tower, i) for i in range(1, m)]
    return symbol(tower, s, entries, check_steinberg=False)


def k1_element(c: MilnorClass) -> FactoredElement:
    """The element whose class is the degree-1 class c (exponents as least residues)."""
    if c.degree != 1 or c.tower.height != 0:
        raise ValueError("expected a degree-1 class over the base field")
    return FactoredElement(c.tower.side, c.tower.p, 1, tuple((sym[0], k) for sym, k in c.terms))


# norm membership


@dataclass
class MembershipResult:
    verdict: str  # "Member", "NonMember" or "Unknown"
    certificate: FactoredElement | MilnorClass | None = None
    chain: list[MilnorClass] | None = None
    details: dict | None = None

    def to_dict(self) -> dict:
        out: dict = {"verdict": self.verdict}
        if self.certificate is not None:
            out["certificate"] = self.certificate.to_dict()
        if self.chain is not None:
            out["chain"] = [c.to_dict() for c in self.chain]
            out["chain_text"] = [str(c) for c in self.chain]
        if self.details:
            out["details"] = self.details
        return out


@lru_cache(maxsize=None)
def norm_generators(p: int, dF: int, seed: int = 0) -> tuple[tuple[FpPoly, tuple[int, ...]], ...]:
    """E-side monic irreducibles whose norm lies in the degree-<=dF truncation, with norm exponent vectors."""
    primes = f_primes(p, dF)
    index = {r: k for k, r in enumerate(primes)}
    out = []
    for d in range(1, p * dF + 1):
        for f in fpoly.monic_irreducibles(p, d):
            nf = norm_E_to_F(FactoredElement.prime(E_SIDE, f), seed)
            if all(r in index for r, _ in nf.factors):
                v = [0] * len(primes)
                for r, e in nf.factors:
                    v[index[r]] = e
                out.append((f, tuple(v)))
    return tuple(out)


def norm_membership_k1(x: FactoredElement, dF: int, s: int = 1, seed: int = 0) -> MembershipResult:
    """Is the class of x in N(E^x) (F^x)^{p^s}, within the degree-<=dF truncation?"""
    if x.side != F_SIDE:
        raise ValueError("norm membership is decided for F-side elements")
    p = x.p
    mod = p**s
    primes = f_primes(p, dF)
    index = {r: k for k, r in enumerate(primes)}
    if any(r not in index for r, _ in x.factors):
        return MembershipResult("Unknown", details={"reason": "x involves primes of degree > dF"})
    target = [0] * len(primes)
    for r, e in x.factors:
        target[index[r]] = e % mod
    if not any(target):
        return MembershipResult("Member", FactoredElement.one(E_SIDE, p), details={"zero_class": True})
    gens = norm_generators(p, dF, seed)
    A = MatrixModPS.from_columns(p, s, [v for _, v in gens], len(primes))
    sol = solve(A, target)
    if sol is None:
        return MembershipResult("NonMember", details={"target": target, "generators": len(gens)})
    cert = FactoredElement.one(E_SIDE, p)
    for (f, _), c in zip(gens, sol.particular):
        if c:
            cert = cert * FactoredElement.prime(E_SIDE, f) ** c
    return MembershipResult("Member", cert, details={"target": target})


def replay_k1_certificate(x: FactoredElement, cert: FactoredElement, s: int, seed: int = 0) -> bool:
    """N(cert) / x is a p^s-th power (constants included)."""
    q = norm_E_to_F(cert, seed) / x
    return all(e % x.p**s == 0 for _, e in q.factors)


def _alpha_shape(c: MilnorClass) -> bool:
    h = c.tower.height
    if c.degree != h + 1:
        return False
    tail = tuple(range(1, h + 1))
    return all(not isinstance(sym[0], int) and sym[1:] == tail for sym, _ in c.terms)


def norm_membership_km(c: MilnorClass, dF: int, seed: int = 0) -> MembershipResult:
    """Decide c = {x, y_1, ..., y_{m-1}} in N k_m(E-tower), via residues down to K_1."""
    if c.tower.side != F_SIDE or not _alpha_shape(c):
        return MembershipResult("Unknown", details={"reason": "class is not of the shape {x, y_1, ..., y_(m-1)}"})
    chain = [c]
    cur = c
    while cur.tower.height:
        cur = residue(cur)
        chain.append(cur)
    x = k1_element(cur)
    base = norm_membership_k1(x, dF, c.s, seed)
    if base.verdict == "Member":
        etower = c.tower.with_side(E_SIDE)
        entries = [MonomialEntry.base(etower, base.certificate)]
        entries += [MonomialEntry.var(etower, i) for i in range(1, etower.height + 1)]
        cert = symbol(etower, c.s, entries, check_steinberg=False)
        return MembershipResult("Member", cert, details={"k1_certificate": base.certificate.to_dict()})
    if base.verdict == "NonMember":
        return MembershipResult("NonMember", chain=chain, details=base.details)
    return MembershipResult("Unknown", chain=chain, details=base.details)


# random symbols for diagram fuzzing


def _random_e_poly(p: int, rng: random.Random) -> FpPoly:
    while True:
        d = rng.randint(1, 3)
        f = FpPoly(p, [rng.randrange(p) for _ in range(d)] + [rng.randrange(1, p)])
        if f.degree >= 1:
            return f


def _random_monomial(tower: TowerField, rng: random.Random, lo: int = -2, hi: int = 2) -> tuple[int, ...]:
    return tuple(rng.randint(lo, hi) for _ in range(tower.height))


def random_monomial_symbol(p: int, s: int, m: int, rng: random.Random, seed: int = 0) -> MilnorClass:
    """A random E-tower symbol of length m with at most one entry outside the image of F.

    One entry carries an arbitrary polynomial in theta; the others carry
    constants or products of inert primes (sigma-fixed), each times a random
    variable monomial.
    """
    tower = TowerField(E_SIDE, p, m - 1)
    inert = [i.image for i in enumerate_orbits(PrimeParams(p, 1, 1), 1 if p > 2 else 2, seed).inert_primes]
    while True:
        special = rng.randrange(m)
        entries = []
        for k in range(m):
            if k == special:
                u = factor(_random_e_poly(p, rng), E_SIDE, seed)
            else:
                u = FactoredElement.constant(E_SIDE, p, rng.randrange(1, p))
                for f in inert:
                    e = rng.randint(-1, 2)
                    if e:
                        u = u * FactoredElement.prime(E_SIDE, f) ** e
            entries.append(MonomialEntry(u, _random_monomial(tower, rng)))
        try:
            return symbol(tower, s, entries)
        except SteinbergRequired:
            continue


def fuzz_diagram(p: int, s: int, m: int, trials: int, seed: int) -> dict:
    rng = random.Random(seed)
    failures = []
    nonzero = 0
    for k in range(trials):
        c = random_monomial_symbol(p, s, m, rng, seed)
        lhs = residue(norm_symbols(c, seed))
        rhs = norm_symbols(residue(c), seed)
        if not lhs.is_zero():
            nonzero += 1
        if lhs != rhs:
            failures.append({"trial": k, "symbol": c.to_dict()})
    return {"p": p, "s": s, "m": m, "trials": trials, "seed": seed, "nonzero_sides": nonzero, "failures": failures}
