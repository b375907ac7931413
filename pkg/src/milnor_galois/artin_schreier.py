"""K_1 of the Artin-Schreier extension E = F_p(theta) over F = F_p(t), t = theta^p - theta.

The Galois group is generated by sigma: theta -> theta + 1.  Nonzero field
elements are kept in factored form over the polynomial rings F_p[theta]
and F_p[t]; the infinite place plays no role.  Modulo p^s-th powers the
constants disappear (F_p^x has order prime to p), so E^x / (E^x)^{p^s}
restricted to finite primes lying over F-primes of degree <= dF is the
free Z/p^s-module on those primes, permuted by sigma.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from . import fpoly
from .fpoly import FpPoly
from .galmodules import (
    DecompositionCertificate,
    GModulePresentation,
    decompose_tower,
    reduce_mod,
    tower_compatibility_check,
    verify_free_decomposition,
)
from .grouprings import PrimeParams
from .modp_linalg import MatrixModPS, rank_mod_p

E_SIDE = "E"
F_SIDE = "F"
VARNAME = {E_SIDE: "theta", F_SIDE: "t"}


@dataclass(frozen=True)
class FactoredElement:
    """unit * prod f^e over monic irreducibles f, on the E side (theta) or F side (t)."""

    side: str
    p: int
    unit: int
    factors: tuple[tuple[FpPoly, int], ...] = ()

    def __post_init__(self):
        if self.side not in (E_SIDE, F_SIDE):
            raise ValueError(f"unknown side {self.side!r}")
        u = self.unit % self.p
        if u == 0:
            raise ValueError("zero is not a field unit")
        merged: dict[FpPoly, int] = {}
        for f, e in self.factors:
            if f.p != self.p or not f.is_monic() or f.degree < 1:
                raise ValueError(f"bad factor {f!r}")
            merged[f] = merged.get(f, 0) + e
        object.__setattr__(self, "unit", u)
        object.__setattr__(
            self,
            "factors",
            tuple(sorted(((f, e) for f, e in merged.items() if e), key=lambda fe: fe[0].sort_key())),
        )

    @classmethod
    def one(cls, side: str, p: int) -> FactoredElement:
        return cls(side, p, 1)

    @classmethod
    def constant(cls, side: str, p: int, c: int) -> FactoredElement:
        return cls(side, p, c)

    @classmethod
    def from_mapping(cls, side: str, p: int, unit: int, factors: Mapping[FpPoly, int]) -> FactoredElement:
        return cls(side, p, unit, tuple(factors.items()))

    @classmethod
    def prime(cls, side: str, f: FpPoly) -> FactoredElement:
        """Wrap a monic irreducible without refactoring it."""
        return cls(side, f.p, 1, ((f, 1),))

    @property
    def var(self) -> str:
        return VARNAME[self.side]

    def as_dict(self) -> dict[FpPoly, int]:
        return dict(self.factors)

    def exponent(self, f: FpPoly) -> int:
        return self.as_dict().get(f, 0)

    def is_constant(self) -> bool:
        return not self.factors

    def _check(self, other: FactoredElement) -> None:
        if (self.side, self.p) != (other.side, other.p):
            raise ValueError("elements of different fields")

    def __mul__(self, other: FactoredElement) -> FactoredElement:
        self._check(other)
        return FactoredElement(self.side, self.p, self.unit * other.unit, self.factors + other.factors)

    def __pow__(self, e: int) -> FactoredElement:
        unit = pow(self.unit, e, self.p)
        return FactoredElement(self.side, self.p, unit, tuple((f, k * e) for f, k in self.factors))

    def inverse(self) -> FactoredElement:
        return self**-1

    def __truediv__(self, other: FactoredElement) -> FactoredElement:
        return self * other.inverse()

    def numerator(self) -> FpPoly:
        acc = FpPoly.const(self.p, self.unit)
        for f, e in self.factors:
            if e > 0:
                acc = acc * f**e
        return acc

    def denominator(self) -> FpPoly:
        acc = FpPoly.const(self.p, 1)
        for f, e in self.factors:
            if e < 0:
                acc = acc * f ** (-e)
        return acc

    def degree(self) -> int:
        return sum(f.degree * e for f, e in self.factors)

    def __str__(self) -> str:
        parts = [] if self.unit == 1 and self.factors else [str(self.unit)]
        for f, e in self.factors:
            s = f"({f.to_str(self.var)})"
            parts.append(s if e == 1 else f"{s}^{e}")
        return "*".join(parts)

    def to_dict(self) -> dict:
        return {
            "side": self.side,
            "p": self.p,
            "unit": self.unit,
            "factors": [{"coeffs": list(f.coeffs), "exp": e} for f, e in self.factors],
        }

    @classmethod
    def from_dict(cls, d: dict) -> FactoredElement:
        p = int(d["p"])
        return cls(d["side"], p, int(d["unit"]), tuple((FpPoly(p, f["coeffs"]), int(f["exp"])) for f in d["factors"]))


def factor(f: FpPoly, side: str = F_SIDE, seed: int = 0) -> FactoredElement:
    lead, fs = fpoly.factor(f, seed=seed)
    return FactoredElement(side, f.p, lead, tuple(fs))


def artin_schreier_poly(p: int) -> FpPoly:
    """theta^p - theta."""
    return FpPoly(p, [0, -1] + [0] * (p - 2) + [1])


def _require(a: FactoredElement, side: str) -> None:
    if a.side != side:
        raise ValueError(f"expected an element on the {side} side, got {a.side}")


def sigma_act(a: FactoredElement, k: int = 1) -> FactoredElement:
    """sigma^k: theta -> theta + k.  Shifts of monic polynomials stay monic."""
    _require(a, E_SIDE)
    return FactoredElement(E_SIDE, a.p, a.unit, tuple((f.shift(k), e) for f, e in a.factors))


def rewrite_invariant(P: FpPoly) -> FpPoly:
    """Return g with g(theta^p - theta) = P, for a sigma-invariant polynomial P.

    The substitution is triangular in degree: match the top coefficient,
    subtract, repeat.
    """
    p = P.p
    w = artin_schreier_poly(p)
    if P.degree % p and P.degree > 0:
        raise AssertionError("polynomial is not sigma-invariant")
    g = [0] * (max(P.degree, 0) // p + 1)
    rest = P
    while rest.degree > 0:
        if rest.degree % p:
            raise AssertionError("polynomial is not sigma-invariant")
        k = rest.degree // p
        c = rest.lead
        g[k] = c
        rest = rest - w**k * c
    if rest.degree == 0:
        g[0] = rest.lead
    out = FpPoly(p, g)
    if out.compose(w) != P:
        raise AssertionError("invariant rewrite failed")
    return out


def norm_poly(f: FpPoly) -> FpPoly:
    """N_{E/F}(f) as a polynomial in t for a polynomial f in theta."""
    acc = FpPoly.const(f.p, 1)
    for j in range(f.p):
        acc = acc * f.shift(j)
    return rewrite_invariant(acc)


def norm_E_to_F(a: FactoredElement, seed: int = 0) -> FactoredElement:
    """prod_{j<p} sigma^j(a), rewritten in t and factored over F."""
    _require(a, E_SIDE)
    out = FactoredElement.constant(F_SIDE, a.p, pow(a.unit, a.p, a.p))
    for f, e in a.factors:
        out = out * factor(norm_poly(f), F_SIDE, seed) ** e
    return out


def include_F_to_E(f: FactoredElement, seed: int = 0) -> FactoredElement:
    """iota_{F,E}: substitute t = theta^p - theta and factor over E."""
    _require(f, F_SIDE)
    w = artin_schreier_poly(f.p)
    out = FactoredElement.constant(E_SIDE, f.p, f.unit)
    for r, e in f.factors:
        out = out * factor(r.compose(w), E_SIDE, seed) ** e
    return out


# truncated instances


@dataclass(frozen=True)
class SplitOrbit:
    prime: FpPoly  # F-side r
    orbit: tuple[FpPoly, ...]  # E-side f, sigma f, ..., sigma^{p-1} f


@dataclass(frozen=True)
class InertPrime:
    prime: FpPoly  # F-side r
    image: FpPoly  # E-side r(theta^p - theta), irreducible


@dataclass(frozen=True)
class TruncatedInstance:
    params: PrimeParams
    dF: int
    split_orbits: tuple[SplitOrbit, ...]
    inert_primes: tuple[InertPrime, ...]
    seed: int = 0

    def __post_init__(self):
        if self.params.n != 1:
            raise ValueError("the Artin-Schreier instance has n = 1")

    def to_dict(self) -> dict:
        return {
            "p": self.params.p,
            "dF": self.dF,
            "split_orbits": [
                {"prime": list(o.prime.coeffs), "orbit": [list(f.coeffs) for f in o.orbit]} for o in self.split_orbits
            ],
            "inert_primes": [{"prime": list(i.prime.coeffs), "image": list(i.image.coeffs)} for i in self.inert_primes],
        }


def f_primes(p: int, dF: int) -> list[FpPoly]:
    """Monic irreducibles in t of degree 1..dF, canonical order."""
    return [r for d in range(1, dF + 1) for r in fpoly.monic_irreducibles(p, d)]


def classify_prime(r: FpPoly, seed: int = 0) -> SplitOrbit | InertPrime:
    """Factor r(theta^p - theta): a full sigma-orbit of p primes, or one prime."""
    p = r.p
    image = factor(r.compose(artin_schreier_poly(p)), E_SIDE, seed)
    fs = image.factors
    if len(fs) == 1 and fs[0][1] == 1 and fs[0][0].degree == p * r.degree:
        return InertPrime(r, fs[0][0])
    if len(fs) == p and all(e == 1 and f.degree == r.degree for f, e in fs):
        first = fs[0][0]
        orbit = tuple(first.shift(j) for j in range(p))
        if set(orbit) != {f for f, _ in fs}:
            raise AssertionError(f"factors of iota({r}) do not form a sigma-orbit")
        return SplitOrbit(r, orbit)
    raise AssertionError(f"unexpected factorization pattern for iota({r}): {image}")


def enumerate_orbits(params: PrimeParams, dF: int, seed: int = 0) -> TruncatedInstance:
    if dF < 1:
        raise ValueError("dF must be >= 1")
    params = PrimeParams(params.p, params.s, 1)
    split, inert = [], []
    for r in f_primes(params.p, dF):
        c = classify_prime(r, seed)
        (split if isinstance(c, SplitOrbit) else inert).append(c)
    return TruncatedInstance(params, dF, tuple(split), tuple(inert), seed)


def carrier_basis(inst: TruncatedInstance) -> list[FpPoly]:
    """E-side primes indexing the module coordinates: split orbits in sigma order, then inert images."""
    basis = [f for o in inst.split_orbits for f in o.orbit]
    basis += [i.image for i in inst.inert_primes]
    return basis


def class_vector(a: FactoredElement, basis: list[FpPoly], mod: int) -> list[int] | None:
    """Exponent vector of a in the truncated class module, or None if a leaves the carrier."""
    index = {f: k for k, f in enumerate(basis)}
    v = [0] * len(basis)
    for f, e in a.factors:
        if f not in index:
            return None
        v[index[f]] = e % mod
    return v


def sigma_matrix(inst: TruncatedInstance, s: int) -> MatrixModPS:
    """Matrix of sigma on the carrier, read off by acting on each basis prime."""
    p = inst.params.p
    basis = carrier_basis(inst)
    cols = []
    for f in basis:
        v = class_vector(sigma_act(FactoredElement.prime(E_SIDE, f)), basis, p**s)
        if v is None:
            raise AssertionError("carrier is not sigma-stable")
        cols.append(v)
    return MatrixModPS.from_columns(p, s, cols, len(basis))


def norm_image_dimension(p: int, dF: int, seed: int = 0) -> dict:
    """dim_Fp of N(k_1 E) inside the degree-<=dF part of k_1 F, by brute force.

    Norms every E-side monic irreducible of theta-degree <= p*dF and keeps
    those whose norm stays within F-primes of degree <= dF.
    """
    primes = f_primes(p, dF)
    index = {r: k for k, r in enumerate(primes)}
    rows = []
    for d in range(1, p * dF + 1):
        for f in fpoly.monic_irreducibles(p, d):
            nf = norm_E_to_F(FactoredElement.prime(E_SIDE, f), seed)
            if nf.degree() != f.degree:
                raise AssertionError("deg_t N(f) != deg_theta f")
            if all(r in index for r, _ in nf.factors):
                v = [0] * len(primes)
                for r, e in nf.factors:
                    v[index[r]] = e % p
                rows.append(v)
    rank = rank_mod_p(MatrixModPS.from_rows(p, 1, rows, cols=len(primes))) if rows else 0
    return {"f_primes": len(primes), "norm_image_dim": rank, "quotient_dim": len(primes) - rank}


@dataclass
class K1Build:
    tower: list[GModulePresentation]
    certificate: DecompositionCertificate
    report: dict


def build_k1_module(inst: TruncatedInstance, s: int) -> K1Build:
    """Galois module tower of the truncated E^x/(E^x)^{p^s}, its certificate and rank cross-checks."""
    p = inst.params.p
    params = PrimeParams(p, s, 1)
    basis = carrier_basis(inst)
    top = GModulePresentation(params, len(basis), sigma_matrix(inst, s))
    tower = [reduce_mod(top, k) for k in range(1, s + 1)]

    gens = []
    offset = 0
    for o in inst.split_orbits:
        v = [0] * len(basis)
        v[offset] = 1
        gens.append((v, 1))
        offset += p
    for k in range(len(inst.inert_primes)):
        v = [0] * len(basis)
        v[offset + k] = 1
        gens.append((v, 0))
    cert = DecompositionCertificate.of(gens)

    stage_reports = [verify_free_decomposition(M, cert) for M in tower]
    cert_ok = all(r.verified for r in stage_reports)
    compat = tower_compatibility_check([cert] * s, p)

    # level-0 generators must come from F: iota(r) equals the carrier prime
    image_ok = all(
        include_F_to_E(FactoredElement.prime(F_SIDE, i.prime), inst.seed) == FactoredElement.prime(E_SIDE, i.image)
        for i in inst.inert_primes
    )

    brute = norm_image_dimension(p, inst.dF, inst.seed)
    ranks = (len(inst.inert_primes), len(inst.split_orbits))
    cross = brute["norm_image_dim"] == ranks[1] and brute["quotient_dim"] == ranks[0]

    tower_result = decompose_tower(tower)
    tower_ok = tower_result.report.verified and tower_result.report.ranks == ranks

    report = {
        "p": p,
        "s": s,
        "dF": inst.dF,
        "seed": inst.seed,
        **inst.to_dict(),
        "ranks": list(ranks),
        "norm_image_dim": brute["norm_image_dim"],
        "quotient_dim": brute["quotient_dim"],
        "cross_check_passed": cross,
        "certificate_verified": cert_ok,
        "stage_reports": [r.to_dict() for r in stage_reports],
        "tower_compatible": compat,
        "level0_in_image_of_F": image_ok,
        "decompose_tower": tower_result.report.to_dict(),
        "verified": cross and cert_ok and compat and image_ok and tower_ok,
    }
    return K1Build(tower, cert, report)


def exponent_vector(x: FactoredElement, primes: Iterable[FpPoly]) -> list[int] | None:
    index = {r: k for k, r in enumerate(primes)}
    v = [0] * len(index)
    for r, e in x.factors:
        if r not in index:
            return None
        v[index[r]] = e
    return v
