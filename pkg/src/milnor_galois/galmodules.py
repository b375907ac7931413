"""Modules over R_s[G], G cyclic of order p^n, and free-decomposition certificates.

A module is presented by the matrix of a fixed generator sigma of G acting
on a free Z/p^s-module.  Every module handled here arises as L / p^s L for a
G-stable lattice L, so the carrier never has torsion beyond p^s.

The decomposition pipeline mirrors an induction on s: read a Jordan basis
of sigma - 1 mod p (block size p^i means a free F_p[G_i] summand), lift the
block generators to Z/p^s, and re-verify freeness, independence and
spanning at each stage.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .grouprings import GroupRingElement, PrimeParams, socle
from .modp_linalg import (
    MatrixModPS,
    has_trivial_kernel,
    is_invertible,
    nullspace_mod_p,
    rank_mod_p,
    rref_mod_p,
)

NOT_THEOREM_SHAPE = "NotTheoremShape"
LIFT_FAILED = "LiftFailed"


@dataclass(frozen=True)
class GModulePresentation:
    params: PrimeParams
    rank: int
    action: MatrixModPS

    def __post_init__(self):
        a = self.action
        if (a.p, a.s) != (self.params.p, self.params.s):
            raise ValueError("action matrix lives over a different ring")
        if a.rows != self.rank or a.cols != self.rank:
            raise ValueError("action matrix must be rank x rank")
        if not is_invertible(a):
            raise ValueError("action is not invertible mod p")
        order = self.params.p**self.params.n
        if a**order != MatrixModPS.identity(a.p, a.s, self.rank):
            raise ValueError(f"action^{order} is not the identity")

    @property
    def group_order(self) -> int:
        return self.params.p**self.params.n

    def to_dict(self) -> dict:
        return {
            "p": self.params.p,
            "s": self.params.s,
            "n": self.params.n,
            "rank": self.rank,
            "action": list(self.action.entries),
        }

    @classmethod
    def from_dict(cls, d: dict) -> GModulePresentation:
        params = PrimeParams(int(d["p"]), int(d["s"]), int(d["n"]))
        rank = int(d["rank"])
        action = MatrixModPS(params.p, params.s, rank, rank, tuple(d["action"]))
        return cls(params, rank, action)


@dataclass(frozen=True)
class DecompositionCertificate:
    generators: tuple[tuple[tuple[int, ...], int], ...]

    @classmethod
    def of(cls, gens: Sequence[tuple[Sequence[int], int]]) -> DecompositionCertificate:
        return cls(tuple((tuple(int(x) for x in c), int(lvl)) for c, lvl in gens))

    def to_dict(self) -> dict:
        return {"generators": [{"coords": list(c), "level": lvl} for c, lvl in self.generators]}

    @classmethod
    def from_dict(cls, d: dict) -> DecompositionCertificate:
        return cls.of([(g["coords"], g["level"]) for g in d["generators"]])


@dataclass
class DecompositionReport:
    ranks: tuple[int, ...]
    verified: bool
    failure_reason: str | None = None
    stage: int | None = None
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {"ranks": list(self.ranks), "verified": self.verified, "failure_reason": self.failure_reason}
        if self.stage is not None:
            out["stage"] = self.stage
        if self.details:
            out["details"] = self.details
        return out


# constructors for common modules


def permutation_module(params: PrimeParams, orbit_sizes: Sequence[int]) -> GModulePresentation:
    """Direct sum of Z/p^s[G/G^(p^i)] with sigma cycling each orbit."""
    rank = sum(orbit_sizes)
    rows = [[0] * rank for _ in range(rank)]
    start = 0
    for size in orbit_sizes:
        if (params.p**params.n) % size:
            raise ValueError(f"orbit size {size} does not divide |G|")
        for j in range(size):
            rows[start + (j + 1) % size][start + j] = 1
        start += size
    return GModulePresentation(params, rank, MatrixModPS.from_rows(params.p, params.s, rows, cols=rank))


def regular_module(params: PrimeParams, copies: int = 1) -> GModulePresentation:
    """R_s[G]^copies."""
    return permutation_module(params, [params.p**params.n] * copies)


def reduce_mod(M: GModulePresentation, s: int) -> GModulePresentation:
    if not 1 <= s <= M.params.s:
        raise ValueError(f"s' = {s} outside [1, {M.params.s}]")
    params = PrimeParams(M.params.p, s, M.params.n)
    return GModulePresentation(params, M.rank, M.action.reduce(s))


# group ring action


def orbit_columns(M: GModulePresentation, v: Sequence[int], level: int) -> list[list[int]]:
    """[sigma^k v for k < p^level]."""
    cols = [list(v)]
    for _ in range(M.params.p**level - 1):
        cols.append(M.action.apply(cols[-1]))
    return cols


def act(M: GModulePresentation, gamma: GroupRingElement, v: Sequence[int]) -> list[int]:
    """gamma . v with tau acting as sigma."""
    mod = M.params.modulus
    out = [0] * M.rank
    for c, w in zip(gamma.coeffs, orbit_columns(M, v, gamma.level)):
        if c:
            out = [(a + c * b) % mod for a, b in zip(out, w)]
    return out


def socle_criterion(M: GModulePresentation, v: Sequence[int], level: int) -> bool:
    """True iff socle . v != 0; for a sigma^(p^level)-fixed v this is freeness over R_s[G_level]."""
    if level == 0:
        return any(x * M.params.p ** (M.params.s - 1) % M.params.modulus for x in v)
    ring = PrimeParams(M.params.p, M.params.s, level)
    return any(act(M, socle(ring, level), v))


# mod-p Jordan structure


def rank_sequence(M: GModulePresentation) -> list[int]:
    """d_k = rank((sigma - 1)^k mod p) for k = 0 .. p^n."""
    p = M.params.p
    N = (M.action.reduce(1) - MatrixModPS.identity(p, 1, M.rank))
    out = [M.rank]
    P = MatrixModPS.identity(p, 1, M.rank)
    for _ in range(M.group_order):
        P = P @ N
        out.append(rank_mod_p(P))
    return out


def partition_from_ranks(d: Sequence[int]) -> list[int]:
    """Block sizes (descending) from d_k: #blocks of size >= k is d_{k-1} - d_k."""
    at_least = [d[k - 1] - d[k] for k in range(1, len(d))] + [0]
    sizes = []
    for k in range(len(at_least) - 1, 0, -1):
        exact = at_least[k - 1] - at_least[k]
        sizes.extend([k] * exact)
    return sizes


def _independent_add(echelon: list[list[int]], v: list[int], p: int) -> bool:
    """Reduce v against an echelon list; append and return True if v is new."""
    w = [x % p for x in v]
    for row in echelon:
        piv = next(i for i, x in enumerate(row) if x)
        if w[piv]:
            f = w[piv]
            w = [(a - f * b) % p for a, b in zip(w, row)]
    if not any(w):
        return False
    piv = next(i for i, x in enumerate(w) if x)
    inv = pow(w[piv], -1, p)
    echelon.append([x * inv % p for x in w])
    return True


def jordan_chains_mod_p(M: GModulePresentation) -> list[tuple[list[int], int]]:
    """Jordan basis of sigma - 1 mod p as (top vector, chain length), largest first.

    Tops are taken greedily from a basis of ker N^k, k descending, accepting
    w when N^(k-1) w is independent of the bottoms already chosen.
    """
    p = M.params.p
    if M.params.s != 1:
        raise ValueError("jordan decomposition needs s = 1")
    rank = M.rank
    N = M.action - MatrixModPS.identity(p, 1, rank)
    powers = [MatrixModPS.identity(p, 1, rank)]
    while len(powers) <= M.group_order:
        powers.append(powers[-1] @ N)
    chains = []
    bottoms: list[list[int]] = []
    covered = 0
    for k in range(min(M.group_order, rank), 0, -1):
        if covered == rank:
            break
        for w in nullspace_mod_p(powers[k]):
            bottom = powers[k - 1].apply(w)
            if any(bottom) and _independent_add(bottoms, bottom, p):
                chains.append((w, k))
                covered += k
    if covered != rank:
        raise AssertionError("Jordan chains do not span the module")
    # the union of chains must be a basis
    vecs = [powers[a].apply(w) for w, k in chains for a in range(k)]
    _, piv = rref_mod_p(vecs, p) if vecs else ([], [])
    if len(piv) != rank:
        raise AssertionError("Jordan chains are dependent")
    return chains


def jordan_decompose_mod_p(M: GModulePresentation) -> list[int]:
    """Block sizes of sigma - 1 mod p, descending."""
    return sorted((k for _, k in jordan_chains_mod_p(M)), reverse=True)


def power_of_p(size: int, p: int) -> int | None:
    i = 0
    while size % p == 0:
        size //= p
        i += 1
    return i if size == 1 else None


# verification


def verify_free_decomposition(M: GModulePresentation, cert: DecompositionCertificate) -> DecompositionReport:
    """Check that cert's generators give M = (+)_i R_s[G_i]^{r_i}.

    Order of checks: (a) each generator has zero annihilator in R_s[G_i];
    (b) the assembled map from the free module has zero kernel; (c) the
    images span M / pM; (d) sigma^(p^i) fixes each level-i generator.
    """
    n = M.params.n
    ranks = [0] * (n + 1)
    for coords, level in cert.generators:
        if len(coords) != M.rank or not 0 <= level <= n:
            return DecompositionReport(tuple(ranks), False, "malformed")
        ranks[level] += 1
    ranks = tuple(ranks)
    p, s = M.params.p, M.params.s
    orbits = [orbit_columns(M, c, lvl) for c, lvl in cert.generators]
    for idx, cols in enumerate(orbits):
        A = MatrixModPS.from_columns(p, s, cols, M.rank)
        if not has_trivial_kernel(A):
            return DecompositionReport(ranks, False, "annihilator", details={"generator": idx})
    allcols = [c for cols in orbits for c in cols]
    A = MatrixModPS.from_columns(p, s, allcols, M.rank)
    if allcols and not has_trivial_kernel(A):
        return DecompositionReport(ranks, False, "independence")
    if (rank_mod_p(A) if allcols else 0) != M.rank:
        return DecompositionReport(ranks, False, "spanning")
    for idx, ((coords, level), cols) in enumerate(zip(cert.generators, orbits)):
        if M.action.apply(cols[-1]) != [x % M.params.modulus for x in coords]:
            return DecompositionReport(ranks, False, "level_invariance", details={"generator": idx})
    assert sum(r * p**i for i, r in enumerate(ranks)) == M.rank
    return DecompositionReport(ranks, True)


def certificate_from_jordan(M: GModulePresentation) -> DecompositionCertificate | None:
    """Seed certificate from a mod-p Jordan basis; None if some block size is not a power of p."""
    gens = []
    for w, k in jordan_chains_mod_p(M):
        level = power_of_p(k, M.params.p)
        if level is None:
            return None
        gens.append((w, level))
    return DecompositionCertificate.of(gens)


def lift_basis(M: GModulePresentation, prev: DecompositionCertificate, *, check_prev: bool = True) -> DecompositionCertificate:
    """Lift a certificate valid mod p^(s-1) to Z/p^s by taking the least residues as representatives."""
    if M.params.s < 2:
        raise ValueError("lift_basis needs s >= 2")
    if check_prev:
        rep = verify_free_decomposition(reduce_mod(M, M.params.s - 1), prev)
        if not rep.verified:
            raise ValueError(f"previous certificate fails verification: {rep.failure_reason}")
    return DecompositionCertificate.of([(c, lvl) for c, lvl in prev.generators])


def reduce_certificate(cert: DecompositionCertificate, p: int, s: int) -> DecompositionCertificate:
    mod = p**s
    return DecompositionCertificate.of([([x % mod for x in c], lvl) for c, lvl in cert.generators])


def tower_compatibility_check(certs: Sequence[DecompositionCertificate], p: int) -> bool:
    """certs[k] is the stage-(k+1) certificate; each must reduce to its predecessor."""
    for s in range(2, len(certs) + 1):
        cur, prev = certs[s - 1], certs[s - 2]
        if len(cur.generators) != len(prev.generators):
            return False
        if reduce_certificate(cur, p, s - 1) != reduce_certificate(prev, p, s - 1):
            return False
    return True


@dataclass
class TowerResult:
    report: DecompositionReport
    certificates: list[DecompositionCertificate]
    stage_ranks: list[tuple[int, ...]]
    jordan_blocks: list[int]

    def to_dict(self) -> dict:
        return {
            "report": self.report.to_dict(),
            "certificates": [c.to_dict() for c in self.certificates],
            "stage_ranks": [list(r) for r in self.stage_ranks],
            "jordan_blocks": self.jordan_blocks,
        }


def check_tower(tower: Sequence[GModulePresentation]) -> None:
    if not tower:
        raise ValueError("empty tower")
    p, n = tower[0].params.p, tower[0].params.n
    for k, M in enumerate(tower, start=1):
        if (M.params.p, M.params.n, M.params.s) != (p, n, k):
            raise ValueError(f"tower stage {k} has parameters {M.params}")
        if k > 1 and reduce_mod(M, k - 1) != tower[k - 2]:
            raise ValueError(f"tower stage {k} does not reduce to stage {k - 1}")


def tower_of(M: GModulePresentation, depth: int | None = None) -> list[GModulePresentation]:
    depth = M.params.s if depth is None else depth
    return [reduce_mod(M, s) for s in range(1, depth + 1)]


def decompose_tower(tower: Sequence[GModulePresentation]) -> TowerResult:
    """Decompose M_S from the mod-p Jordan type, lifting stage by stage."""
    check_tower(tower)
    M1 = tower[0]
    blocks = jordan_decompose_mod_p(M1)
    cert = certificate_from_jordan(M1)
    if cert is None:
        rep = DecompositionReport((), False, NOT_THEOREM_SHAPE, stage=1, details={"blocks": blocks})
        return TowerResult(rep, [], [], blocks)
    rep = verify_free_decomposition(M1, cert)
    certs = [cert]
    stage_ranks = [rep.ranks]
    if not rep.verified:
        rep = DecompositionReport(rep.ranks, False, LIFT_FAILED, stage=1, details={"check": rep.failure_reason})
        return TowerResult(rep, certs, stage_ranks, blocks)
    for s in range(2, len(tower) + 1):
        cert = lift_basis(tower[s - 1], cert, check_prev=False)
        rep = verify_free_decomposition(tower[s - 1], cert)
        certs.append(cert)
        stage_ranks.append(rep.ranks)
        if not rep.verified:
            rep = DecompositionReport(rep.ranks, False, LIFT_FAILED, stage=s, details={"check": rep.failure_reason})
            return TowerResult(rep, certs, stage_ranks, blocks)
    if len(set(stage_ranks)) != 1:
        rep = DecompositionReport(rep.ranks, False, "RanksVaryAcrossStages")
    return TowerResult(rep, certs, stage_ranks, blocks)
