"""Arithmetic in R_s = Z/p^s and the group rings R_s[G_i], G_i cyclic of order p^i.

Elements are stored in the group basis: position j holds the coefficient
of tau^j, where tau generates G_i.  The (tau - 1)-basis is available as a
derived view through :func:`to_tau_basis` / :func:`from_tau_basis`.

The ring R_s[G_i] is local with maximal ideal (p, tau - 1).  Every nonzero
ideal contains the socle element p^(s-1) (tau - 1)^(p^i - 1); the function
:func:`socle_multiplier` produces an explicit multiplier witnessing this.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from math import comb
from typing import Iterator, Sequence

from .fpoly import is_prime

DEFAULT_RING_CAP = 10**6


@dataclass(frozen=True)
class PrimeParams:
    p: int
    s: int = 1
    n: int = 0

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"p = {self.p} is not prime")
        if self.s < 1:
            raise ValueError("s must be >= 1")
        if self.n < 0:
            raise ValueError("n must be >= 0")

    @property
    def modulus(self) -> int:
        return self.p**self.s

    def order(self, level: int) -> int:
        if not 0 <= level <= self.n:
            raise ValueError(f"level {level} outside [0, {self.n}]")
        return self.p**level


def valuation(a: int, p: int, s: int) -> int:
    """p-adic valuation of a residue mod p^s, with v(0) = s."""
    a %= p**s
    if a == 0:
        return s
    v = 0
    while a % p == 0:
        a //= p
        v += 1
    return v


class NotUnit(Exception):
    """Raised when an inverse is requested for a non-unit."""


@dataclass(frozen=True)
class GroupRingElement:
    params: PrimeParams
    level: int
    coeffs: tuple[int, ...] = field(default=())

    def __post_init__(self):
        size = self.params.order(self.level)
        c = tuple(int(a) % self.params.modulus for a in self.coeffs)
        if not c:
            c = (0,) * size
        if len(c) != size:
            raise ValueError(f"expected {size} coefficients, got {len(c)}")
        object.__setattr__(self, "coeffs", c)

    # constructors

    @classmethod
    def zero(cls, params: PrimeParams, level: int) -> GroupRingElement:
        return cls(params, level)

    @classmethod
    def scalar(cls, params: PrimeParams, level: int, c: int) -> GroupRingElement:
        size = params.order(level)
        return cls(params, level, (c,) + (0,) * (size - 1))

    @classmethod
    def one(cls, params: PrimeParams, level: int) -> GroupRingElement:
        return cls.scalar(params, level, 1)

    @classmethod
    def tau(cls, params: PrimeParams, level: int, k: int = 1) -> GroupRingElement:
        size = params.order(level)
        c = [0] * size
        c[k % size] = 1
        return cls(params, level, c)

    # structure

    @property
    def size(self) -> int:
        return len(self.coeffs)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def augmentation(self) -> int:
        return sum(self.coeffs) % self.params.modulus

    def min_valuation(self) -> int:
        p, s = self.params.p, self.params.s
        return min(valuation(c, p, s) for c in self.coeffs)

    def _compatible(self, other: GroupRingElement) -> None:
        if self.params != other.params or self.level != other.level:
            raise ValueError("group ring elements live in different rings")

    # arithmetic

    def __add__(self, other: GroupRingElement) -> GroupRingElement:
        self._compatible(other)
        return GroupRingElement(self.params, self.level, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other: GroupRingElement) -> GroupRingElement:
        self._compatible(other)
        return GroupRingElement(self.params, self.level, [a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __neg__(self) -> GroupRingElement:
        return GroupRingElement(self.params, self.level, [-a for a in self.coeffs])

    def __mul__(self, other) -> GroupRingElement:
        if isinstance(other, int):
            return GroupRingElement(self.params, self.level, [other * a for a in self.coeffs])
        self._compatible(other)
        # cyclic convolution of length p^i
        size = self.size
        out = [0] * size
        for j, a in enumerate(self.coeffs):
            if a:
                for k, b in enumerate(other.coeffs):
                    if b:
                        out[(j + k) % size] += a * b
        return GroupRingElement(self.params, self.level, out)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> GroupRingElement:
        if e < 0:
            return unit_inverse(self) ** (-e)
        result = GroupRingElement.one(self.params, self.level)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def to_dict(self) -> dict:
        return {"p": self.params.p, "s": self.params.s, "level": self.level, "coeffs": list(self.coeffs)}

    @classmethod
    def from_dict(cls, d: dict, n: int | None = None) -> GroupRingElement:
        level = int(d["level"])
        params = PrimeParams(int(d["p"]), int(d["s"]), level if n is None else n)
        return cls(params, level, d["coeffs"])


def ring_arith(a: GroupRingElement, b: GroupRingElement, op: str) -> GroupRingElement:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown operation {op!r}")


def to_tau_basis(a: GroupRingElement) -> tuple[int, ...]:
    """Coefficients c_j with a = sum_j c_j (tau - 1)^j.

    tau^k = sum_j C(k, j) (tau - 1)^j and k < p^i, so no reduction by the
    relation tau^(p^i) = 1 is needed.
    """
    size = a.size
    mod = a.params.modulus
    out = [0] * size
    for k, ak in enumerate(a.coeffs):
        if ak:
            for j in range(k + 1):
                out[j] += ak * comb(k, j)
    return tuple(c % mod for c in out)


def from_tau_basis(params: PrimeParams, level: int, c: Sequence[int]) -> GroupRingElement:
    """Inverse of :func:`to_tau_basis`."""
    size = params.order(level)
    if len(c) != size:
        raise ValueError(f"expected {size} coefficients")
    out = [0] * size
    for j, cj in enumerate(c):
        if cj:
            for k in range(j + 1):
                out[k] += cj * comb(j, k) * (-1) ** (j - k)
    return GroupRingElement(params, level, out)


def tau_minus_one_power(params: PrimeParams, level: int, e: int) -> GroupRingElement:
    u = GroupRingElement.tau(params, level) - GroupRingElement.one(params, level)
    return u**e


def socle(params: PrimeParams, level: int) -> GroupRingElement:
    """p^(s-1) (tau - 1)^(p^i - 1), the element lying in every nonzero ideal."""
    if level < 1:
        raise ValueError("socle needs level >= 1 (no tau at level 0)")
    size = params.order(level)
    return tau_minus_one_power(params, level, size - 1) * params.p ** (params.s - 1)


def socle_multiplier(b: GroupRingElement) -> GroupRingElement:
    """Return gamma with gamma * b == socle(b.params, b.level).

    Scale b by the least power p^e landing in p^(s-1) R_s G_i, read off the
    first (tau - 1)-coefficient that is a unit after dividing by p^(s-1),
    then shift it to the top degree.  Higher terms die because
    p^(s-1) (tau - 1)^(p^i) = 0.
    """
    if b.level < 1:
        raise ValueError("socle_multiplier needs level >= 1")
    if b.is_zero():
        raise ValueError("socle_multiplier of zero")
    params = b.params
    p, s = params.p, params.s
    size = b.size
    e = s - 1 - b.min_valuation()
    scaled = b * p**e
    top = p ** (s - 1)
    tau_c = to_tau_basis(scaled)
    k = next(j for j, c in enumerate(tau_c) if c % params.modulus)
    unit = tau_c[k] // top
    inv = pow(unit, -1, params.modulus)
    return tau_minus_one_power(params, b.level, size - 1 - k) * (p**e * inv)


def is_unit(a: GroupRingElement) -> bool:
    return a.augmentation() % a.params.p != 0


def unit_inverse(a: GroupRingElement) -> GroupRingElement:
    """Two-sided inverse of a unit; raises :class:`NotUnit` otherwise.

    Newton iteration b <- b (2 - a b) from the inverse of the augmentation
    doubles the (p, tau - 1)-adic precision each step.  The maximal ideal m
    satisfies m^(s p^i) = 0, so a bounded number of steps suffices.
    """
    if not is_unit(a):
        raise NotUnit("augmentation is not a unit mod p")
    params, level = a.params, a.level
    one = GroupRingElement.one(params, level)
    b = GroupRingElement.scalar(params, level, pow(a.augmentation(), -1, params.modulus))
    bound = params.s * a.size
    steps = 0
    while (1 << steps) < bound + 1:
        b = b * (one * 2 - a * b)
        steps += 1
    b = b * (one * 2 - a * b)
    assert a * b == one, "Newton lift failed to converge"
    return b


def unit_test_and_invert(a: GroupRingElement) -> GroupRingElement | None:
    """Inverse of a, or None when a is not a unit."""
    try:
        return unit_inverse(a)
    except NotUnit:
        return None


def all_elements(params: PrimeParams, level: int) -> Iterator[GroupRingElement]:
    size = params.order(level)
    for c in itertools.product(range(params.modulus), repeat=size):
        yield GroupRingElement(params, level, c)


def ring_size(params: PrimeParams, level: int) -> int:
    return params.modulus ** params.order(level)


def random_element(params: PrimeParams, level: int, rng: random.Random) -> GroupRingElement:
    size = params.order(level)
    return GroupRingElement(params, level, [rng.randrange(params.modulus) for _ in range(size)])


def nilpotency_holds(params: PrimeParams, level: int) -> bool:
    """p^(s-1) (tau - 1)^(p^i) == 0, by repeated multiplication."""
    u = GroupRingElement.tau(params, level) - GroupRingElement.one(params, level)
    acc = GroupRingElement.scalar(params, level, params.p ** (params.s - 1))
    for _ in range(params.order(level)):
        acc = acc * u
    return acc.is_zero()


def verify_socle_lemma(
    params: PrimeParams,
    level: int,
    *,
    exhaustive: bool = True,
    samples: int = 1000,
    cap: int = DEFAULT_RING_CAP,
    rng: random.Random | None = None,
) -> dict:
    """Check socle_multiplier(b) * b == socle for nonzero b.

    Enumerates the whole ring when asked and the ring has at most ``cap``
    elements; otherwise checks ``samples`` random nonzero elements.
    """
    target = socle(params, level)
    total = ring_size(params, level)
    mode = "exhaustive" if exhaustive and total <= cap else "sampled"
    if mode == "exhaustive":
        pool = (b for b in all_elements(params, level) if not b.is_zero())
    else:
        rng = rng or random.Random(0)

        def draw():
            for _ in range(samples):
                b = random_element(params, level, rng)
                while b.is_zero():
                    b = random_element(params, level, rng)
                yield b

        pool = draw()
    checked = 0
    failures = []
    scaled = 0
    for b in pool:
        checked += 1
        if b.min_valuation() < params.s - 1:
            scaled += 1
        if socle_multiplier(b) * b != target:
            failures.append(list(b.coeffs))
    return {
        "p": params.p,
        "s": params.s,
        "level": level,
        "mode": mode,
        "ring_size": total,
        "checked": checked,
        "scaled": scaled,
        "failures": failures,
        "socle": list(target.coeffs),
        "nilpotency": nilpotency_holds(params, level),
        "verified": not failures and nilpotency_holds(params, level),
    }
