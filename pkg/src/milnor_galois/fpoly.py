"""Univariate polynomials over a prime field GF(p).

A polynomial a_0 + a_1 x + ... + a_d x^d is stored as the tuple
(a_0, ..., a_d) of residues in [0, p), with a_d nonzero; the zero
polynomial is the empty tuple.  Values are immutable and hashable, so
they can serve as keys of factorization maps.

Factorization follows the usual three stages: square-free decomposition,
distinct-degree splitting and Cantor-Zassenhaus equal-degree splitting.
Randomness in the last stage comes from an explicit ``random.Random``
so results are reproducible.
"""

from __future__ import annotations

import random
import re
from functools import lru_cache
from typing import Iterable, Iterator


def is_prime(n: int) -> bool:
    """Deterministic trial-division primality test (desk-scale inputs only)."""
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def prime_factors(n: int) -> list[int]:
    """Distinct prime divisors of n > 0, ascending."""
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


class FpPoly:
    __slots__ = ("p", "coeffs")

    def __init__(self, p: int, coeffs: Iterable[int] = ()):
        c = [int(a) % p for a in coeffs]
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "coeffs", tuple(c))

    def __setattr__(self, name, value):
        raise AttributeError("FpPoly is immutable")

    # construction helpers

    @classmethod
    def const(cls, p: int, c: int) -> FpPoly:
        return cls(p, (c,))

    @classmethod
    def x(cls, p: int) -> FpPoly:
        return cls(p, (0, 1))

    @classmethod
    def monomial(cls, p: int, deg: int, c: int = 1) -> FpPoly:
        return cls(p, [0] * deg + [c])

    @classmethod
    def parse(cls, p: int, text: str, var: str | None = None) -> FpPoly:
        """Parse ``"t^3 + t + 1"`` or ``"2*x^2-1"``; any single letter may be the variable."""
        s = text.replace(" ", "").replace("**", "^")
        if not s:
            raise ValueError("empty polynomial")
        if s[0] not in "+-":
            s = "+" + s
        terms = re.findall(r"[+-][^+-]+", s)
        if "".join(terms) != s:
            raise ValueError(f"cannot parse polynomial {text!r}")
        coeffs: dict[int, int] = {}
        pat = re.compile(r"^([+-])(?:(\d+)\*?)?(?:([A-Za-z]\w*)(?:\^(\d+))?)?$")
        for term in terms:
            m = pat.match(term)
            if m is None or (m.group(2) is None and m.group(3) is None):
                raise ValueError(f"cannot parse term {term!r}")
            sign, num, name, exp = m.groups()
            if name is not None and var is not None and name != var:
                raise ValueError(f"unexpected variable {name!r}")
            c = int(num) if num is not None else 1
            if sign == "-":
                c = -c
            e = 0 if name is None else int(exp) if exp is not None else 1
            coeffs[e] = coeffs.get(e, 0) + c
        deg = max(coeffs)
        return cls(p, [coeffs.get(i, 0) for i in range(deg + 1)])

    # basic queries

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def lead(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_one(self) -> bool:
        return self.coeffs == (1,)

    def is_monic(self) -> bool:
        return self.lead == 1

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FpPoly):
            return NotImplemented
        return self.p == other.p and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((self.p, self.coeffs))

    def sort_key(self) -> tuple:
        """Canonical ordering: by degree, then coefficients from the top."""
        return (self.degree, self.coeffs[::-1])

    def __lt__(self, other: FpPoly) -> bool:
        return self.sort_key() < other.sort_key()

    def __repr__(self) -> str:
        return f"FpPoly({self.p}, {list(self.coeffs)})"

    def to_str(self, var: str = "x") -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for e in range(self.degree, -1, -1):
            c = self.coeffs[e]
            if c == 0:
                continue
            if e == 0:
                parts.append(str(c))
                continue
            mono = var if e == 1 else f"{var}^{e}"
            parts.append(mono if c == 1 else f"{c}*{mono}")
        return " + ".join(parts)

    __str__ = to_str

    def to_dict(self) -> dict:
        return {"p": self.p, "coeffs": list(self.coeffs)}

    @classmethod
    def from_dict(cls, d: dict) -> FpPoly:
        return cls(int(d["p"]), d["coeffs"])

    # arithmetic

    def _check(self, other: FpPoly) -> None:
        if self.p != other.p:
            raise ValueError("polynomials over different fields")

    def __add__(self, other: FpPoly) -> FpPoly:
        self._check(other)
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        return FpPoly(self.p, [x + (b[i] if i < len(b) else 0) for i, x in enumerate(a)])

    def __neg__(self) -> FpPoly:
        return FpPoly(self.p, [-x for x in self.coeffs])

    def __sub__(self, other: FpPoly) -> FpPoly:
        return self + (-other)

    def __mul__(self, other) -> FpPoly:
        if isinstance(other, int):
            return FpPoly(self.p, [other * x for x in self.coeffs])
        self._check(other)
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return FpPoly(self.p)
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return FpPoly(self.p, out)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> FpPoly:
        if e < 0:
            raise ValueError("negative exponent")
        result = FpPoly.const(self.p, 1)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __divmod__(self, other: FpPoly) -> tuple[FpPoly, FpPoly]:
        self._check(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        p = self.p
        r = list(self.coeffs)
        db = other.degree
        inv = pow(other.lead, -1, p)
        q = [0] * max(len(r) - db, 0)
        b = other.coeffs
        for k in range(len(r) - 1 - db, -1, -1):
            c = r[k + db] * inv % p
            if c:
                q[k] = c
                for j in range(db + 1):
                    r[k + j] = (r[k + j] - c * b[j]) % p
        return FpPoly(p, q), FpPoly(p, r[:db] if db > 0 else [])

    def __floordiv__(self, other: FpPoly) -> FpPoly:
        return divmod(self, other)[0]

    def __mod__(self, other: FpPoly) -> FpPoly:
        return divmod(self, other)[1]

    def monic(self) -> FpPoly:
        if self.is_zero():
            return self
        return self * pow(self.lead, -1, self.p)

    def __call__(self, value):
        """Evaluate at an int (mod p) or compose with another polynomial."""
        if isinstance(value, FpPoly):
            return self.compose(value)
        acc = 0
        for c in reversed(self.coeffs):
            acc = (acc * value + c) % self.p
        return acc

    def compose(self, inner: FpPoly) -> FpPoly:
        acc = FpPoly(self.p)
        for c in reversed(self.coeffs):
            acc = acc * inner + FpPoly.const(self.p, c)
        return acc

    def shift(self, a: int) -> FpPoly:
        """f(x + a)."""
        return self.compose(FpPoly(self.p, (a, 1)))

    def derivative(self) -> FpPoly:
        return FpPoly(self.p, [i * c for i, c in enumerate(self.coeffs)][1:])


def gcd(a: FpPoly, b: FpPoly) -> FpPoly:
    """Monic gcd (zero only if both inputs are zero)."""
    while b:
        a, b = b, a % b
    return a.monic()


def powmod(base: FpPoly, e: int, mod: FpPoly) -> FpPoly:
    result = FpPoly.const(base.p, 1) % mod
    base = base % mod
    while e:
        if e & 1:
            result = (result * base) % mod
        base = (base * base) % mod
        e >>= 1
    return result


def is_irreducible(f: FpPoly) -> bool:
    """Rabin's irreducibility test."""
    n = f.degree
    if n < 1:
        return False
    if n == 1:
        return True
    p = f.p
    f = f.monic()
    x = FpPoly.x(p)
    # frob[k] = x^(p^k) mod f
    frob = [x % f]
    for _ in range(n):
        frob.append(powmod(frob[-1], p, f))
    if frob[n] != frob[0]:
        return False
    for q in prime_factors(n):
        if gcd(f, frob[n // q] - x).degree != 0:
            return False
    return True


def p_th_root(f: FpPoly) -> FpPoly:
    """For f with f' = 0, return g with g^p = f (Frobenius is the identity on GF(p))."""
    p = f.p
    if any(c for i, c in enumerate(f.coeffs) if i % p):
        raise ValueError("not a p-th power")
    return FpPoly(p, f.coeffs[::p])


def square_free_decomposition(f: FpPoly) -> list[tuple[FpPoly, int]]:
    """Monic f = prod g_i^{e_i} with g_i square-free and pairwise coprime."""
    p = f.p
    f = f.monic()
    if f.degree < 1:
        return []
    out: dict[int, FpPoly] = {}

    def rec(h: FpPoly, mult: int) -> None:
        i = 1
        dh = h.derivative()
        c = gcd(h, dh)
        w = h // c
        while w.degree > 0:
            y = gcd(w, c)
            z = w // y
            if z.degree > 0:
                out[i * mult] = out.get(i * mult, FpPoly.const(p, 1)) * z
            i += 1
            w = y
            c = c // y
        if c.degree > 0:
            rec(p_th_root(c), mult * p)

    rec(f, 1)
    return [(g, e) for e, g in sorted(out.items())]


def distinct_degree(f: FpPoly) -> list[tuple[FpPoly, int]]:
    """Split square-free monic f into products of irreducibles of equal degree."""
    p = f.p
    x = FpPoly.x(p)
    out = []
    h = x % f
    d = 0
    while f.degree >= 2 * (d + 1):
        d += 1
        h = powmod(h, p, f)
        g = gcd(f, h - x)
        if g.degree > 0:
            out.append((g, d))
            f = f // g
            h = h % f
    if f.degree > 0:
        out.append((f, f.degree))
    return out


def equal_degree(f: FpPoly, d: int, rng: random.Random) -> list[FpPoly]:
    """Cantor-Zassenhaus splitting of a product of distinct degree-d irreducibles."""
    if f.degree == d:
        return [f]
    p = f.p
    n = f.degree
    while True:
        h = FpPoly(p, [rng.randrange(p) for _ in range(n)])
        if h.degree < 1:
            continue
        g = gcd(f, h)
        if 0 < g.degree < n:
            break
        if p == 2:
            # absolute trace to GF(2): sum of h^(2^i), i < d
            t = h % f
            acc = t
            for _ in range(d - 1):
                t = (t * t) % f
                acc = acc + t
            g = gcd(f, acc)
        else:
            g = gcd(f, powmod(h, (p**d - 1) // 2, f) - FpPoly.const(p, 1))
        if 0 < g.degree < n:
            break
    return equal_degree(g, d, rng) + equal_degree(f // g, d, rng)


def factor(f: FpPoly, seed: int = 0) -> tuple[int, list[tuple[FpPoly, int]]]:
    """Factor f != 0 as lead * prod g^e with monic irreducible g, sorted canonically."""
    if f.is_zero():
        raise ValueError("cannot factor the zero polynomial")
    rng = random.Random(seed)
    lead = f.lead
    out: dict[FpPoly, int] = {}
    for sf, e in square_free_decomposition(f):
        for block, d in distinct_degree(sf):
            for g in equal_degree(block, d, rng):
                out[g] = out.get(g, 0) + e
    return lead, sorted(out.items(), key=lambda kv: kv[0].sort_key())


def monic_polys(p: int, d: int) -> Iterator[FpPoly]:
    """All monic polynomials of degree d, in lexicographic coefficient order."""
    for k in range(p**d):
        c = []
        for _ in range(d):
            c.append(k % p)
            k //= p
        yield FpPoly(p, c + [1])


@lru_cache(maxsize=None)
def monic_irreducibles(p: int, d: int) -> tuple[FpPoly, ...]:
    return tuple(f for f in monic_polys(p, d) if is_irreducible(f))
