"""Exact linear algebra over the local ring Z/p^s.

Everything goes through a Smith form U A V = diag(p^e_1, ..., p^e_r) with
U, V invertible.  Pivots are chosen with minimal p-adic valuation (ties by
lowest (row, col)), which makes the exponents come out ascending.  The
zero diagonal entry is recorded as exponent s.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .grouprings import valuation


@dataclass(frozen=True)
class MatrixModPS:
    p: int
    s: int
    rows: int
    cols: int
    entries: tuple[int, ...]

    def __post_init__(self):
        mod = self.p**self.s
        e = tuple(int(x) % mod for x in self.entries)
        if len(e) != self.rows * self.cols:
            raise ValueError(f"expected {self.rows * self.cols} entries, got {len(e)}")
        object.__setattr__(self, "entries", e)

    @property
    def modulus(self) -> int:
        return self.p**self.s

    @classmethod
    def from_rows(cls, p: int, s: int, rows: Sequence[Sequence[int]], cols: int | None = None) -> MatrixModPS:
        rows = [list(r) for r in rows]
        ncols = len(rows[0]) if rows else (cols or 0)
        if any(len(r) != ncols for r in rows):
            raise ValueError("ragged rows")
        return cls(p, s, len(rows), ncols, tuple(x for r in rows for x in r))

    @classmethod
    def from_columns(cls, p: int, s: int, columns: Sequence[Sequence[int]], rows: int) -> MatrixModPS:
        return cls.from_rows(p, s, [[c[i] for c in columns] for i in range(rows)], cols=len(columns))

    @classmethod
    def identity(cls, p: int, s: int, size: int) -> MatrixModPS:
        return cls.from_rows(p, s, [[int(i == j) for j in range(size)] for i in range(size)], cols=size)

    @classmethod
    def zeros(cls, p: int, s: int, rows: int, cols: int) -> MatrixModPS:
        return cls(p, s, rows, cols, (0,) * (rows * cols))

    def to_rows(self) -> list[list[int]]:
        c = self.cols
        return [list(self.entries[i * c:(i + 1) * c]) for i in range(self.rows)]

    def column(self, j: int) -> list[int]:
        return [self.entries[i * self.cols + j] for i in range(self.rows)]

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.entries[i * self.cols + j]

    def _same_ring(self, other: MatrixModPS) -> None:
        if (self.p, self.s) != (other.p, other.s):
            raise ValueError("matrices over different rings")

    def __matmul__(self, other: MatrixModPS) -> MatrixModPS:
        self._same_ring(other)
        if self.cols != other.rows:
            raise ValueError("dimension mismatch")
        return MatrixModPS.from_rows(self.p, self.s, matmul(self.to_rows(), other.to_rows(), self.modulus), cols=other.cols)

    def apply(self, v: Sequence[int]) -> list[int]:
        if len(v) != self.cols:
            raise ValueError("dimension mismatch")
        mod = self.modulus
        c = self.cols
        e = self.entries
        return [sum(e[i * c + j] * v[j] for j in range(c)) % mod for i in range(self.rows)]

    def __add__(self, other: MatrixModPS) -> MatrixModPS:
        self._same_ring(other)
        return MatrixModPS(self.p, self.s, self.rows, self.cols, tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other: MatrixModPS) -> MatrixModPS:
        self._same_ring(other)
        return MatrixModPS(self.p, self.s, self.rows, self.cols, tuple(a - b for a, b in zip(self.entries, other.entries)))

    def __pow__(self, e: int) -> MatrixModPS:
        if self.rows != self.cols:
            raise ValueError("power of a non-square matrix")
        result = MatrixModPS.identity(self.p, self.s, self.rows)
        base = self
        while e:
            if e & 1:
                result = result @ base
            base = base @ base
            e >>= 1
        return result

    def reduce(self, s: int) -> MatrixModPS:
        """Entrywise reduction to Z/p^s' for s' <= s."""
        if not 1 <= s <= self.s:
            raise ValueError(f"cannot reduce mod p^{s} from mod p^{self.s}")
        return MatrixModPS(self.p, s, self.rows, self.cols, self.entries)

    def transpose(self) -> MatrixModPS:
        return MatrixModPS.from_rows(self.p, self.s, [list(r) for r in zip(*self.to_rows())], cols=self.rows)

    def to_dict(self) -> dict:
        return {"p": self.p, "s": self.s, "rows": self.rows, "cols": self.cols, "entries": list(self.entries)}

    @classmethod
    def from_dict(cls, d: dict) -> MatrixModPS:
        return cls(int(d["p"]), int(d["s"]), int(d["rows"]), int(d["cols"]), tuple(d["entries"]))


def matmul(a: list[list[int]], b: list[list[int]], mod: int) -> list[list[int]]:
    bt = list(zip(*b)) if b else []
    return [[sum(x * y for x, y in zip(row, col)) % mod for col in bt] for row in a]


@dataclass(frozen=True)
class SmithForm:
    divisors: tuple[int, ...]
    U: MatrixModPS
    V: MatrixModPS


def smith_form(A: MatrixModPS) -> SmithForm:
    """U A V = diag(p^e) with divisors e ascending; exponent s marks a zero entry."""
    p, s = A.p, A.s
    mod = p**s
    m, n = A.rows, A.cols
    D = A.to_rows()
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]
    divisors = []
    for k in range(min(m, n)):
        best = None
        for i in range(k, m):
            for j in range(k, n):
                v = valuation(D[i][j], p, s)
                if best is None or v < best[0]:
                    best = (v, i, j)
        v, i, j = best
        if v == s:
            divisors.extend([s] * (min(m, n) - k))
            break
        if i != k:
            D[i], D[k] = D[k], D[i]
            U[i], U[k] = U[k], U[i]
        if j != k:
            for row in D:
                row[j], row[k] = row[k], row[j]
            for row in V:
                row[j], row[k] = row[k], row[j]
        # normalize pivot to p^v
        unit = (D[k][k] // p**v) % mod
        inv = pow(unit, -1, mod)
        D[k] = [x * inv % mod for x in D[k]]
        U[k] = [x * inv % mod for x in U[k]]
        piv = p**v
        for i in range(k + 1, m):
            if D[i][k]:
                f = D[i][k] // piv
                D[i] = [(x - f * y) % mod for x, y in zip(D[i], D[k])]
                U[i] = [(x - f * y) % mod for x, y in zip(U[i], U[k])]
        for j in range(k + 1, n):
            if D[k][j]:
                f = D[k][j] // piv
                for row in D:
                    row[j] = (row[j] - f * row[k]) % mod
                for row in V:
                    row[j] = (row[j] - f * row[k]) % mod
        divisors.append(v)
    return SmithForm(
        tuple(divisors),
        MatrixModPS.from_rows(p, s, U, cols=m),
        MatrixModPS.from_rows(p, s, V, cols=n),
    )


def diagonal(A_rows: int, A_cols: int, p: int, s: int, divisors: Sequence[int]) -> MatrixModPS:
    rows = [[0] * A_cols for _ in range(A_rows)]
    for k, e in enumerate(divisors):
        rows[k][k] = p**e if e < s else 0
    return MatrixModPS.from_rows(p, s, rows, cols=A_cols)


@dataclass(frozen=True)
class Solution:
    particular: tuple[int, ...]
    kernel: tuple[tuple[int, ...], ...]


def solve(A: MatrixModPS, b: Sequence[int]) -> Solution | None:
    """Solve A x = b over Z/p^s.

    Returns None when there is no solution.  Otherwise the kernel basis
    generates the full solution module of A x = 0.
    """
    if len(b) != A.rows:
        raise ValueError("dimension mismatch")
    p, s = A.p, A.s
    mod = p**s
    sf = smith_form(A)
    c = sf.U.apply(list(b))
    y = [0] * A.cols
    gens = []
    for k in range(A.cols):
        e = sf.divisors[k] if k < len(sf.divisors) else s
        ck = c[k] if k < A.rows else 0
        if valuation(ck, p, s) < e:
            return None
        if e < s:
            y[k] = ck // p**e
        if e > 0:
            g = [0] * A.cols
            g[k] = p ** (s - e)
            gens.append(g)
    for k in range(A.cols, A.rows):
        if c[k] % mod:
            return None
    x = sf.V.apply(y)
    kernel = tuple(tuple(sf.V.apply(g)) for g in gens)
    return Solution(tuple(x), kernel)


def kernel(A: MatrixModPS) -> tuple[tuple[int, ...], ...]:
    sol = solve(A, [0] * A.rows)
    assert sol is not None
    return sol.kernel


def has_trivial_kernel(A: MatrixModPS) -> bool:
    """True iff x -> A x is injective on (Z/p^s)^cols."""
    if A.cols > A.rows:
        return False
    return all(e == 0 for e in smith_form(A).divisors)


def rank_mod_p(A: MatrixModPS) -> int:
    """Rank of A reduced mod p."""
    return sum(1 for e in smith_form(A.reduce(1)).divisors if e == 0)


def det_mod_p(A: MatrixModPS) -> int:
    """Determinant mod p by Gaussian elimination."""
    if A.rows != A.cols:
        raise ValueError("determinant of a non-square matrix")
    p = A.p
    M = [[x % p for x in r] for r in A.to_rows()]
    n = A.rows
    det = 1
    for k in range(n):
        piv = next((i for i in range(k, n) if M[i][k]), None)
        if piv is None:
            return 0
        if piv != k:
            M[k], M[piv] = M[piv], M[k]
            det = -det
        det = det * M[k][k] % p
        inv = pow(M[k][k], -1, p)
        for i in range(k + 1, n):
            if M[i][k]:
                f = M[i][k] * inv % p
                M[i] = [(x - f * y) % p for x, y in zip(M[i], M[k])]
    return det % p


def is_invertible(A: MatrixModPS) -> bool:
    return A.rows == A.cols and det_mod_p(A) != 0


def inverse(A: MatrixModPS) -> MatrixModPS:
    """Inverse over Z/p^s via the Smith form (all divisors must be units)."""
    if not is_invertible(A):
        raise ValueError("matrix is not invertible mod p")
    sf = smith_form(A)
    # U A V = I  =>  A^-1 = V U
    return sf.V @ sf.U


def rref_mod_p(rows: Sequence[Sequence[int]], p: int) -> tuple[list[list[int]], list[int]]:
    """Reduced row echelon form over GF(p); returns (rows, pivot columns)."""
    M = [[x % p for x in r] for r in rows]
    if not M:
        return [], []
    ncols = len(M[0])
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(M)) if M[i][c]), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = pow(M[r][c], -1, p)
        M[r] = [x * inv % p for x in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c]:
                f = M[i][c]
                M[i] = [(x - f * y) % p for x, y in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == len(M):
            break
    return M[:r], pivots


def nullspace_mod_p(A: MatrixModPS) -> list[list[int]]:
    """Basis of ker(A mod p), one vector per free column in increasing column order."""
    p = A.p
    R, pivots = rref_mod_p(A.to_rows(), p)
    free = [c for c in range(A.cols) if c not in pivots]
    basis = []
    for f in free:
        v = [0] * A.cols
        v[f] = 1
        for row, pc in zip(R, pivots):
            v[pc] = -row[f] % p
        basis.append(v)
    return basis
