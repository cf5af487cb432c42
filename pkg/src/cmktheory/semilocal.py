"""Brute-force K1 lab for small finite semilocal rings.

Rings are M_n(F_p) or a product of two such. For each ring we enumerate the
unit group, its commutator subgroup, and the subgroup generated by
(1+ab)(1+ba)^{-1}, which is the kernel of the Whitehead determinant
A* -> K1(A) for semilocal A. The two subgroups coincide except in the
M_2(F_2)-type cases.

Elements are tuples (one flattened n*n matrix per factor). Internally each
element also has an integer code equal to its position in the natural
enumeration, which lets the pair loops run on numpy arrays.
"""
from __future__ import annotations

import random
import re
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from itertools import product
from math import prod
from typing import Hashable, Iterable, Sequence

import numpy as np

RING_LIMIT = 10**5
GROUP_LIMIT = 10**4
PAIR_LIMIT = 10**6

Elem = tuple


class SizeBoundExceeded(ValueError):
    pass


class InternalConsistencyError(RuntimeError):
    pass


@dataclass(frozen=True)
class MatrixFactor:
    n: int
    p: int

    def __post_init__(self):
        if self.n < 1 or self.p < 2 or any(self.p % d == 0 for d in range(2, self.p)):
            raise ValueError(f"bad matrix ring M_{self.n}(F_{self.p})")

    @property
    def name(self) -> str:
        return f"F{self.p}" if self.n == 1 else f"M{self.n}F{self.p}"

    @property
    def size(self) -> int:
        return self.p ** (self.n * self.n)

    def add(self, a, b):
        p = self.p
        return tuple((x + y) % p for x, y in zip(a, b))

    def mul(self, a, b):
        n, p = self.n, self.p
        return tuple(
            sum(a[i * n + k] * b[k * n + j] for k in range(n)) % p for i in range(n) for j in range(n)
        )

    def one(self):
        n = self.n
        return tuple(int(i == j) for i in range(n) for j in range(n))

    def zero(self):
        return (0,) * (self.n * self.n)

    def inverse(self, a):
        """Gauss-Jordan mod p; None when singular."""
        n, p = self.n, self.p
        m = [list(a[i * n:(i + 1) * n]) + [int(i == j) for j in range(n)] for i in range(n)]
        for c in range(n):
            piv = next((r for r in range(c, n) if m[r][c] % p), None)
            if piv is None:
                return None
            m[c], m[piv] = m[piv], m[c]
            inv = pow(m[c][c], -1, p)
            m[c] = [x * inv % p for x in m[c]]
            for r in range(n):
                if r != c and m[r][c]:
                    f = m[r][c]
                    m[r] = [(x - f * y) % p for x, y in zip(m[r], m[c])]
        return tuple(x for row in m for x in row[n:])

    def elements(self):
        return product(range(self.p), repeat=self.n * self.n)

    @cached_property
    def weights(self) -> np.ndarray:
        k = self.n * self.n
        return self.p ** np.arange(k - 1, -1, -1, dtype=np.int64)

    def encode(self, arr: np.ndarray) -> np.ndarray:
        """Codes of an (m, n, n) array of matrices (natural enumeration index)."""
        return arr.reshape(len(arr), -1) @ self.weights

    def all_matrices(self) -> np.ndarray:
        k = self.n * self.n
        codes = np.arange(self.size, dtype=np.int64)
        digits = (codes[:, None] // self.weights[None, :]) % self.p
        return digits.reshape(self.size, self.n, self.n) if k else digits


@dataclass(frozen=True)
class FiniteRing:
    factors: tuple[MatrixFactor, ...]

    def __post_init__(self):
        if not 1 <= len(self.factors) <= 2:
            raise ValueError("only single matrix rings and pairwise products are supported")

    @property
    def name(self) -> str:
        return "x".join(f.name for f in self.factors)

    @property
    def size(self) -> int:
        return prod(f.size for f in self.factors)

    @property
    def is_commutative(self) -> bool:
        return all(f.n == 1 for f in self.factors)

    def add(self, a: Elem, b: Elem) -> Elem:
        return tuple(f.add(x, y) for f, x, y in zip(self.factors, a, b))

    def mul(self, a: Elem, b: Elem) -> Elem:
        return tuple(f.mul(x, y) for f, x, y in zip(self.factors, a, b))

    def one(self) -> Elem:
        return tuple(f.one() for f in self.factors)

    def zero(self) -> Elem:
        return tuple(f.zero() for f in self.factors)

    def inverse(self, a: Elem) -> Elem | None:
        parts = [f.inverse(x) for f, x in zip(self.factors, a)]
        return None if any(x is None for x in parts) else tuple(parts)

    def elements(self, reverse: bool = False) -> list[Elem]:
        if self.size > RING_LIMIT:
            raise SizeBoundExceeded(f"|{self.name}| = {self.size} exceeds {RING_LIMIT}")
        out = [tuple(parts) for parts in product(*(list(f.elements()) for f in self.factors))]
        return out[::-1] if reverse else out

    # -- vectorized views ---------------------------------------------------

    def _strides(self) -> list[int]:
        sizes = [f.size for f in self.factors]
        return [prod(sizes[i + 1:]) for i in range(len(sizes))]

    def code(self, a: Elem) -> int:
        total = 0
        for f, s, x in zip(self.factors, self._strides(), a):
            total += s * int(np.dot(np.asarray(x, dtype=np.int64), f.weights))
        return total

    def parts_of(self, codes: np.ndarray) -> list[np.ndarray]:
        """Per-factor (m, n, n) arrays for an array of element codes."""
        out = []
        for f, s in zip(self.factors, self._strides()):
            sub = (codes // s) % f.size
            out.append(f.all_matrices()[sub])
        return out

    def encode(self, parts: Sequence[np.ndarray]) -> np.ndarray:
        return sum(s * f.encode(x) for f, s, x in zip(self.factors, self._strides(), parts))

    def check_axioms(self, trials: int = 50, seed: int = 0) -> bool:
        """Spot-check the ring axioms on random triples."""
        rng = random.Random(seed)

        def rand():
            return tuple(tuple(rng.randrange(f.p) for _ in range(f.n * f.n)) for f in self.factors)

        one, zero = self.one(), self.zero()
        for _ in range(trials):
            a, b, c = rand(), rand(), rand()
            if self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)):
                return False
            if self.mul(a, self.add(b, c)) != self.add(self.mul(a, b), self.mul(a, c)):
                return False
            if self.mul(self.add(a, b), c) != self.add(self.mul(a, c), self.mul(b, c)):
                return False
            if self.mul(one, a) != a or self.mul(a, one) != a or self.add(a, zero) != a:
                return False
        return True


def matrix_ring(n: int, p: int) -> FiniteRing:
    return FiniteRing((MatrixFactor(n, p),))


_FACTOR_RE = re.compile(r"^(?:M(\d+))?F(\d+)$")


def parse_ring_name(name: str) -> FiniteRing:
    """'M2F3' = M_2(F_3), 'F5' = F_5, 'F2xF2' = F_2 x F_2."""
    factors = []
    for part in name.strip().upper().split("X"):
        m = _FACTOR_RE.match(part)
        if not m:
            raise ValueError(f"cannot parse ring {name!r}")
        factors.append(MatrixFactor(int(m.group(1) or 1), int(m.group(2))))
    return FiniteRing(tuple(factors))


class FiniteGroup:
    """Finite group given by an element list and a Cayley table on positions.

    table[i, j] is the position of elements[i] * elements[j].
    """

    def __init__(self, elements: Iterable[Hashable], table: np.ndarray, identity: Hashable,
                 verify: bool = True):
        self.elements = list(elements)
        self.index = {x: i for i, x in enumerate(self.elements)}
        self.table = np.asarray(table, dtype=np.int64)
        self.identity = identity
        self.e = self.index[identity]
        rows = np.nonzero(self.table == self.e)
        self.inv_idx = np.full(len(self.elements), -1, dtype=np.int64)
        self.inv_idx[rows[0]] = rows[1]
        if verify:
            self.verify()

    def __len__(self):
        return len(self.elements)

    def __contains__(self, x):
        return x in self.index

    @property
    def members(self) -> frozenset:
        return frozenset(self.elements)

    def op(self, x, y):
        return self.elements[self.table[self.index[x], self.index[y]]]

    def inverse(self, x):
        return self.elements[self.inv_idx[self.index[x]]]

    def verify(self):
        n = len(self)
        t = self.table
        if t.shape != (n, n) or t.min() < 0 or t.max() >= n:
            raise InternalConsistencyError("not closed under the operation")
        if not (np.array_equal(t[self.e], np.arange(n)) and np.array_equal(t[:, self.e], np.arange(n))):
            raise InternalConsistencyError("identity is not two-sided")
        if (self.inv_idx < 0).any() or not (t[self.inv_idx, np.arange(n)] == self.e).all():
            raise InternalConsistencyError("missing or one-sided inverses")

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.table, self.table.T))

    def generate(self, gens: Iterable[int]) -> list[int]:
        """Positions of the subgroup generated by gens (positions), breadth first."""
        gens = list(dict.fromkeys(int(g) for g in gens))
        seen = np.zeros(len(self), dtype=bool)
        seen[self.e] = True
        order = [self.e]
        queue = deque([self.e])
        while queue:
            x = queue.popleft()
            for y in self.table[x, gens].tolist() if gens else []:
                if not seen[y]:
                    seen[y] = True
                    order.append(y)
                    queue.append(y)
        return order

    def subgroup(self, gens: Iterable[int]) -> FiniteGroup:
        pos = self.generate(gens)
        remap = np.full(len(self), -1, dtype=np.int64)
        remap[pos] = np.arange(len(pos))
        sub = remap[self.table[np.ix_(pos, pos)]]
        return FiniteGroup([self.elements[i] for i in pos], sub, self.identity)


def unit_group(a: FiniteRing, reverse: bool = False) -> FiniteGroup:
    """All two-sided units of a, with the Cayley table computed exactly mod p."""
    one = a.one()
    units = []
    for x in a.elements(reverse):
        y = a.inverse(x)
        if y is None:
            continue
        if a.mul(x, y) != one or a.mul(y, x) != one:
            raise InternalConsistencyError(f"{x} has no two-sided inverse")
        units.append(x)
    if len(units) > GROUP_LIMIT:
        raise SizeBoundExceeded(f"|A*| = {len(units)} exceeds {GROUP_LIMIT}")
    codes = np.array([a.code(x) for x in units], dtype=np.int64)
    pos = np.full(a.size, -1, dtype=np.int64)
    pos[codes] = np.arange(len(units))
    parts = a.parts_of(codes)
    table = np.empty((len(units), len(units)), dtype=np.int64)
    for i in range(len(units)):
        prods = [np.einsum("ij,bjk->bik", P[i], P) % f.p for P, f in zip(parts, a.factors)]
        table[i] = pos[a.encode(prods)]
    return FiniteGroup(units, table, one)


def commutator_subgroup(g: FiniteGroup) -> FiniteGroup:
    """Subgroup generated by every xyx^{-1}y^{-1}."""
    if len(g) > GROUP_LIMIT:
        raise SizeBoundExceeded(f"|G| = {len(g)} exceeds {GROUP_LIMIT}")
    t, inv = g.table, g.inv_idx
    xy = t
    xiyi = t[np.ix_(inv, inv)]
    comms = np.unique(t[xy.ravel(), xiyi.ravel()])
    return g.subgroup(sorted(comms.tolist(), key=lambda i: i))


def ker_theta(a: FiniteRing, reverse: bool = False, units: FiniteGroup | None = None) -> FiniteGroup:
    """Subgroup of A* generated by (1+ab)(1+ba)^{-1} over all a, b with 1+ab a unit."""
    if a.size**2 > PAIR_LIMIT:
        raise SizeBoundExceeded(f"{a.size}^2 pairs exceeds {PAIR_LIMIT}")
    g = units if units is not None else unit_group(a, reverse)
    unit_codes = np.array([a.code(x) for x in g.elements], dtype=np.int64)
    pos = np.full(a.size, -1, dtype=np.int64)
    pos[unit_codes] = np.arange(len(g))
    inv_codes = unit_codes[g.inv_idx]

    all_codes = np.arange(a.size, dtype=np.int64)
    if reverse:
        all_codes = all_codes[::-1]
    parts = a.parts_of(all_codes)
    eyes = [np.eye(f.n, dtype=np.int64) for f in a.factors]
    found = np.zeros(len(g), dtype=bool)
    for i in range(a.size):
        u = [(e + np.einsum("ij,bjk->bik", P[i], P)) % f.p for P, e, f in zip(parts, eyes, a.factors)]
        w = [(e + np.einsum("bij,jk->bik", P, P[i])) % f.p for P, e, f in zip(parts, eyes, a.factors)]
        cu, cw = a.encode(u), a.encode(w)
        ok = pos[cu] >= 0
        if not (pos[cw[ok]] >= 0).all():
            raise InternalConsistencyError("1+ab is a unit but 1+ba is not")
        winv = a.parts_of(inv_codes[pos[cw[ok]]])
        gen = [np.einsum("bij,bjk->bik", x[ok], y) % f.p for x, y, f in zip(u, winv, a.factors)]
        found[pos[a.encode(gen)]] = True
    return g.subgroup(np.nonzero(found)[0].tolist())


@dataclass
class VasersteinResult:
    ring: str
    verdict: str  # "equal" or "strict"
    units: int
    ker_theta: int
    commutators: int

    def summary(self) -> str:
        return f"{self.verdict}; |Ker θ| = {self.ker_theta}; |[A*,A*]| = {self.commutators}"


def vaserstein_check(a: FiniteRing, reverse: bool = False) -> VasersteinResult:
    g = unit_group(a, reverse)
    comm = commutator_subgroup(g)
    ker = ker_theta(a, reverse, units=g)
    if not comm.members <= ker.members:
        raise InternalConsistencyError("[A*, A*] is not contained in Ker theta")
    verdict = "equal" if comm.members == ker.members else "strict"
    return VasersteinResult(a.name, verdict, len(g), len(ker), len(comm))
