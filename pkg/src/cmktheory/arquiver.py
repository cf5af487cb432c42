"""Auslander-Reiten matrices, ADE Cartan data and K0 = Coker(Upsilon).

Indecomposables are indexed 0..t with index 0 the free module R. Each
non-free M_j (1 <= j <= t) carries one AR sequence
``0 -> tau(M_j) -> X_j -> M_j -> 0`` recorded by its translate index and
the multiplicities of X_j. Presentations are trusted: nothing checks that a
ring with this AR quiver exists.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .intlinalg import FgAbelianGroup, IntegerMatrix, cokernel


class MalformedPresentation(ValueError):
    pass


@dataclass(frozen=True)
class ARSequence:
    end: int
    translate: int
    middle: tuple[int, ...]

    def __post_init__(self):
        if self.translate == 0 or self.end == 0:
            raise MalformedPresentation("AR sequences neither start nor end at the free module")
        if any(n < 0 for n in self.middle):
            raise MalformedPresentation(f"negative middle multiplicity in {self.middle}")


@dataclass(frozen=True)
class ARPresentation:
    sequences: tuple[ARSequence, ...]
    labels: tuple[str, ...] = field(default=())

    def __post_init__(self):
        t = len(self.sequences)
        if not self.labels:
            object.__setattr__(self, "labels", tuple(f"M{i}" for i in range(t + 1)))
        if len(self.labels) != t + 1:
            raise MalformedPresentation(f"{len(self.labels)} labels for {t} sequences")
        if len(set(self.labels)) != len(self.labels):
            raise MalformedPresentation("module labels must be distinct")
        ends = sorted(s.end for s in self.sequences)
        if ends != list(range(1, t + 1)):
            raise MalformedPresentation(f"need exactly one sequence ending at each of 1..{t}, got {ends}")
        for s in self.sequences:
            if not 1 <= s.translate <= t:
                raise MalformedPresentation(f"translate index {s.translate} out of range 1..{t}")
            if len(s.middle) != t + 1:
                raise MalformedPresentation(
                    f"sequence ending at {s.end}: {len(s.middle)} middle multiplicities, expected {t + 1}"
                )

    @property
    def t(self) -> int:
        return len(self.sequences)

    def sequence(self, j: int) -> ARSequence:
        return next(s for s in self.sequences if s.end == j)

    def relabel(self, perm: dict[int, int]) -> ARPresentation:
        """Rename non-free module i as perm[i]; perm must fix 0 and permute 1..t."""
        full = {0: 0, **perm}
        t = self.t
        if sorted(full) != list(range(t + 1)) or sorted(full.values()) != list(range(t + 1)) or full[0] != 0:
            raise MalformedPresentation("relabeling must permute 1..t and fix 0")
        seqs = []
        for s in self.sequences:
            middle = [0] * (t + 1)
            for i, n in enumerate(s.middle):
                middle[full[i]] = n
            seqs.append(ARSequence(full[s.end], full[s.translate], tuple(middle)))
        labels = [""] * (t + 1)
        for i, lab in enumerate(self.labels):
            labels[full[i]] = lab
        return ARPresentation(tuple(sorted(seqs, key=lambda s: s.end)), tuple(labels))


def build_upsilon(p: ARPresentation) -> IntegerMatrix:
    """The (t+1) x t AR matrix: column j is tau(M_j) + M_j - sum_i n_ij M_i."""
    t = p.t
    rows = [[0] * t for _ in range(t + 1)]
    for j in range(1, t + 1):
        s = p.sequence(j)
        for i in range(t + 1):
            rows[i][j - 1] = (i == s.translate) + (i == j) - s.middle[i]
    return IntegerMatrix.from_rows(rows)


def k0_group(p: ARPresentation) -> FgAbelianGroup:
    return cokernel(build_upsilon(p))


# Dynkin graphs on vertices 1..t, plus the neighbours of the affine vertex 0
# in the extended diagram. E-type chains are 1-2-...-(t-1) with vertex t
# hanging off vertex 3; this matches the E6 labeling of X^3+Y^4+Z^2.
def dynkin_edges(kind: str, n: int) -> tuple[list[tuple[int, int]], list[int]]:
    kind = kind.upper()
    if kind == "A":
        if n < 1:
            raise ValueError(f"A_{n}: rank must be >= 1")
        edges = [(i, i + 1) for i in range(1, n)]
        affine = [1] if n == 1 else [1, n]
    elif kind == "D":
        if n < 4:
            raise ValueError(f"D_{n}: rank must be >= 4")
        edges = [(i, i + 1) for i in range(1, n - 2)] + [(n - 2, n - 1), (n - 2, n)]
        affine = [2]
    elif kind == "E":
        if n not in (6, 7, 8):
            raise ValueError(f"E_{n}: rank must be 6, 7 or 8")
        edges = [(i, i + 1) for i in range(1, n - 1)] + [(3, n)]
        affine = {6: [6], 7: [1], 8: [7]}[n]
    else:
        raise ValueError(f"unknown Dynkin type {kind}{n}")
    return edges, affine


def parse_dynkin(name: str) -> tuple[str, int]:
    name = name.strip().replace("_", "")
    if len(name) < 2 or not name[1:].isdigit():
        raise ValueError(f"cannot parse Dynkin type {name!r}")
    return name[0].upper(), int(name[1:])


def cartan_matrix(kind: str, n: int) -> IntegerMatrix:
    edges, _ = dynkin_edges(kind, n)
    rows = [[2 * (i == j) for j in range(n)] for i in range(n)]
    for a, b in edges:
        rows[a - 1][b - 1] = rows[b - 1][a - 1] = -1
    return IntegerMatrix.from_rows(rows)


def dynkin_presentation(kind: str, n: int) -> ARPresentation:
    """AR data of the rational double point of the given type (tau = identity).

    A simple affine edge contributes one copy of R to X_j; for A_1 the
    extended diagram has a double edge but only a single -1 is recorded.
    """
    edges, affine = dynkin_edges(kind, n)
    nbrs = {j: set() for j in range(n + 1)}
    for a, b in edges:
        nbrs[a].add(b)
        nbrs[b].add(a)
    for j in affine:
        nbrs[j].add(0)
    seqs = []
    for j in range(1, n + 1):
        middle = tuple(int(i in nbrs[j]) for i in range(n + 1))
        seqs.append(ARSequence(j, j, middle))
    return ARPresentation(tuple(seqs))


def dynkin_upsilon(kind: str, n: int | None = None) -> IntegerMatrix:
    if n is None:
        kind, n = parse_dynkin(kind)
    return build_upsilon(dynkin_presentation(kind, n))


ADE_TYPES = [("A", 1), ("A", 2), ("A", 3), ("A", 4), ("D", 4), ("D", 5), ("E", 6), ("E", 7), ("E", 8)]

# 0 -> M_j -> X_j -> M_j -> 0 for the E6 hypersurface X^3 + Y^4 + Z^2.
E6_HYPERSURFACE = ARPresentation(
    (
        ARSequence(1, 1, (0, 0, 1, 0, 0, 0, 0)),
        ARSequence(2, 2, (0, 1, 0, 1, 0, 0, 0)),
        ARSequence(3, 3, (0, 0, 1, 0, 1, 0, 1)),
        ARSequence(4, 4, (0, 0, 0, 1, 0, 1, 0)),
        ARSequence(5, 5, (0, 0, 0, 0, 1, 0, 0)),
        ARSequence(6, 6, (1, 0, 0, 1, 0, 0, 0)),
    )
)

DUAL_NUMBERS = ARPresentation((ARSequence(1, 1, (1, 0)),), ("R", "m"))
CUSP = ARPresentation((ARSequence(1, 1, (1, 1)),), ("R", "m"))
