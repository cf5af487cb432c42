"""Exact arithmetic for the concrete rings: F_p / Q, k[[T]]/T^N, the cusp
k[[T^2,T^3]], the dual numbers k[X]/(X^2), and matrices of module maps.

Every module in play (R, its maximal ideal m) sits inside one commutative
ambient ring, and every homomorphism between them is multiplication by an
ambient element. A map is therefore stored as a truncated series (its
multiplier) together with a support tag saying which Hom space it lives in.
"""
from __future__ import annotations

import enum
import functools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, Union

FieldElem = Union[int, Fraction]


class NotAUnit(ArithmeticError):
    pass


class NotInvertible(ArithmeticError):
    pass


class PrecisionMismatch(ValueError):
    pass


class ConstraintViolation(ValueError):
    """A multiplier does not lie in the Hom space its matrix slot requires."""


def _is_prime(n: int) -> bool:
    return n >= 2 and all(n % d for d in range(2, int(n**0.5) + 1))


@dataclass(frozen=True)
class Field:
    """F_p for an odd prime p, or Q when p is None. Characteristic 2 is refused."""

    p: int | None = None

    def __post_init__(self):
        if self.p is not None:
            if not _is_prime(self.p):
                raise ValueError(f"{self.p} is not prime")
            if self.p == 2:
                raise ValueError("characteristic 2 is not supported (1/2 is needed)")

    @classmethod
    def parse(cls, spec: str | int | None) -> Field:
        if spec is None or str(spec).upper() in ("Q", "QQ"):
            return cls(None)
        s = str(spec).upper().removeprefix("F")
        return cls(int(s))

    @property
    def name(self) -> str:
        return "Q" if self.p is None else f"F{self.p}"

    @property
    def is_finite(self) -> bool:
        return self.p is not None

    def __call__(self, x) -> FieldElem:
        if self.p is None:
            return Fraction(x)
        if type(x) is int:
            return x % self.p
        if isinstance(x, Fraction):
            return x.numerator * pow(x.denominator, -1, self.p) % self.p
        return int(x) % self.p

    def inv(self, x: FieldElem) -> FieldElem:
        x = self(x)
        if x == 0:
            raise ZeroDivisionError("inverse of 0 in a field")
        return pow(x, -1, self.p) if self.p is not None else 1 / x

    def elements(self) -> list[FieldElem]:
        if self.p is None:
            raise ValueError("Q is not enumerable")
        return list(range(self.p))

    def units(self) -> list[FieldElem]:
        return self.elements()[1:]

    def format(self, x: FieldElem) -> str:
        return str(self(x))


class Support(enum.Enum):
    """Exponents forced to vanish.

    FULL: k[[T]] (or all of k[X]/X^2). SEMIGROUP: no T^1 term, i.e. the cusp
    ring k[[T^2,T^3]]. IDEAL: no T^0, T^1, the cusp's maximal ideal.
    DUAL: no X^0, the maximal ideal (X) of the dual numbers.
    """

    FULL = frozenset()
    SEMIGROUP = frozenset({1})
    IDEAL = frozenset({0, 1})
    DUAL = frozenset({0})

    def allows(self, coeffs: Sequence[FieldElem]) -> bool:
        return all(coeffs[i] == 0 for i in self.value if i < len(coeffs))

    def exponents(self, n: int) -> set[int]:
        return set(range(n)) - self.value

    @staticmethod
    def smallest_containing(exps: set[int], n: int) -> Support:
        fits = [s for s in Support if exps <= s.exponents(n)]
        return min(fits, key=lambda s: (len(s.exponents(n)), -len(s.value)))

    def product(self, other: Support, n: int) -> Support:
        return _support_product(self, other, n)

    def join(self, other: Support, n: int) -> Support:
        return _support_join(self, other, n)


@functools.lru_cache(maxsize=None)
def _support_product(a: Support, b: Support, n: int) -> Support:
    ea, eb = a.exponents(n), b.exponents(n)
    return Support.smallest_containing({i + j for i in ea for j in eb if i + j < n}, n)


@functools.lru_cache(maxsize=None)
def _support_join(a: Support, b: Support, n: int) -> Support:
    return Support.smallest_containing(a.exponents(n) | b.exponents(n), n)


@dataclass(frozen=True)
class TruncatedSeries:
    """c0 + c1 T + ... + c_{N-1} T^{N-1} modulo T^N."""

    field: Field
    coeffs: tuple
    support: Support = field(default=Support.FULL, compare=False)

    def __post_init__(self):
        if len(self.coeffs) < 2:
            raise ValueError("precision must be at least 2")
        if not self.support.allows(self.coeffs):
            raise ConstraintViolation(f"{self.coeffs} has terms outside {self.support.name} support")

    @classmethod
    def of(cls, fld: Field, coeffs: Iterable, n: int, support: Support = Support.FULL) -> TruncatedSeries:
        c = [fld(x) for x in coeffs][:n]
        c += [fld(0)] * (n - len(c))
        return cls(fld, tuple(c), support)

    @classmethod
    def constant(cls, fld: Field, c, n: int, support: Support = Support.FULL) -> TruncatedSeries:
        return cls.of(fld, [c], n, support)

    @classmethod
    def monomial(cls, fld: Field, exp: int, n: int, coeff=1) -> TruncatedSeries:
        c = [0] * n
        if exp < n:
            c[exp] = coeff
        s = Support.smallest_containing({exp} if exp < n else set(), n)
        return cls.of(fld, c, n, s)

    @property
    def precision(self) -> int:
        return len(self.coeffs)

    @property
    def c0(self) -> FieldElem:
        return self.coeffs[0]

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def is_unit(self) -> bool:
        return self.c0 != 0

    def retag(self, support: Support) -> TruncatedSeries:
        return TruncatedSeries(self.field, self.coeffs, support)

    def tightest(self) -> TruncatedSeries:
        exps = {i for i, c in enumerate(self.coeffs) if c != 0}
        return self.retag(Support.smallest_containing(exps, self.precision))

    def _check(self, other: TruncatedSeries):
        if not isinstance(other, TruncatedSeries):
            raise TypeError(f"cannot combine series with {type(other).__name__}")
        if other.field != self.field:
            raise PrecisionMismatch(f"fields differ: {self.field.name} vs {other.field.name}")
        if other.precision != self.precision:
            raise PrecisionMismatch(f"precisions differ: {self.precision} vs {other.precision}")

    def _lift(self, other) -> TruncatedSeries:
        if isinstance(other, TruncatedSeries):
            return other
        return TruncatedSeries.constant(self.field, other, self.precision)

    def __add__(self, other) -> TruncatedSeries:
        other = self._lift(other)
        self._check(other)
        f = self.field
        return TruncatedSeries(
            f,
            tuple(f(a + b) for a, b in zip(self.coeffs, other.coeffs)),
            self.support.join(other.support, self.precision),
        )

    __radd__ = __add__

    def __neg__(self) -> TruncatedSeries:
        return TruncatedSeries(self.field, tuple(self.field(-a) for a in self.coeffs), self.support)

    def __sub__(self, other) -> TruncatedSeries:
        return self + (-self._lift(other))

    def __rsub__(self, other) -> TruncatedSeries:
        return self._lift(other) - self

    def __mul__(self, other) -> TruncatedSeries:
        if not isinstance(other, TruncatedSeries):
            c = self.field(other)
            return TruncatedSeries(self.field, tuple(self.field(c * a) for a in self.coeffs), self.support)
        return series_mul(self, other)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> TruncatedSeries:
        if e < 0:
            return series_inv(self) ** (-e)
        out = TruncatedSeries.constant(self.field, 1, self.precision, Support.SEMIGROUP)
        for _ in range(e):
            out = out * self
        return out

    def inverse(self) -> TruncatedSeries:
        return series_inv(self)

    def format(self, var: str = "T") -> str:
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            s = self.field.format(c)
            if self.field.p is None and (s.startswith("-") or "/" in s) and i:
                s = f"({s})"
            if i == 0:
                terms.append(s)
            else:
                mono = var if i == 1 else f"{var}^{i}"
                terms.append(mono if s == "1" else f"{s}{mono}")
        return "+".join(terms) if terms else "0"

    def __repr__(self) -> str:
        return f"TruncatedSeries({self.format()} mod T^{self.precision}, {self.support.name})"


def series_mul(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    a._check(b)
    n, f = a.precision, a.field
    out = [0] * n
    for i, x in enumerate(a.coeffs):
        if x == 0:
            continue
        for j in range(n - i):
            y = b.coeffs[j]
            if y:
                out[i + j] += x * y
    return TruncatedSeries(f, tuple(f(c) for c in out), a.support.product(b.support, n))


def series_inv(a: TruncatedSeries) -> TruncatedSeries:
    """Two-sided inverse by the usual recursion b_k = -c0^{-1} sum_{i>=1} c_i b_{k-i}."""
    if a.c0 == 0:
        raise NotAUnit(f"{a.format()} has zero constant term")
    f, n = a.field, a.precision
    c0inv = f.inv(a.c0)
    b = [c0inv]
    for k in range(1, n):
        b.append(f(-c0inv * sum(a.coeffs[i] * b[k - i] for i in range(1, k + 1))))
    # the inverse of a unit of a subring stays in that subring
    support = a.support if a.support in (Support.FULL, Support.SEMIGROUP) else Support.FULL
    return TruncatedSeries(f, tuple(b), support)


def cusp_ring_member(a: TruncatedSeries) -> bool:
    return a.coeffs[1] == 0


@dataclass(frozen=True)
class MultiplierEndo:
    """Endomorphism x -> h*x of the cusp's maximal ideal, h in k[[T]]."""

    h: TruncatedSeries

    def __call__(self, x: TruncatedSeries) -> TruncatedSeries:
        if not Support.IDEAL.allows(x.coeffs):
            raise ConstraintViolation(f"{x.format()} is not in the maximal ideal")
        return (self.h * x).retag(Support.IDEAL)

    @property
    def is_automorphism(self) -> bool:
        return self.h.is_unit()

    def inverse(self) -> MultiplierEndo:
        return MultiplierEndo(series_inv(self.h))

    def compose(self, other: MultiplierEndo) -> MultiplierEndo:
        return MultiplierEndo(self.h * other.h)


def chi(h: TruncatedSeries) -> MultiplierEndo:
    return MultiplierEndo(h.retag(Support.FULL))


# ---------------------------------------------------------------------------
# Hom systems: which multipliers are legal maps M_j -> M_i.


class HomSystem:
    """Modules M_0..M_{n-1}, pairwise non-isomorphic, with local endomorphism
    rings; Hom(M_j, M_i) encoded as multipliers of the given support."""

    name = "generic"
    var = "T"
    labels: tuple[str, ...] = ()

    def __init__(self, field: Field, precision: int, n_modules: int):
        if precision < 2:
            raise ValueError("precision must be at least 2")
        self.field = field
        self.precision = precision
        self.n_modules = n_modules

    def __eq__(self, other):
        return (
            type(self) is type(other)
            and self.field == other.field
            and self.precision == other.precision
            and self.n_modules == other.n_modules
        )

    def __hash__(self):
        return hash((type(self).__name__, self.field, self.precision, self.n_modules))

    def __repr__(self):
        return f"{type(self).__name__}({self.field.name}, N={self.precision})"

    def support(self, i: int, j: int) -> Support:
        """Support of Hom(M_j, M_i) (column j to row i)."""
        return Support.FULL if i == j else Support.DUAL

    def annihilated(self, j: int) -> frozenset[int]:
        """Exponents whose multipliers act as zero on M_j."""
        return frozenset()

    def normalize(self, i: int, j: int, s: TruncatedSeries) -> TruncatedSeries:
        if s.field != self.field or s.precision != self.precision:
            raise PrecisionMismatch(f"entry over {s.field.name}/N={s.precision} in {self!r}")
        dead = self.annihilated(j)
        coeffs = tuple(0 if k in dead else c for k, c in enumerate(s.coeffs))
        sup = self.support(i, j)
        if not sup.allows(coeffs):
            raise ConstraintViolation(
                f"{s.format(self.var)} is not a map {self.label(j)} -> {self.label(i)} ({sup.name} support)"
            )
        return TruncatedSeries(self.field, coeffs, sup)

    def label(self, i: int) -> str:
        return self.labels[i] if i < len(self.labels) else f"M{i}"

    def zero(self, i: int, j: int) -> TruncatedSeries:
        return TruncatedSeries.of(self.field, [], self.precision, self.support(i, j))

    def one(self, i: int) -> TruncatedSeries:
        return TruncatedSeries.of(self.field, [1], self.precision, self.support(i, i))

    def series(self, coeffs) -> TruncatedSeries:
        return TruncatedSeries.of(self.field, coeffs, self.precision).tightest()


class DualNumbers(HomSystem):
    """R = k[X]/(X^2) and m = (X). Modules: 0 = R, 1 = m.

    End(m) = k acts through constants, so the X-coefficient of any map out of
    m is dropped on normalization.
    """

    name = "dual"
    var = "X"
    labels = ("R", "m")

    def __init__(self, field: Field):
        super().__init__(field, 2, 2)

    def support(self, i, j):
        if j == 1:
            return Support.SEMIGROUP  # constants: End(m) and Hom(m, R)
        return Support.FULL if i == 0 else Support.DUAL

    def annihilated(self, j):
        return frozenset({1}) if j == 1 else frozenset()


class Cusp(HomSystem):
    """R = k[[T^2,T^3]] and m = (T^2,T^3), truncated at T^N. Modules: 0 = R, 1 = m.

    End(m) = Hom(m, R) = k[[T]] (every map m -> R lands in m), Hom(R, m) = m.
    """

    name = "cusp"
    var = "T"
    labels = ("R", "m")

    def __init__(self, field: Field, precision: int = 8):
        super().__init__(field, precision, 2)

    def support(self, i, j):
        if j == 1:
            return Support.FULL
        return Support.SEMIGROUP if i == 0 else Support.IDEAL


# ---------------------------------------------------------------------------
# Matrices of maps between direct sums of the M_i.


@dataclass(frozen=True)
class HomMatrix:
    """Map from the sum of M_{cols[j]} to the sum of M_{rows[i]}; column vectors."""

    system: HomSystem
    rows: tuple[int, ...]
    cols: tuple[int, ...]
    entries: tuple[tuple[TruncatedSeries, ...], ...]

    def __post_init__(self):
        if len(self.entries) != len(self.rows) or any(len(r) != len(self.cols) for r in self.entries):
            raise ValueError("entry shape does not match module labels")
        fixed = tuple(
            tuple(self.system.normalize(a, b, x) for b, x in zip(self.cols, row))
            for a, row in zip(self.rows, self.entries)
        )
        object.__setattr__(self, "entries", fixed)

    @classmethod
    def build(cls, system: HomSystem, rows, cols, entries) -> HomMatrix:
        conv = []
        for row in entries:
            r = []
            for x in row:
                if not isinstance(x, TruncatedSeries):
                    x = TruncatedSeries.constant(system.field, x, system.precision).tightest()
                r.append(x)
            conv.append(tuple(r))
        return cls(system, tuple(rows), tuple(cols), tuple(conv))

    def __getitem__(self, ij) -> TruncatedSeries:
        i, j = ij
        return self.entries[i][j]

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), len(self.cols)

    def _product(self, other: HomMatrix):
        if self.system != other.system:
            raise PrecisionMismatch("matrices over different Hom systems")
        if self.cols != other.rows:
            raise ValueError(f"cannot compose: domain {self.cols} vs codomain {other.rows}")
        out = []
        for i, a in enumerate(self.rows):
            row = []
            for k, c in enumerate(other.cols):
                acc = self.system.zero(a, c)
                for j in range(len(self.cols)):
                    acc = acc + self.entries[i][j] * other.entries[j][k]
                row.append(acc)
            out.append(tuple(row))
        return out

    def __matmul__(self, other: HomMatrix) -> HomMatrix:
        entries = self._product(other)
        cls = EndoMatrix if self.rows == other.cols else HomMatrix
        return cls(self.system, self.rows, other.cols, tuple(entries))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, HomMatrix)
            and self.system == other.system
            and self.rows == other.rows
            and self.cols == other.cols
            and self.entries == other.entries
        )

    def __hash__(self):
        return hash((self.rows, self.cols, self.entries))

    def scale(self, s: TruncatedSeries) -> HomMatrix:
        return type(self)(
            self.system, self.rows, self.cols, tuple(tuple(s * x for x in row) for row in self.entries)
        )

    def format(self) -> str:
        var = self.system.var
        cells = [[x.format(var) for x in row] for row in self.entries]
        w = max(len(c) for row in cells for c in row)
        return "\n".join("[ " + "  ".join(f"{c:>{w}}" for c in row) + " ]" for row in cells)


class EndoMatrix(HomMatrix):
    """Square matrix with equal row and column labels: an endomorphism of a sum."""

    def __post_init__(self):
        if self.rows != self.cols:
            raise ValueError("endomorphism matrix needs equal row/column modules")
        super().__post_init__()

    @property
    def modules(self) -> tuple[int, ...]:
        return self.rows

    @property
    def size(self) -> int:
        return len(self.rows)

    @classmethod
    def of(cls, system: HomSystem, modules: Sequence[int], entries) -> EndoMatrix:
        m = HomMatrix.build(system, modules, modules, entries)
        return cls(system, m.rows, m.cols, m.entries)

    @classmethod
    def identity(cls, system: HomSystem, modules: Sequence[int]) -> EndoMatrix:
        mods = tuple(modules)
        return cls(
            system,
            mods,
            mods,
            tuple(
                tuple(system.one(a) if i == j else system.zero(a, b) for j, b in enumerate(mods))
                for i, a in enumerate(mods)
            ),
        )

    @classmethod
    def diag(cls, system: HomSystem, modules: Sequence[int], values: Sequence) -> EndoMatrix:
        mods = tuple(modules)
        ident = cls.identity(system, mods)
        rows = [list(r) for r in ident.entries]
        for i, v in enumerate(values):
            if not isinstance(v, TruncatedSeries):
                v = TruncatedSeries.constant(system.field, v, system.precision)
            rows[i][i] = v
        return cls(system, mods, mods, tuple(tuple(r) for r in rows))

    def is_identity(self) -> bool:
        return self == EndoMatrix.identity(self.system, self.modules)

    def diagonal_units(self) -> bool:
        return all(self.entries[i][i].is_unit() for i in range(self.size))

    def inverse(self) -> EndoMatrix:
        return endo_matrix_inv(self)


def endo_matrix_mul(a: EndoMatrix, b: EndoMatrix) -> EndoMatrix:
    if a.modules != b.modules:
        raise ValueError("endomorphisms of different modules")
    return a @ b


def endo_matrix_inv(a: EndoMatrix) -> EndoMatrix:
    """Gauss-Jordan inverse.

    A pivot for column k must be a unit sitting in a row whose module equals
    M_{modules[k]}; entries between distinct indecomposables are never units,
    so for pairwise distinct labels this is exactly the diagonal-units test.
    """
    sysm, mods, n = a.system, a.modules, a.size
    left = [list(r) for r in a.entries]
    right = [list(r) for r in EndoMatrix.identity(sysm, mods).entries]

    def norm(i, j, x):
        return sysm.normalize(mods[i], mods[j], x)

    for k in range(n):
        piv = next((r for r in range(k, n) if mods[r] == mods[k] and left[r][k].is_unit()), None)
        if piv is None:
            raise NotInvertible(f"no unit pivot in column {k} (module {sysm.label(mods[k])})")
        left[k], left[piv] = left[piv], left[k]
        right[k], right[piv] = right[piv], right[k]
        pinv = series_inv(left[k][k])
        left[k] = [norm(k, j, pinv * x) for j, x in enumerate(left[k])]
        right[k] = [norm(k, j, pinv * x) for j, x in enumerate(right[k])]
        for i in range(n):
            if i == k or left[i][k].is_zero():
                continue
            c = left[i][k]
            left[i] = [norm(i, j, x - c * y) for j, (x, y) in enumerate(zip(left[i], left[k]))]
            right[i] = [norm(i, j, x - c * y) for j, (x, y) in enumerate(zip(right[i], right[k]))]

    inv = EndoMatrix(sysm, mods, mods, tuple(tuple(r) for r in right))
    if not ((a @ inv).is_identity() and (inv @ a).is_identity()):
        raise NotInvertible("elimination did not produce a two-sided inverse")
    return inv


def d_factor(system: HomSystem, modules: Sequence[int], i: int, phi) -> EndoMatrix:
    """d_i(phi): identity with phi in diagonal slot i."""
    vals = [system.one(m) for m in modules]
    vals[i] = phi
    return EndoMatrix.diag(system, modules, vals)


def e_factor(system: HomSystem, modules: Sequence[int], i: int, j: int, mu) -> EndoMatrix:
    """e_ij(mu): identity with mu in off-diagonal slot (i, j)."""
    if i == j:
        raise ValueError("e_ij needs i != j")
    ident = EndoMatrix.identity(system, modules)
    rows = [list(r) for r in ident.entries]
    if not isinstance(mu, TruncatedSeries):
        mu = TruncatedSeries.constant(system.field, mu, system.precision)
    rows[i][j] = mu
    return EndoMatrix(system, ident.rows, ident.cols, tuple(tuple(r) for r in rows))
