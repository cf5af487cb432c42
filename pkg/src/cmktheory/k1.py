"""K1(mod R) = Aut_R(M)_ab / Xi for the dual numbers and the cusp.

Throughout, M = R + m (module 0 = R, module 1 = m), which is square-free, so
every tilde matrix is 1x1 over E = End(M) and det_E is the identity. The
quotient group is never built; classes are reported through the explicit
isomorphisms delta, omega and the final identification with k* (dual) or
the truncated unit group of k[[T]] (cusp).
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import product
from typing import Sequence

from .arquiver import CUSP, DUAL_NUMBERS, ARPresentation, build_upsilon
from .intlinalg import is_injective
from .rings import (
    Cusp,
    DualNumbers,
    EndoMatrix,
    FieldElem,
    HomMatrix,
    HomSystem,
    NotInvertible,
    Support,
    TruncatedSeries,
    d_factor,
    e_factor,
    endo_matrix_inv,
    series_inv,
)

EXHAUSTIVE_LIMIT = 10**4
R, MI = 0, 1  # module indices


class InternalConsistencyError(RuntimeError):
    """A closed-form identity failed to re-verify; signals an engine bug."""


class UnsupportedFamily(ValueError):
    pass


# ---------------------------------------------------------------------------
# Tilde construction


@dataclass(frozen=True)
class Decomposition:
    """X = sum M_i^{n_i} against the generator M = sum M_i^{m_i} (all m_i >= 1)."""

    n: tuple[int, ...]
    m: tuple[int, ...]

    def __post_init__(self):
        if len(self.n) != len(self.m):
            raise ValueError("multiplicity vectors differ in length")
        if any(x < 0 for x in self.n):
            raise ValueError("negative multiplicity")
        if any(x < 1 for x in self.m):
            raise ValueError("a representation generator contains every indecomposable")

    @property
    def q(self) -> int:
        p = 1
        while any(p * mj < nj for mj, nj in zip(self.m, self.n)):
            p += 1
        return p

    @property
    def v(self) -> tuple[int, ...]:
        q = self.q
        return tuple(q * mj - nj for mj, nj in zip(self.m, self.n))

    def x_modules(self) -> tuple[int, ...]:
        return tuple(j for j, nj in enumerate(self.n) for _ in range(nj))

    def generator_modules(self) -> tuple[int, ...]:
        return tuple(j for j, mj in enumerate(self.m) for _ in range(mj))

    def psi(self) -> list[int]:
        """Position in M^q of each slot of X + Y (X slots first, then Y)."""
        width = sum(self.m)
        offset = [sum(self.m[:j]) for j in range(len(self.m))]
        q, v = self.q, self.v
        slots = [(j, c) for j, nj in enumerate(self.n) for c in range(nj)]
        slots += [(j, self.n[j] + c) for j, vj in enumerate(v) for c in range(vj)]
        return [(k // self.m[j]) * width + offset[j] + k % self.m[j] for j, k in slots]


def tilde(x: Decomposition, alpha: EndoMatrix) -> tuple[int, EndoMatrix]:
    """Conjugate alpha + 1_Y into Aut(M^q) along psi; returns (q, matrix on M^q).

    The result is indexed by the slots of M^q; block (a, b) of size |M| is
    the (a, b) entry of the q x q matrix over E.
    """
    if alpha.modules != x.x_modules():
        raise ValueError(f"alpha acts on {alpha.modules}, decomposition needs {x.x_modules()}")
    if len(set(alpha.modules)) == alpha.size:
        if not alpha.diagonal_units():
            raise NotInvertible("alpha has a non-unit diagonal entry")
    else:
        endo_matrix_inv(alpha)
    system = alpha.system
    q = x.q
    y_modules = tuple(j for j, vj in enumerate(x.v) for _ in range(vj))
    src = alpha.modules + y_modules
    target = x.generator_modules() * q
    psi = x.psi()
    nx = alpha.size
    rows = [list(r) for r in EndoMatrix.identity(system, target).entries]
    for a in range(len(src)):
        for b in range(len(src)):
            if a < nx and b < nx:
                val = alpha[a, b]
            elif a == b:
                val = system.one(src[a])
            else:
                val = system.zero(src[a], src[b])
            rows[psi[a]][psi[b]] = val
    return q, EndoMatrix(system, target, target, tuple(tuple(r) for r in rows))


def blocks(result: EndoMatrix, q: int) -> list[list[EndoMatrix]]:
    """View a matrix on M^q as a q x q matrix with entries in E = End(M)."""
    w = result.size // q
    mods = result.modules[:w]
    return [
        [
            EndoMatrix(
                result.system,
                mods,
                mods,
                tuple(tuple(result[a * w + i, b * w + j] for j in range(w)) for i in range(w)),
            )
            for b in range(q)
        ]
        for a in range(q)
    ]


def det_E(result: EndoMatrix, q: int) -> EndoMatrix:
    if q != 1:
        # a q x q generalized determinant over the non-commutative E is not needed here
        raise NotImplementedError("det_E only implemented for 1x1 matrices over E")
    return blocks(result, 1)[0][0]


# ---------------------------------------------------------------------------
# Families: AR data and closed-form lifts


def family_system(family: str, field, precision: int = 8) -> HomSystem:
    if family == "dual":
        return DualNumbers(field)
    if family == "cusp":
        return Cusp(field, precision)
    raise UnsupportedFamily(f"unsupported family {family!r}; use 'dual' or 'cusp'")


def presentation(system: HomSystem) -> ARPresentation:
    if isinstance(system, DualNumbers):
        return DUAL_NUMBERS
    if isinstance(system, Cusp):
        return CUSP
    raise UnsupportedFamily(f"no AR data for {system!r}")


GENERATOR = Decomposition((1, 1), (1, 1))  # M = R + m


def ar_sequence(system: HomSystem) -> tuple[HomMatrix, HomMatrix]:
    """The two maps of 0 -> m -> X_1 -> m -> 0."""
    f, n = system.field, system.precision
    T = TruncatedSeries.monomial(f, 1, n)
    if isinstance(system, DualNumbers):
        first = HomMatrix.build(system, (R,), (MI,), [[1]])  # inclusion
        second = HomMatrix.build(system, (MI,), (R,), [[T]])  # multiplication by X
    elif isinstance(system, Cusp):
        first = HomMatrix.build(system, (R, MI), (MI,), [[1], [-T]])
        second = HomMatrix.build(system, (MI,), (R, MI), [[T * T, T]])
    else:
        raise UnsupportedFamily(f"no AR sequence for {system!r}")
    return first, second


def middle_modules(system: HomSystem) -> tuple[int, ...]:
    return ar_sequence(system)[0].rows


def split_unit(h: TruncatedSeries) -> tuple[TruncatedSeries, TruncatedSeries]:
    """h = f + g T with f, g in k[[T^2]] (even and odd parts)."""
    n, fld = h.precision, h.field
    even = [c if i % 2 == 0 else 0 for i, c in enumerate(h.coeffs)]
    odd = [h.coeffs[i + 1] if i % 2 == 0 and i + 1 < n else 0 for i in range(n)]
    return (
        TruncatedSeries.of(fld, even, n, Support.SEMIGROUP),
        TruncatedSeries.of(fld, odd, n, Support.SEMIGROUP),
    )


def automorphism_of_m(system: HomSystem, h) -> EndoMatrix:
    return EndoMatrix.of(system, (MI,), [[h]])


def check_lift(system: HomSystem, alpha: EndoMatrix, beta: EndoMatrix, gamma: EndoMatrix) -> bool:
    first, second = ar_sequence(system)
    return first @ gamma == beta @ first and second @ beta == alpha @ second


def ar_lift(system: HomSystem, h: TruncatedSeries) -> tuple[EndoMatrix, EndoMatrix]:
    """(beta, gamma) over alpha = h 1_m making both squares commute."""
    if not h.is_unit():
        raise NotInvertible(f"{h.format(system.var)} is not an automorphism of m")
    alpha = automorphism_of_m(system, h)
    if isinstance(system, DualNumbers):
        a = alpha[0, 0]
        beta = EndoMatrix.of(system, (R,), [[a]])
        gamma = EndoMatrix.of(system, (MI,), [[a]])
    elif isinstance(system, Cusp):
        T = TruncatedSeries.monomial(system.field, 1, system.precision)
        f, g = split_unit(h)
        beta = EndoMatrix.of(system, (R, MI), [[f, g], [g * T * T, f]])
        gamma = EndoMatrix.of(system, (MI,), [[f - g * T]])
    else:
        raise UnsupportedFamily(f"no lift for {system!r}")
    if not check_lift(system, alpha, beta, gamma):
        raise InternalConsistencyError(f"lift of {h.format(system.var)} does not commute")
    return beta, gamma


def _tilde_E(system: HomSystem, mods: tuple[int, ...], a: EndoMatrix) -> EndoMatrix:
    n = tuple(mods.count(j) for j in range(2))
    q, res = tilde(Decomposition(n, GENERATOR.m), a)
    return det_E(res, q)


def xi_generator(system: HomSystem, h: TruncatedSeries, lift=None) -> EndoMatrix:
    """xi = det(alpha~) det(beta~)^{-1} det(gamma~) in E* for alpha = h 1_m."""
    beta, gamma = lift if lift is not None else ar_lift(system, h)
    alpha = automorphism_of_m(system, h)
    if not check_lift(system, alpha, beta, gamma):
        raise InternalConsistencyError("supplied lift does not commute")
    at = _tilde_E(system, alpha.modules, alpha)
    bt = _tilde_E(system, beta.modules, beta)
    gt = _tilde_E(system, gamma.modules, gamma)
    return at @ endo_matrix_inv(bt) @ gt


def xi_closed_form(system: HomSystem, h: TruncatedSeries) -> EndoMatrix:
    """Closed-form generators: diag(a^-1, a^2) and (f^2-g^2T^2)^-1 [[...]]."""
    if isinstance(system, DualNumbers):
        a = system.field(h.c0)
        ainv = system.field.inv(a)
        return EndoMatrix.diag(system, (R, MI), [ainv, a * a])
    if isinstance(system, Cusp):
        T = TruncatedSeries.monomial(system.field, 1, system.precision)
        f, g = split_unit(h)
        D = f * f - g * g * T * T
        return EndoMatrix.of(
            system,
            (R, MI),
            [[f, -g * (f - g * T)], [-g * T * T * (f + g * T), f * D]],
        ).scale(series_inv(D))
    raise UnsupportedFamily(repr(system))


def beta_inverse_closed_form(system: Cusp, h: TruncatedSeries) -> EndoMatrix:
    T = TruncatedSeries.monomial(system.field, 1, system.precision)
    f, g = split_unit(h)
    D = f * f - g * g * T * T
    return EndoMatrix.of(system, (R, MI), [[f, -g], [-g * T * T, f]]).scale(series_inv(D))


# ---------------------------------------------------------------------------
# delta, omega and the lambda map


def delta(a: EndoMatrix) -> tuple[FieldElem, TruncatedSeries]:
    """([a11(1)]_m, a11 a22 - a21 a12) for an automorphism of R + m."""
    if a.modules != (R, MI):
        raise ValueError("delta is defined on Aut(R + m)")
    if not a.diagonal_units():
        raise NotInvertible("diagonal entries must be units")
    system = a.system
    det = system.normalize(MI, MI, a[0, 0] * a[1, 1] - a[1, 0] * a[0, 1])
    return a[0, 0].c0, det


def chi_inverse(system: HomSystem, phi: TruncatedSeries):
    """End(m) back to k (dual) or k[[T]] (cusp)."""
    if isinstance(system, DualNumbers):
        return phi.c0
    return phi.retag(Support.FULL)


def omega(a: EndoMatrix):
    res, det = delta(a)
    return res, chi_inverse(a.system, det)


def k1_class(a: EndoMatrix):
    """Image of a in K1(mod R): k* via (b, a) -> ba for the dual numbers,
    k[[T]]* via projection onto the second factor for the cusp."""
    res, val = omega(a)
    if isinstance(a.system, DualNumbers):
        return a.system.field(res * val)
    return val


def lambda_matrix(system: HomSystem, r: TruncatedSeries) -> EndoMatrix:
    return EndoMatrix.diag(system, (R, MI), [r, system.one(MI)])


def mu(system: HomSystem, r: TruncatedSeries):
    return k1_class(lambda_matrix(system, r))


def mu_closed_form(system: HomSystem, r: TruncatedSeries):
    if isinstance(system, DualNumbers):
        return system.field(r.c0 * r.c0)
    return r.retag(Support.FULL)


def omega_xi_closed_form(system: HomSystem, h: TruncatedSeries):
    """omega(xi) as computed exactly from the generator formula.

    Both families give a residue of h(0)^{-1}: the (1,1) entry of xi is
    a^{-1} resp. f / (f^2 - g^2 T^2).
    """
    a_inv = system.field.inv(h.c0)
    if isinstance(system, DualNumbers):
        return a_inv, system.field(h.c0)
    return a_inv, TruncatedSeries.constant(system.field, 1, system.precision)


# ---------------------------------------------------------------------------
# Factorizations


def whitehead_factorization(system: HomSystem, r: TruncatedSeries) -> list[EndoMatrix]:
    """Four elementary factors whose product is diag(r 1_R, r^-1 1_m), r in 1 + m."""
    if r.coeffs[0] != 1 or not system.support(R, R).allows(r.coeffs):
        raise ValueError(f"{r.format(system.var)} is not in 1 + m")
    mods = (R, MI)
    rinv = series_inv(r)
    one = TruncatedSeries.constant(system.field, 1, system.precision)
    return [
        e_factor(system, mods, 1, 0, rinv - one),
        e_factor(system, mods, 0, 1, one),
        e_factor(system, mods, 1, 0, r - one),
        e_factor(system, mods, 0, 1, -rinv),
    ]


@dataclass(frozen=True)
class Elementary:
    kind: str  # "d" or "e"
    i: int
    j: int
    entry: TruncatedSeries

    def matrix(self, system: HomSystem, modules: Sequence[int]) -> EndoMatrix:
        if self.kind == "d":
            return d_factor(system, modules, self.i, self.entry)
        return e_factor(system, modules, self.i, self.j, self.entry)

    def __str__(self):
        if self.kind == "d":
            return f"d{self.i + 1}({self.entry.format()})"
        return f"e{self.i + 1}{self.j + 1}({self.entry.format()})"


def word_product(word: Sequence[Elementary], system: HomSystem, modules: Sequence[int]) -> EndoMatrix:
    out = EndoMatrix.identity(system, modules)
    for w in word:
        out = out @ w.matrix(system, modules)
    return out


def elementary_factorization(a: EndoMatrix) -> list[Elementary]:
    """Word in d_i(.) and e_ij(.) multiplying to a.

    Column k is cleared from the left and row k from the right, leaving
    d_k(a_kk) times a block for the remaining slots:
    a = d_k(a_kk) [prod_i e_ik(a_ik)] diag(1, rest) [prod_j e_kj(a_kk^-1 a_kj)].
    Trivial factors are omitted, so the identity has the empty word.
    """
    system, mods, n = a.system, a.modules, a.size
    w = [list(r) for r in a.entries]
    head: list[Elementary] = []
    tails: list[list[Elementary]] = []
    for k in range(n):
        p = w[k][k]
        if not p.is_unit():
            raise NotInvertible(f"diagonal entry {k} is not a unit")
        pinv = series_inv(p)
        if p != system.one(mods[k]):
            head.append(Elementary("d", k, k, p))
        head.extend(Elementary("e", i, k, w[i][k]) for i in range(k + 1, n) if not w[i][k].is_zero())
        tail = []
        for j in range(k + 1, n):
            c = system.normalize(mods[k], mods[j], pinv * w[k][j])
            if not c.is_zero():
                tail.append(Elementary("e", k, j, c))
        tails.append(tail)
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                w[i][j] = system.normalize(mods[i], mods[j], w[i][j] - w[i][k] * pinv * w[k][j])
    word = head
    for tail in reversed(tails):
        word.extend(tail)
    if word_product(word, system, mods) != a:
        raise InternalConsistencyError("elementary word does not reproduce its input")
    return word


def commutator_identity_check(system: HomSystem, modules: Sequence[int], i: int, j: int, mu_) -> bool:
    """e_ij(mu) == [e_ij(mu/2), d_j(-1)] by exact multiplication."""
    half = system.field.inv(2)
    e = e_factor(system, modules, i, j, mu_)
    x = e_factor(system, modules, i, j, mu_ * half)
    d = d_factor(system, modules, j, -system.one(modules[j]))
    comm = x @ d @ endo_matrix_inv(x) @ endo_matrix_inv(d)
    return comm == e


# ---------------------------------------------------------------------------
# Sampling and the report


def random_series(rng: random.Random, system: HomSystem, support: Support, unit: bool) -> TruncatedSeries:
    f, n = system.field, system.precision
    allowed = support.exponents(n)

    def draw(nonzero=False):
        if f.p is not None:
            return rng.randrange(1, f.p) if nonzero else rng.randrange(f.p)
        while True:
            x = f(rng.randint(-9, 9)) / rng.randint(1, 9)
            if x or not nonzero:
                return x

    coeffs = [draw(nonzero=(i == 0 and unit)) if i in allowed else 0 for i in range(n)]
    return TruncatedSeries.of(f, coeffs, n, support)


def random_automorphism(rng: random.Random, system: HomSystem, modules: Sequence[int] = (R, MI)) -> EndoMatrix:
    """Entries drawn with the support each Hom allows; unit diagonal, so invertible."""
    n = len(modules)
    entries = [
        [random_series(rng, system, system.support(modules[i], modules[j]), unit=(i == j)) for j in range(n)]
        for i in range(n)
    ]
    return EndoMatrix.of(system, modules, entries)


def elementary_slot(e: EndoMatrix) -> tuple[int, int, TruncatedSeries] | None:
    """(i, j, mu) if e is e_ij(mu) for some i != j, else None."""
    off = [(i, j) for i in range(e.size) for j in range(e.size) if i != j and not e[i, j].is_zero()]
    if len(off) != 1 or any(e[i, i] != e.system.one(e.modules[i]) for i in range(e.size)):
        return None
    i, j = off[0]
    return i, j, e[i, j]


def enumerate_units(system: HomSystem, support: Support) -> list[TruncatedSeries] | None:
    """All units with the given support, or None if there are more than the limit."""
    f, n = system.field, system.precision
    if f.p is None:
        return None
    free = [i for i in support.exponents(n) if i > 0]
    if (f.p - 1) * f.p ** len(free) > EXHAUSTIVE_LIMIT:
        return None
    out = []
    for c0 in f.units():
        for rest in product(f.elements(), repeat=len(free)):
            c = [0] * n
            c[0] = c0
            for i, x in zip(free, rest):
                c[i] = x
            out.append(TruncatedSeries.of(f, c, n, support))
    return out


def sample_units(system: HomSystem, support: Support, n_samples: int, rng: random.Random):
    units = enumerate_units(system, support)
    if units is not None:
        return units, "exhaustive"
    return [random_series(rng, system, support, unit=True) for _ in range(n_samples)], "random"


@dataclass
class K1Report:
    family: str
    field: str
    precision: int
    seed: int
    group: str
    upsilon: list[int]
    injective: bool
    generator_sampling: str
    unit_sampling: str
    omega_of_xi: list[tuple[str, str]] = field(default_factory=list)
    lambda_table: list[tuple[str, str]] = field(default_factory=list)
    mu_image: list[str] | None = None
    mu_image_index: int | None = None
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def _fmt(system: HomSystem, x) -> str:
    if isinstance(x, TruncatedSeries):
        return x.format(system.var)
    if isinstance(x, tuple):
        return "(" + ", ".join(_fmt(system, y) for y in x) + ")"
    return system.field.format(x)


def k1_compute(system: HomSystem, n_samples: int = 100, seed: int = 0) -> K1Report:
    """Xi generators, omega(Xi) and the lambda/mu table, each entry checked twice.

    The engine path goes tilde -> inverse -> product -> delta; the check
    path evaluates the closed forms for xi, omega(xi) and mu directly.
    """
    rng = random.Random(seed)
    pres = presentation(system)
    ups = build_upsilon(pres)
    if isinstance(system, DualNumbers):
        group = "k*"
        gens = [TruncatedSeries.constant(system.field, a, 2, Support.SEMIGROUP) for a in system.field.units()] \
            if system.field.is_finite else [random_series(rng, system, Support.SEMIGROUP, True) for _ in range(n_samples)]
        gen_mode = "exhaustive" if system.field.is_finite else "random"
    else:
        group = f"k[[T]]* mod T^{system.precision}"
        gens, gen_mode = sample_units(system, Support.FULL, n_samples, rng)
    units, unit_mode = sample_units(system, system.support(R, R), n_samples, rng)

    report = K1Report(
        family=system.name,
        field=system.field.name,
        precision=system.precision,
        seed=seed,
        group=group,
        upsilon=[ups[i, 0] for i in range(ups.rows)],
        injective=is_injective(ups),
        generator_sampling=gen_mode,
        unit_sampling=unit_mode,
    )
    if not report.injective:
        report.failures.append("AR homomorphism is not injective")

    for h in gens:
        try:
            xi = xi_generator(system, h)
        except (NotInvertible, InternalConsistencyError) as exc:
            report.failures.append(f"xi({_fmt(system, h)}): {exc}")
            continue
        w = omega(xi)
        if xi != xi_closed_form(system, h):
            report.failures.append(f"xi({_fmt(system, h)}) differs from the closed form")
        if w != omega_xi_closed_form(system, h):
            report.failures.append(f"omega(xi({_fmt(system, h)})) = {_fmt(system, w)} unexpected")
        if isinstance(system, DualNumbers) and system.field(w[0] * w[1]) != 1:
            report.failures.append(f"omega(xi({_fmt(system, h)})) not in the kernel of (b, a) -> ba")
        if isinstance(system, Cusp) and w[1] != TruncatedSeries.constant(system.field, 1, system.precision):
            report.failures.append(f"omega(xi({_fmt(system, h)})) has nontrivial k[[T]] part")
        report.omega_of_xi.append((_fmt(system, h), _fmt(system, w)))

    image = set()
    for r in units:
        val = mu(system, r)
        if val != mu_closed_form(system, r):
            report.failures.append(f"mu({_fmt(system, r)}) = {_fmt(system, val)} differs from the closed form")
        image.add(val)
        report.lambda_table.append((_fmt(system, r), _fmt(system, val)))

    if isinstance(system, DualNumbers) and unit_mode == "exhaustive":
        report.mu_image = [system.field.format(x) for x in sorted(image)]
        report.mu_image_index = (system.field.p - 1) // len(image)
    return report
