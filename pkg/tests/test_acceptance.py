"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run with pytest, or directly as `python3 tests/test_acceptance.py`.
"""
import random
import sys
import time
from contextlib import contextmanager
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from cmktheory import k1
from cmktheory.arquiver import ADE_TYPES, E6_HYPERSURFACE, build_upsilon, dynkin_upsilon
from cmktheory.cli import main as cli_main
from cmktheory.intlinalg import IntegerMatrix, cokernel, is_injective
from cmktheory.rings import Cusp, DualNumbers, EndoMatrix, Field, Support, TruncatedSeries
from cmktheory.semilocal import parse_ring_name, vaserstein_check
from oracles import cofactor_det, cokernel_by_minors, naive_column_cokernel

DATA = Path(__file__).resolve().parent.parent / "data"

E6_EXPECTED = [
    [0, 0, 0, 0, 0, -1],
    [2, -1, 0, 0, 0, 0],
    [-1, 2, -1, 0, 0, 0],
    [0, -1, 2, -1, 0, -1],
    [0, 0, -1, 2, -1, 0],
    [0, 0, 0, -1, 2, 0],
    [0, 0, -1, 0, 0, 2],
]

_emit = print


@contextmanager
def criterion(n: int, title: str):
    """Run the body, print one PASS/FAIL line, re-raise on failure."""
    t0 = time.perf_counter()
    try:
        yield
    except Exception as exc:
        _emit(f"FAIL criterion {n}: {title} ({time.perf_counter() - t0:.2f}s) -- {exc}")
        raise
    _emit(f"PASS criterion {n}: {title} ({time.perf_counter() - t0:.2f}s)")


@pytest.fixture(autouse=True)
def _visible_lines(capsys):
    global _emit

    def emit(line):
        with capsys.disabled():
            print("\n" + line)

    _emit = emit
    yield
    _emit = print


def _check(cond, msg):
    if not cond:
        raise AssertionError(msg)


def _elapsed_under(t0, limit):
    dt = time.perf_counter() - t0
    _check(dt < limit, f"took {dt:.2f}s, limit {limit}s")


def test_criterion_1_upsilon_reproduction():
    with criterion(1, "E6 AR matrix equals the expected 7x6 matrix and is injective, < 1 s"):
        t0 = time.perf_counter()
        ups = build_upsilon(E6_HYPERSURFACE)
        _check(ups == IntegerMatrix.from_rows(E6_EXPECTED), "matrix differs")
        _check(is_injective(ups), "not injective")
        _elapsed_under(t0, 1.0)


def test_criterion_2_k0_sanity():
    with criterion(2, "column cokernels free of rank 1; E6 cokernel matches the minors oracle"):
        for col in ([-1, 2], [-1, 1]):
            g = cokernel(IntegerMatrix.column(col))
            _check((g.free_rank, g.torsion) == (1, ()), f"coker {col} = {g}")
            _check((g.free_rank, g.torsion) == naive_column_cokernel(col), f"oracle disagrees on {col}")
        g = cokernel(IntegerMatrix.from_rows(E6_EXPECTED))
        _check((g.free_rank, g.torsion) == cokernel_by_minors(E6_EXPECTED), f"E6 cokernel {g}")


# Dynkin graphs written out by hand, independent of the package tables.
STANDARD_EDGES = {
    ("A", 1): [],
    ("A", 2): [(1, 2)],
    ("A", 3): [(1, 2), (2, 3)],
    ("A", 4): [(1, 2), (2, 3), (3, 4)],
    ("D", 4): [(1, 2), (2, 3), (2, 4)],
    ("D", 5): [(1, 2), (2, 3), (3, 4), (3, 5)],
    ("E", 6): [(1, 2), (2, 3), (3, 4), (4, 5), (3, 6)],
    ("E", 7): [(1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (3, 7)],
    ("E", 8): [(1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (3, 8)],
}
EXPECTED_DET = {("A", 1): 2, ("A", 2): 3, ("A", 3): 4, ("A", 4): 5, ("D", 4): 4, ("D", 5): 4,
                ("E", 6): 3, ("E", 7): 2, ("E", 8): 1}


def test_criterion_3_ade_injectivity():
    with criterion(3, "ADE Upsilon injective, lower block Cartan with the standard determinants, < 1 s"):
        t0 = time.perf_counter()
        for kind, n in ADE_TYPES:
            ups = dynkin_upsilon(kind, n)
            _check(is_injective(ups), f"{kind}{n} not injective")
            cartan = [[2 * (i == j) for j in range(n)] for i in range(n)]
            for a, b in STANDARD_EDGES[kind, n]:
                cartan[a - 1][b - 1] = cartan[b - 1][a - 1] = -1
            lower = [list(ups.entries[i]) for i in range(1, n + 1)]
            _check(lower == cartan, f"{kind}{n} lower block")
            _check(cofactor_det(lower) == EXPECTED_DET[kind, n], f"{kind}{n} determinant")
        _elapsed_under(t0, 1.0)


@pytest.mark.parametrize("p", [5, 7])
def test_criterion_4_dual_numbers(p):
    with criterion(4, f"dual numbers over F{p}: omega(xi_a) = (a^-1, a), mu(a+bX) = a^2, < 1 s"):
        t0 = time.perf_counter()
        f = Field(p)
        system = DualNumbers(f)
        report = k1.k1_compute(system)
        _check(report.ok, f"report failures: {report.failures[:3]}")
        _check(report.group == "k*", report.group)
        for a in f.units():
            xi = k1.xi_generator(system, TruncatedSeries.constant(f, a, 2, Support.SEMIGROUP))
            _check(k1.omega(xi) == (f.inv(a), a), f"omega(xi_{a}) = {k1.omega(xi)}")
        units = k1.enumerate_units(system, Support.FULL)
        _check(len(units) == p * (p - 1), "not every unit enumerated")
        for r in units:
            _check(k1.mu(system, r) == r.c0 * r.c0 % p, f"mu({r.format('X')})")
        squares = {a * a % p for a in f.units()}
        _check({k1.mu(system, r) for r in units} == squares, "image of mu is not the squares")
        _elapsed_under(t0, 1.0)


def test_criterion_5_cusp():
    with criterion(5, "cusp over F5, N=8, 100 seeded units: lift, closed-form beta^-1, xi formula, "
                      "omega(xi_h) = (h(0), 1), mu inclusion, < 5 s"):
        t0 = time.perf_counter()
        f5 = Field(5)
        system = Cusp(f5, 8)
        rng = random.Random(0)
        one = TruncatedSeries.constant(f5, 1, 8)
        omega_mismatch = []
        for _ in range(100):
            h = k1.random_series(rng, system, Support.FULL, True)
            beta, gamma = k1.ar_lift(system, h)
            _check(k1.check_lift(system, k1.automorphism_of_m(system, h), beta, gamma), "lift")
            _check((beta @ k1.beta_inverse_closed_form(system, h)).is_identity(), "beta beta^-1")
            xi = k1.xi_generator(system, h)
            _check(xi == k1.xi_closed_form(system, h), "xi formula")
            w = k1.omega(xi)
            if w != (h.c0, one):
                omega_mismatch.append((h.format(), w[0]))
            r = k1.random_series(rng, system, Support.SEMIGROUP, True)
            _check(k1.mu(system, r) == r.retag(Support.FULL), "mu is not the inclusion")
        _elapsed_under(t0, 5.0)
        _check(not omega_mismatch,
               f"omega(xi_h) != (h(0), 1) for {len(omega_mismatch)}/100 samples; "
               f"e.g. h = {omega_mismatch[0][0] if omega_mismatch else ''} gives residue "
               f"{omega_mismatch[0][1] if omega_mismatch else ''} = h(0)^-1")


def test_criterion_6_factorizations():
    with criterion(6, "Whitehead and elementary factorizations re-multiply; e_ij pass the commutator check, < 5 s"):
        t0 = time.perf_counter()
        rng = random.Random(0)
        mods = (0, 1)
        for system in (DualNumbers(Field(5)), Cusp(Field(5), 8)):
            for _ in range(100):
                r = k1.random_series(rng, system, system.support(0, 0), True)
                r = r * system.field.inv(r.c0)
                fs = k1.whitehead_factorization(system, r)
                _check(fs[0] @ fs[1] @ fs[2] @ fs[3] == EndoMatrix.diag(system, mods, [r, r.inverse()]), "Whitehead")
                for e in fs:
                    slot = k1.elementary_slot(e)
                    _check(slot is None or k1.commutator_identity_check(system, mods, *slot), "commutator")
                a = k1.random_automorphism(rng, system)
                word = k1.elementary_factorization(a)
                _check(k1.word_product(word, system, mods) == a, "elementary word")
                for w in word:
                    if w.kind == "e":
                        _check(k1.commutator_identity_check(system, mods, w.i, w.j, w.entry), "commutator")
        _elapsed_under(t0, 5.0)


def test_criterion_7_delta_homomorphism():
    with criterion(7, "delta(ab) = delta(a) delta(b) on 500 pairs per family; surjectivity witness"):
        rng = random.Random(0)
        for system in (DualNumbers(Field(5)), Cusp(Field(5), 8)):
            fld = system.field
            for _ in range(500):
                a, b = k1.random_automorphism(rng, system), k1.random_automorphism(rng, system)
                (ra, da), (rb, db) = k1.delta(a), k1.delta(b)
                _check(k1.delta(a @ b) == (fld(ra * rb), system.normalize(1, 1, da * db)), "delta(ab)")
                r = rng.randrange(1, fld.p)
                phi = system.normalize(1, 1, k1.random_series(rng, system, system.support(1, 1), True))
                w = EndoMatrix.diag(system, (0, 1), [r, phi * fld.inv(r)])
                _check(k1.delta(w) == (r, phi), "surjectivity witness")


def test_criterion_8_semilocal():
    with criterion(8, "M2(F2) strict 6 vs 3; M2(F3), M3(F2), F5, M2(F5) equal, < 30 s total"):
        t0 = time.perf_counter()
        res = vaserstein_check(parse_ring_name("M2F2"))
        _check((res.verdict, res.ker_theta, res.commutators) == ("strict", 6, 3), res.summary())
        for name in ("M2F3", "M3F2", "F5", "M2F5"):
            res = vaserstein_check(parse_ring_name(name))
            _check(res.verdict == "equal", f"{name}: {res.summary()}")
        _elapsed_under(t0, 30.0)


def test_criterion_9_mu_through_residue():
    with criterion(9, "dual-numbers mu(r) = pi(r)^2 for every unit over F5 and F7"):
        for p in (5, 7):
            system = DualNumbers(Field(p))
            for r in k1.enumerate_units(system, Support.FULL):
                _check(k1.mu(system, r) == pow(r.c0, 2, p), f"F{p}: {r.format('X')}")


def test_criterion_10_determinism(capsys):
    with criterion(10, "reports byte-identical across two runs with the same seed"):
        jobs = [
            ["k0", str(DATA / "e6_example.ar")],
            ["dynkin", "E8", "--format", "structured"],
            ["k1", "--family", "dual", "--p", "7"],
            ["k1", "--family", "cusp", "--p", "5", "--seed", "17"],
            ["k1", "--family", "cusp", "--field", "Q", "--samples", "10", "--format", "structured"],
            ["semilocal", "--ring", "M2F2"],
            ["verify", "--seed", "2"],
        ]
        for argv in jobs:
            outs = []
            for _ in range(2):
                code = cli_main(argv)
                outs.append((code, capsys.readouterr().out))
            _check(outs[0] == outs[1], f"{' '.join(argv)} differs between runs")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
