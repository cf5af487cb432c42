"""Reference computations that share no code with the package."""
from itertools import combinations, permutations, product
from math import gcd


def perm_sign(p):
    sign = 1
    p = list(p)
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            sign = -sign
    return sign


def leibniz_det(rows):
    n = len(rows)
    total = 0
    for p in permutations(range(n)):
        term = perm_sign(p)
        for i in range(n):
            term *= rows[i][p[i]]
            if not term:
                break
        total += term
    return total


def cofactor_det(rows):
    n = len(rows)
    if n == 1:
        return rows[0][0]
    return sum(
        (-1) ** j * rows[0][j] * cofactor_det([r[:j] + r[j + 1:] for r in rows[1:]])
        for j in range(n)
        if rows[0][j]
    )


def cokernel_by_minors(rows):
    """(free rank, torsion) of Z^m / im(A) from gcds of k x k minors."""
    m, n = len(rows), len(rows[0])
    divs = []
    for k in range(1, min(m, n) + 1):
        g = 0
        for rs in combinations(range(m), k):
            for cs in combinations(range(n), k):
                g = gcd(g, cofactor_det([[rows[i][j] for j in cs] for i in rs]))
        if g == 0:
            break
        divs.append(g)
    factors = [d // p for d, p in zip(divs, [1] + divs[:-1])]
    return m - len(divs), tuple(f for f in factors if f > 1)


def naive_column_cokernel(col):
    """Z^m / Z v for a single column v: Euclid on the entries leaves gcd e_1."""
    v = [abs(x) for x in col if x]
    while len(v) > 1:
        v.sort()
        v = [v[0]] + [x % v[0] for x in v[1:] if x % v[0]]
    if not v:
        return len(col), ()
    g = v[0]
    return len(col) - 1, ((g,) if g > 1 else ())


def matmul_mod(a, b, p):
    n, k, m = len(a), len(b), len(b[0])
    return [[sum(a[i][t] * b[t][j] for t in range(k)) % p for j in range(m)] for i in range(n)]


def all_matrices(n, p):
    for flat in product(range(p), repeat=n * n):
        yield [list(flat[i * n:(i + 1) * n]) for i in range(n)]


def gl_order(n, p):
    out = 1
    for i in range(n):
        out *= p**n - p**i
    return out


def closure(gens, mul, identity):
    """Naive fixpoint: multiply everything by everything until nothing new."""
    elems = {identity} | set(gens)
    while True:
        new = {mul(x, y) for x in elems for y in elems} - elems
        if not new:
            return elems
        elems |= new
