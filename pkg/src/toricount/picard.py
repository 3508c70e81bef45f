"""Piecewise-linear functions, the Picard lattice, and cyclic cohomology.

The Picard group over the splitting field is realized as the quotient of
the value lattice Z^n (one coordinate per ray) by the dual lattice M,
embedded via m -> (<m, e_j>)_j.  Smith normal form certifies the quotient
is torsion free; that is asserted, not assumed.  H^1 of cyclic actions is
computed from the 2-periodic resolution, with an independent cocycle
route used as a cross-check oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .fan import MultiplicativeVector, galois_group, galois_orbits, locate_cone, ray_permutation
from .linalg import (
    det,
    identity,
    invariant_factors,
    kernel_basis,
    mat_mul,
    mat_vec,
    quotient_map,
    rank,
    solve_exact,
    transpose,
    unimodular_inverse,
)


@dataclass(frozen=True)
class PLFunction:
    """A piecewise linear function given by its values at the rays."""

    values: tuple

    def __init__(self, values):
        object.__setattr__(self, "values", tuple(values))

    def __add__(self, other):
        return PLFunction(tuple(a + b for a, b in zip(self.values, other.values)))

    def is_integral(self):
        return all(isinstance(v, int) or (isinstance(v, Fraction) and v.denominator == 1) for v in self.values)


def anticanonical(fan):
    """The PL function with value 1 at every ray; its class is -K."""
    return PLFunction((1,) * fan.nrays)


def is_galois_invariant(fan, phi):
    """True if phi is constant on each ray orbit of the Galois action."""
    for orb in galois_orbits(fan).orbits:
        if len({phi.values[j] for j in orb}) != 1:
            return False
    return True


def from_character(fan, m):
    """The (globally linear) PL function j -> <m, e_j> of a lattice vector m."""
    return PLFunction(tuple(sum(mi * ei for mi, ei in zip(m, r)) for r in fan.rays))


@lru_cache(maxsize=None)
def _cone_linear_form(fan, cone_idx, values):
    """The unique m with <m, e_j> = values[j] on the rays of a maximal cone."""
    idxs = fan.max_cones[cone_idx]
    a = [list(fan.rays[j]) for j in idxs]
    return tuple(solve_exact(a, [values[j] for j in idxs]))


def pl_evaluate(fan, phi, v):
    """Evaluate phi at v in exact arithmetic.

    For an additive rational vector v the value <m_sigma, v> is returned.
    For a MultiplicativeVector with entries q_i (the point log q) the
    multiplicative value prod q_i^{m_i} = exp(phi(log q)) is returned
    instead, again as an exact rational.
    """
    ci = locate_cone(fan, v)
    m = _cone_linear_form(fan, ci, tuple(phi.values))
    if isinstance(v, MultiplicativeVector):
        out = Fraction(1)
        for mi, q in zip(m, v.qs):
            if mi:
                if mi.denominator != 1:
                    raise ValueError("multiplicative evaluation needs integer slopes")
                out *= q ** int(mi)
        return out
    return sum(mi * Fraction(x) for mi, x in zip(m, v))


@dataclass(frozen=True)
class PicardData:
    """Ranks, quotient data and cohomology of the Picard lattice."""

    rank_split: int
    rank_K: int
    t: int
    r: int
    eff_generators: tuple  # classes of the orbit-sum divisors, in Pic over E
    anticanonical_class: tuple
    h1_GM: tuple  # invariant factors of H^1(G, M)
    h1_GPic: tuple  # invariant factors of H^1(G, Pic)
    projection: tuple  # Z^n -> Pic (rows)

    @property
    def h(self):
        out = 1
        for f in self.h1_GM:
            out *= f
        return out

    @property
    def beta(self):
        out = 1
        for f in self.h1_GPic:
            out *= f
        return out


def _embedding_columns(fan):
    """Columns spanning the image of M -> Z^n, m -> (<m, e_j>)_j."""
    d = fan.dim
    return [[fan.rays[j][i] for j in range(fan.nrays)] for i in range(d)]


@lru_cache(maxsize=None)
def picard_quotient(fan):
    """(project, lift) for Pic = Z^n / M over the splitting field.

    Smith normal form certifies the quotient is torsion free (true for
    smooth complete fans); a torsion quotient raises.
    """
    project, lift, torsion = quotient_map(_embedding_columns(fan), fan.nrays)
    if torsion:
        raise ValueError("Picard quotient has torsion %r; fan not smooth complete" % torsion)
    return tuple(tuple(row) for row in project), tuple(tuple(row) for row in lift)


def _dual_action(g):
    """Action on M induced by the action g on N (inverse transpose)."""
    return transpose(unimodular_inverse([list(row) for row in g]))


def _cyclic_generator(group):
    """A generator of a cyclic matrix group, or None if not cyclic."""
    order = len(group)
    d = len(group[0])
    ident = tuple(tuple(1 if i == j else 0 for j in range(d)) for i in range(d))
    for g in group:
        power = ident
        for k in range(1, order + 1):
            power = tuple(
                tuple(sum(power[i][t] * g[t][j] for t in range(d)) for j in range(d))
                for i in range(d)
            )
            if power == ident:
                if k == order:
                    return g
                break
    return None


def h1_cyclic(action, order):
    """Invariant factors of H^1(<g>, Z^m) = ker(Norm)/im(g - 1).

    `action` is the matrix of a generator g, `order` the order of the
    group (which may exceed the order of the matrix when the module is
    not faithful).
    """
    m = len(action)
    a = [list(row) for row in action]
    norm = [[0] * m for _ in range(m)]
    power = identity(m)
    for _ in range(order):
        for i in range(m):
            for j in range(m):
                norm[i][j] += power[i][j]
        power = mat_mul(power, a)
    if power != identity(m):
        raise ValueError("matrix order does not divide the given group order")
    ker = kernel_basis(norm)
    if not ker:
        return ()
    gm1 = [[a[i][j] - (1 if i == j else 0) for j in range(m)] for i in range(m)]
    # coordinates of the (g-1)-image inside the kernel lattice; integral
    # because im(g-1) <= ker(Norm) and the kernel basis is a lattice basis
    basis_cols = [[k[i] for k in ker] for i in range(m)]  # m x s
    coords = []
    for j in range(m):
        target = [gm1[i][j] for i in range(m)]
        coords.append(_solve_in_lattice(basis_cols, target))
    mat = [[coords[j][i] for j in range(m)] for i in range(len(ker))]
    if rank(mat) != len(ker):
        raise ValueError("H^1 is infinite; the action is not of finite order")
    return tuple(f for f in invariant_factors(mat) if f != 1)


def _solve_in_lattice(basis_cols, target):
    """Integral coordinates of target in the lattice spanned by basis columns."""
    rows = len(basis_cols)
    s = len(basis_cols[0])
    # least squares style exact solve via any s independent rows
    from itertools import combinations

    for sub in combinations(range(rows), s):
        a = [[basis_cols[i][j] for j in range(s)] for i in sub]
        if det(a) == 0:
            continue
        sol = solve_exact(a, [target[i] for i in sub])
        if all(x.denominator == 1 for x in sol) and all(
            sum(basis_cols[i][j] * sol[j] for j in range(s)) == target[i]
            for i in range(rows)
        ):
            return [int(x) for x in sol]
        break
    raise ValueError("vector not in lattice span")


def h1_cyclic_cocycle(action, order):
    """|H^1| by the bar-resolution route: crossed homs modulo principal ones.

    Materializes the whole cyclic group and solves the cocycle condition
    f(gh) = f(g) + g f(h) as one integer linear system; independent of the
    periodic-resolution formula, used as its oracle.
    """
    m = len(action)
    a = [list(row) for row in action]
    elements = [identity(m)]
    for _ in range(order - 1):
        elements.append(mat_mul(elements[-1], a))
    if mat_mul(elements[-1], a) != identity(m):
        raise ValueError("matrix order does not divide the given group order")
    index = {tuple(tuple(r) for r in g): i for i, g in enumerate(elements)}

    def elt_index(g):
        return index[tuple(tuple(r) for r in g)]

    # unknowns: f(g) for g != 1, stacked; f(1) = 0 is forced
    nunk = (order - 1) * m

    def unk(gi, coord):
        return (gi - 1) * m + coord  # gi >= 1

    rows = []
    for gi in range(order):
        for hi in range(order):
            prod = mat_mul(elements[gi], elements[hi])
            pi = elt_index(prod)
            for c in range(m):
                row = [0] * nunk
                if pi >= 1:
                    row[unk(pi, c)] += 1
                if gi >= 1:
                    row[unk(gi, c)] -= 1
                if hi >= 1:
                    for c2 in range(m):
                        row[unk(hi, c2)] -= elements[gi][c][c2]
                if any(row):
                    rows.append(row)
    z1 = kernel_basis(rows) if rows else [
        [1 if i == j else 0 for j in range(nunk)] for i in range(nunk)
    ]
    if not z1:
        return 1
    # principal cocycles: f_v(g) = g v - v
    basis_cols = [[z[i] for z in z1] for i in range(nunk)]
    coords = []
    for j in range(m):
        v = [1 if c == j else 0 for c in range(m)]
        target = []
        for gi in range(1, order):
            gv = mat_vec(elements[gi], v)
            target.extend(gv[c] - v[c] for c in range(m))
        coords.append(_solve_in_lattice(basis_cols, target))
    mat = [[coords[j][i] for j in range(m)] for i in range(len(z1))]
    if rank(mat) != len(z1):
        raise ValueError("H^1 is infinite")
    out = 1
    for f in invariant_factors(mat):
        out *= f
    return out


def _require_cyclic(fan):
    group = galois_group(fan)
    if len(group) == 1:
        return None, 1
    gen = _cyclic_generator(group)
    if gen is None:
        raise ValueError(
            "Galois group of order %d is not cyclic; H^1 unsupported" % len(group)
        )
    return gen, len(group)


def picard_data(fan):
    """Ranks, effective generators, and H^1 data for the fan's variety."""
    orbits = galois_orbits(fan)
    r = orbits.r
    d = fan.dim
    n = fan.nrays
    gen, order = _require_cyclic(fan)

    if gen is None:
        t = d
        h1_gm = ()
    else:
        dual = _dual_action(gen)
        gm1 = [[dual[i][j] - (1 if i == j else 0) for j in range(d)] for i in range(d)]
        t = d - rank(gm1)
        h1_gm = h1_cyclic(tuple(tuple(row) for row in dual), order)

    project, lift = picard_quotient(fan)
    rank_split = n - d
    assert len(project) == rank_split

    eff = []
    for orb in orbits.orbits:
        vec = [1 if j in orb else 0 for j in range(n)]
        eff.append(tuple(mat_vec([list(p) for p in project], vec)))
    antican = tuple(mat_vec([list(p) for p in project], [1] * n))

    if gen is None:
        h1_gpic = ()
    else:
        hat = _induced_pic_action(fan, project, lift, gen)
        h1_gpic = h1_cyclic(hat, order)

    return PicardData(
        rank_split=rank_split,
        rank_K=r - t,
        t=t,
        r=r,
        eff_generators=tuple(eff),
        anticanonical_class=antican,
        h1_GM=h1_gm,
        h1_GPic=h1_gpic,
        projection=project,
    )


def _induced_pic_action(fan, project, lift, g):
    """Matrix of the g-action on Pic = Z^n / M in the quotient basis.

    g permutes the rays; on value vectors it acts by (g phi)_j =
    phi_{pi^{-1}(j)}.  Well-defined on the quotient because the embedding
    of M is equivariant; the stray block vanishing is asserted.
    """
    perm = ray_permutation(fan, g)
    n = fan.nrays
    k = len(project)
    inv = [0] * n
    for j, pj in enumerate(perm):
        inv[pj] = j
    cols = []
    for b in range(k):
        rep = [lift[i][b] for i in range(n)]
        permuted = [rep[inv[j]] for j in range(n)]
        cols.append(mat_vec([list(p) for p in project], permuted))
    # well-definedness: images of the M-embedding must stay in M
    for col in _embedding_columns(fan):
        permuted = [col[inv[j]] for j in range(n)]
        if any(mat_vec([list(p) for p in project], permuted)):
            raise AssertionError("permutation action does not descend to Pic")
    return tuple(tuple(cols[b][i] for b in range(k)) for i in range(k))


def beta(fan):
    """Order of H^1(G, Pic over the splitting field); 1 for split fans."""
    return picard_data(fan).beta
