"""Fans: lattice data model, validation, Galois actions, cone location.

A fan is given by its primitive ray generators and the ray-index sets of
its maximal cones; faces are derived on demand and never stored.  All
types are immutable values, safe to share between workers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd

from . import dd
from .linalg import det, mat_vec, unimodular_inverse

GALOIS_GROUP_CAP = 10000


@dataclass(frozen=True)
class Lattice:
    """The cocharacter lattice N = Z^dim."""

    dim: int

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("lattice rank must be >= 1")


@dataclass(frozen=True)
class Cone:
    """A simplicial cone of a fan, named by the indices of its rays."""

    ray_indices: tuple

    @property
    def dim(self):
        return len(self.ray_indices)


@dataclass(frozen=True)
class Fan:
    """Complete regular fan data: rays, maximal cones, optional Galois action.

    `rays` are primitive integer vectors; `max_cones` are 0-based index
    tuples; `galois` is a tuple of d x d integer matrices generating a
    finite subgroup of GL(d, Z) that permutes rays and cones.  Use
    validate_fan to check all of that; the constructor only normalizes
    shapes.
    """

    lattice: Lattice
    rays: tuple
    max_cones: tuple
    galois: tuple = ()

    def __init__(self, dim, rays, max_cones, galois=()):
        object.__setattr__(self, "lattice", Lattice(dim))
        object.__setattr__(
            self, "rays", tuple(tuple(int(x) for x in r) for r in rays)
        )
        object.__setattr__(
            self,
            "max_cones",
            tuple(tuple(sorted(int(i) for i in c)) for c in max_cones),
        )
        object.__setattr__(
            self,
            "galois",
            tuple(tuple(tuple(int(x) for x in row) for row in g) for g in galois),
        )
        for r in self.rays:
            if len(r) != dim:
                raise ValueError("ray %r has wrong dimension" % (r,))
        for c in self.max_cones:
            if len(set(c)) != len(c) or any(i < 0 or i >= len(self.rays) for i in c):
                raise ValueError("bad cone index set %r" % (c,))

    @property
    def dim(self):
        return self.lattice.dim

    @property
    def nrays(self):
        return len(self.rays)

    def is_split(self):
        return not self.galois

    def all_cones(self):
        """Every cone of the fan as a sorted tuple of ray indices.

        Faces of the (simplicial) maximal cones, including the zero cone ().
        """
        return _all_cones(self)

    def cones_of_dim(self, j):
        return [c for c in self.all_cones() if len(c) == j]


@dataclass(frozen=True)
class OrbitDecomposition:
    """Partition of ray indices into orbits of the Galois group."""

    orbits: tuple
    lengths: tuple = field(init=False)

    def __post_init__(self):
        object.__setattr__(
            self, "lengths", tuple(len(o) for o in self.orbits)
        )

    @property
    def r(self):
        return len(self.orbits)

    def orbit_of(self, ray_index):
        for k, o in enumerate(self.orbits):
            if ray_index in o:
                return k
        raise KeyError(ray_index)


@dataclass(frozen=True)
class MultiplicativeVector:
    """A vector of N_R given by positive rationals q_i, standing for log q.

    Cone membership for such vectors is decided by exact comparisons of
    rational products against 1, never by floating logs.
    """

    qs: tuple

    def __init__(self, qs):
        object.__setattr__(self, "qs", tuple(Fraction(q) for q in qs))
        if any(q <= 0 for q in self.qs):
            raise ValueError("multiplicative coordinates must be positive")


@dataclass
class CheckResult:
    name: str
    passed: bool
    witness: str = ""


@dataclass
class ValidationReport:
    checks: list

    @property
    def ok(self):
        return all(c.passed for c in self.checks)

    def failed(self):
        return [c for c in self.checks if not c.passed]

    def __str__(self):
        lines = []
        for c in self.checks:
            mark = "PASS" if c.passed else "FAIL"
            suffix = "" if c.passed else "  [%s]" % c.witness
            lines.append("%-18s %s%s" % (c.name, mark, suffix))
        return "\n".join(lines)


@lru_cache(maxsize=None)
def _all_cones(fan):
    from itertools import combinations

    seen = {()}
    for c in fan.max_cones:
        for j in range(1, len(c) + 1):
            for sub in combinations(c, j):
                seen.add(sub)
    return tuple(sorted(seen, key=lambda s: (len(s), s)))


@lru_cache(maxsize=None)
def _cone_dual_basis(fan, cone_idx):
    """Rows u_i with: v in cone  iff  <u_i, v> >= 0 for all i.

    Valid for maximal cones of a regular complete fan (ray matrix is
    unimodular); u_i are the dual basis vectors, integer.
    """
    idxs = fan.max_cones[cone_idx]
    cols = [[fan.rays[j][i] for j in idxs] for i in range(fan.dim)]
    return tuple(tuple(row) for row in unimodular_inverse(cols))


def _in_cone_additive(fan, cone_idx, v):
    return all(
        sum(u[i] * v[i] for i in range(fan.dim)) >= 0
        for u in _cone_dual_basis(fan, cone_idx)
    )


def _in_cone_multiplicative(fan, cone_idx, mv):
    for u in _cone_dual_basis(fan, cone_idx):
        prod = Fraction(1)
        for exp, q in zip(u, mv.qs):
            if exp:
                prod *= q ** exp
        if prod < 1:
            return False
    return True


def locate_cone(fan, v):
    """Index of a maximal cone containing v (smallest index on ties).

    v is either a rational vector or a MultiplicativeVector whose entries
    q_i stand for the point (log q_1, ..., log q_d); membership for the
    latter is decided by comparing products of rational powers with 1.
    """
    if isinstance(v, MultiplicativeVector):
        test = lambda ci: _in_cone_multiplicative(fan, ci, v)
    else:
        v = [Fraction(x) for x in v]
        test = lambda ci: _in_cone_additive(fan, ci, v)
    for ci in range(len(fan.max_cones)):
        if test(ci):
            return ci
    raise ValueError("no maximal cone contains the vector; fan incomplete?")


def galois_group(fan, generators=None):
    """All elements of the group generated by the Galois matrices.

    Closure with a hard cap; realistic inputs are small subgroups of
    GL(d, Z), anything larger signals a non-finite action.
    """
    gens = fan.galois if generators is None else tuple(
        tuple(tuple(int(x) for x in row) for row in g) for g in generators
    )
    d = fan.dim
    ident = tuple(tuple(1 if i == j else 0 for j in range(d)) for i in range(d))
    group = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for g in frontier:
            for h in gens:
                prod = tuple(
                    tuple(sum(g[i][k] * h[k][j] for k in range(d)) for j in range(d))
                    for i in range(d)
                )
                if prod not in group:
                    group.add(prod)
                    nxt.append(prod)
                    if len(group) > GALOIS_GROUP_CAP:
                        raise ValueError(
                            "Galois closure exceeded %d elements; "
                            "action looks non-finite" % GALOIS_GROUP_CAP
                        )
        frontier = nxt
    return sorted(group)


def ray_permutation(fan, matrix):
    """The permutation j -> index of matrix * e_j within the ray list.

    Returns None if some image is not a ray of the fan.
    """
    perm = []
    index = {r: i for i, r in enumerate(fan.rays)}
    for r in fan.rays:
        img = tuple(mat_vec([list(row) for row in matrix], list(r)))
        if img not in index:
            return None
        perm.append(index[img])
    return perm


def galois_orbits(fan, generators=None):
    """Orbit decomposition of the ray set, sorted by smallest member."""
    group = galois_group(fan, generators)
    n = fan.nrays
    perms = []
    for g in group:
        p = ray_permutation(fan, g)
        if p is None:
            raise ValueError("Galois matrix does not permute the rays")
        perms.append(p)
    seen = set()
    orbits = []
    for j in range(n):
        if j in seen:
            continue
        orb = sorted({p[j] for p in perms})
        seen.update(orb)
        orbits.append(tuple(orb))
    orbits.sort(key=lambda o: o[0])
    return OrbitDecomposition(tuple(orbits))


def validate_fan(fan):
    """Run all structural checks; failures are report entries, not errors."""
    checks = []

    # primitivity
    bad = None
    for j, r in enumerate(fan.rays):
        g = 0
        for x in r:
            g = gcd(g, abs(x))
        if g != 1:
            bad = "ray %d = %r has content %d" % (j, r, g)
            break
    checks.append(CheckResult("primitivity", bad is None, bad or ""))

    # regularity: every maximal cone spanned by part of a Z-basis
    bad = None
    for ci, c in enumerate(fan.max_cones):
        if len(c) != fan.dim:
            bad = "cone %d has %d rays, expected %d" % (ci, len(c), fan.dim)
            break
        dd_ = det([list(fan.rays[j]) for j in c])
        if abs(dd_) != 1:
            bad = "cone %d has determinant %d" % (ci, dd_)
            break
    regular = bad is None
    checks.append(CheckResult("regularity", regular, bad or ""))

    # face intersections (needs regularity for the H-descriptions)
    if regular:
        bad = None
        for ci in range(len(fan.max_cones)):
            for cj in range(ci + 1, len(fan.max_cones)):
                w = _intersection_defect(fan, ci, cj)
                if w:
                    bad = w
                    break
            if bad:
                break
        checks.append(CheckResult("face_intersection", bad is None, bad or ""))
    else:
        checks.append(
            CheckResult("face_intersection", False, "skipped: fan not regular")
        )

    # completeness: every facet of a maximal cone shared by exactly two
    if regular:
        bad = None
        from itertools import combinations

        facet_count = {}
        for c in fan.max_cones:
            for f in combinations(c, fan.dim - 1):
                facet_count[f] = 0
        for f in facet_count:
            fs = set(f)
            for c in fan.max_cones:
                if fs <= set(c):
                    facet_count[f] += 1
        for f, cnt in sorted(facet_count.items()):
            if cnt != 2:
                bad = "facet %r lies in %d maximal cones; witness %r" % (
                    f,
                    cnt,
                    _uncovered_witness(fan, f),
                )
                break
        checks.append(CheckResult("completeness", bad is None, bad or ""))
    else:
        checks.append(CheckResult("completeness", False, "skipped: fan not regular"))

    # Galois compatibility
    bad = None
    for gi, g in enumerate(fan.galois):
        if len(g) != fan.dim or any(len(row) != fan.dim for row in g):
            bad = "galois matrix %d has wrong shape" % gi
            break
        if abs(det([list(row) for row in g])) != 1:
            bad = "galois matrix %d not in GL(d, Z)" % gi
            break
    if bad is None and fan.galois:
        try:
            group = galois_group(fan)
        except ValueError as exc:
            bad = str(exc)
            group = []
        cone_set = {frozenset(c) for c in fan.max_cones}
        for g in group:
            if bad:
                break
            perm = ray_permutation(fan, g)
            if perm is None:
                bad = "group element %r does not permute the rays" % (g,)
                break
            for c in fan.max_cones:
                if frozenset(perm[j] for j in c) not in cone_set:
                    bad = "group element %r maps cone %r off the fan" % (g, c)
                    break
    checks.append(CheckResult("galois", bad is None, bad or ""))

    return ValidationReport(checks)


def _intersection_defect(fan, ci, cj):
    """None if cone ci and cone cj meet in a common face, else a witness."""
    cons = list(_cone_dual_basis(fan, ci)) + list(_cone_dual_basis(fan, cj))
    rays, lineality = dd.extreme_rays(cons, fan.dim, allow_lineality=True)
    if lineality:
        return "cones %d,%d intersect in a non-pointed set" % (ci, cj)
    common = set(fan.max_cones[ci]) & set(fan.max_cones[cj])
    allowed = {fan.rays[j] for j in common}
    for r in rays:
        if tuple(r) not in allowed:
            return "cones %d,%d share ray %r outside their common face" % (
                ci,
                cj,
                r,
            )
    if len(rays) == fan.dim and ci != cj:
        # full-dimensional intersection would mean overlapping interiors
        return "cones %d,%d have overlapping interiors" % (ci, cj)
    return None


def _uncovered_witness(fan, facet):
    """A rational vector just outside a deficient facet, if one exists."""
    owners = [c for c in fan.max_cones if set(facet) <= set(c)]
    if not owners:
        return None
    owner = owners[0]
    other = next(j for j in owner if j not in facet)
    step = Fraction(1, 2)
    base = [sum(fan.rays[j][i] for j in facet) for i in range(fan.dim)]
    for _ in range(64):
        w = [Fraction(b) - step * fan.rays[other][i] for i, b in enumerate(base)]
        try:
            locate_cone(fan, w)
        except ValueError:
            return tuple(w)
        step /= 2
    return None
