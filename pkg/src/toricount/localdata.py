"""Local machinery: Q polynomials, local integrals, transforms, densities.

The Q polynomial of a fan (for a decomposition subgroup acting with given
ray orbits) clears the geometric-series denominators out of the sum of
R_sigma terms over invariant cones.  Its constant term is 1 and every
other monomial has total degree >= 2, which is what makes the Euler
products downstream converge; that property is asserted after
construction, not assumed.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .fan import OrbitDecomposition
from .picard import PLFunction, pl_evaluate


@dataclass(frozen=True)
class QSigmaPolynomial:
    """Sparse polynomial in one variable u_j per ray orbit."""

    nvars: int
    lengths: tuple
    monomials: tuple  # ((exponent tuple, int coeff), ...)

    def coeff_dict(self):
        return dict(self.monomials)

    def evaluate(self, values):
        total = 0
        for exps, coeff in self.monomials:
            term = coeff
            for v, e in zip(values, exps):
                if e:
                    term = term * v**e
            total = total + term
        return total

    def diagonal_coeffs(self):
        """Coefficients of Q(u, ..., u) as a dense list, low degree first."""
        deg = max((sum(e) for e, _ in self.monomials), default=0)
        out = [0] * (deg + 1)
        for exps, coeff in self.monomials:
            out[sum(exps)] += coeff
        return out

    def degree_ge_two_away_from_one(self):
        return all(
            sum(e) >= 2 for e, c in self.monomials if c and any(e)
        )

    def abs_coeff_sum_nonconstant(self):
        return sum(abs(c) for e, c in self.monomials if any(e))


def _poly_mul(a, b):
    out = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            key = tuple(x + y for x, y in zip(ea, eb))
            out[key] = out.get(key, 0) + ca * cb
            if out[key] == 0:
                del out[key]
    return out


def qsigma(fan, decomposition: OrbitDecomposition) -> QSigmaPolynomial:
    """Clear denominators out of the R_sigma sum over invariant cones.

    A cone is invariant for the subgroup exactly when its ray set is a
    union of orbits, so the decomposition alone determines the sum:

        sum_sigma prod_{j in sigma} u_j^{d_j} / (1 - u_j^{d_j})
            = Q / prod_j (1 - u_j^{d_j}).
    """
    n = fan.nrays
    flat = sorted(j for orb in decomposition.orbits for j in orb)
    if flat != list(range(n)):
        raise ValueError("orbit decomposition is not a partition of the rays")
    orbit_of = {}
    for k, orb in enumerate(decomposition.orbits):
        for j in orb:
            orbit_of[j] = k
    l = decomposition.r
    lengths = decomposition.lengths

    invariant_cones = []
    for cone in fan.all_cones():
        touched = {orbit_of[j] for j in cone}
        if sum(lengths[k] for k in touched) == len(cone):
            invariant_cones.append(frozenset(touched))
    if frozenset() not in invariant_cones:
        raise ValueError("missing zero cone; fan structure inconsistent")

    zero = tuple([0] * l)
    poly = {}
    for touched in invariant_cones:
        term = {zero: 1}
        for k in range(l):
            ek = tuple(lengths[k] if i == k else 0 for i in range(l))
            if k in touched:
                term = _poly_mul(term, {ek: 1})
            else:
                term = _poly_mul(term, {zero: 1, ek: -1})
        for key, c in term.items():
            poly[key] = poly.get(key, 0) + c
            if poly[key] == 0:
                del poly[key]

    q = QSigmaPolynomial(l, tuple(lengths), tuple(sorted(poly.items())))
    if q.coeff_dict().get(zero, 0) != 1:
        raise ValueError("Q(0) != 1; orbit data inconsistent with the fan")
    if not q.degree_ge_two_away_from_one():
        raise ValueError("Q - 1 has a monomial of degree < 2; orbit data bad")
    return q


def qsigma_split(fan):
    """Q for the trivial decomposition subgroup (one variable per ray)."""
    return qsigma(fan, OrbitDecomposition(tuple((j,) for j in range(fan.nrays))))


def _require_split(fan):
    if not fan.is_split():
        raise ValueError("operation needs a split fan (no Galois action)")


def _integer_values(phi):
    vals = []
    for v in phi.values:
        f = Fraction(v)
        if f.denominator != 1:
            raise ValueError(
                "exact local sums need integer values on the rays, got %r" % (v,)
            )
        vals.append(int(f))
    return vals


@dataclass(frozen=True)
class LocalIntegral:
    """Truncated lattice sum with a certified tail, plus the closed form."""

    prime: int
    truncation: int
    truncated: Fraction
    closed_form: Fraction
    tail_bound: Fraction


def local_integral(fan, p, s: PLFunction, truncation=20):
    """Lattice sum of p^{-phi_s(n)} against its closed form.

    The sum runs over the box |n|_inf <= truncation and is exact; the
    closed form is Q(p^{-s_1}, ..., p^{-s_n}) / prod (1 - p^{-s_j}).  The
    difference is certified below tail_bound, a geometric estimate from
    the linear lower slope of phi_s.
    """
    _require_split(fan)
    vals = _integer_values(s)
    if any(v <= 0 for v in vals):
        raise ValueError("divergent: s has a value <= 0 on some ray")
    d = fan.dim
    q = qsigma_split(fan)

    us = [Fraction(1, p**v) for v in vals]
    closed = q.evaluate(us)
    for u in us:
        closed /= 1 - u

    total = Fraction(0)
    from itertools import product

    r = truncation
    for n in product(range(-r, r + 1), repeat=d):
        e = pl_evaluate(fan, s, n)
        total += Fraction(1, p ** int(e))

    # phi_s(n) >= a*|n|_inf with a = min(s)/max||e_j||_1; only floor(a) is
    # used so the geometric bound stays rational
    max_norm = max(sum(abs(x) for x in ray) for ray in fan.rays)
    a = Fraction(min(vals), max_norm)
    a_floor = int(a)
    if a_floor < 1:
        raise ValueError(
            "cannot certify the tail: slope %s per box shell is below 1" % a
        )
    x = Fraction(1, p**a_floor)

    def shell_count(m):
        return (2 * m + 1) ** d - (2 * m - 1) ** d

    ratio = Fraction(shell_count(r + 2), shell_count(r + 1))
    if ratio * x >= 1:
        raise ValueError("tail ratio not contracting; raise the truncation")
    tail = Fraction(shell_count(r + 1)) * x ** (r + 1) / (1 - ratio * x)
    return LocalIntegral(p, r, total, closed, tail)


def unramified_character_transform(fan, p, s: PLFunction, theta):
    """Closed form of the character-twisted local sum.

    theta lists one unit-modulus value per ray (per orbit in the split
    case); rational theta (such as +-1) keeps the arithmetic exact,
    anything else returns a complex value.
    """
    _require_split(fan)
    vals = _integer_values(s)
    if any(v <= 0 for v in vals):
        raise ValueError("divergent: s has a value <= 0 on some ray")
    if len(theta) != fan.nrays:
        raise ValueError("need one theta per ray")
    exact = all(isinstance(t, (int, Fraction)) for t in theta)
    for t in theta:
        mod2 = t * t if exact else (t * t.conjugate()).real
        if exact and mod2 != 1:
            raise ValueError("theta values must have modulus 1")
        if not exact and abs(mod2 - 1) > 1e-9:
            raise ValueError("theta values must have modulus 1")
    q = qsigma_split(fan)
    if exact:
        us = [Fraction(t) * Fraction(1, p**v) for t, v in zip(theta, vals)]
        value = q.evaluate(us)
        for u in us:
            value /= 1 - u
        return value
    us = [complex(t) * float(p) ** (-v) for t, v in zip(theta, vals)]
    value = complex(q.evaluate(us))
    for u in us:
        value /= 1 - u
    return value


@dataclass(frozen=True)
class ComplexRational:
    """Exact complex number with rational real and imaginary parts."""

    real: Fraction
    imag: Fraction

    def __complex__(self):
        return float(self.real) + 1j * float(self.imag)

    def __add__(self, other):
        return ComplexRational(self.real + other.real, self.imag + other.imag)

    def __mul__(self, other):
        return ComplexRational(
            self.real * other.real - self.imag * other.imag,
            self.real * other.imag + self.imag * other.real,
        )

    def reciprocal(self):
        n = self.real**2 + self.imag**2
        if n == 0:
            raise ZeroDivisionError
        return ComplexRational(self.real / n, -self.imag / n)

    def is_zero(self):
        return self.real == 0 and self.imag == 0


def archimedean_transform(fan, s: PLFunction, y):
    """Sum over maximal cones of 1 / prod (s_j + i <e_j, y>), exact.

    This is the complex-place Fourier transform of exp(-phi_s); the
    quadrature oracle in the tests pins the sign conventions.
    """
    y = [Fraction(v) for v in y]
    svals = [Fraction(v) for v in s.values]
    if any(v <= 0 for v in svals):
        raise ValueError("s must be positive on every ray")
    total = ComplexRational(Fraction(0), Fraction(0))
    for ci, cone in enumerate(fan.max_cones):
        denom = ComplexRational(Fraction(1), Fraction(0))
        for j in cone:
            pairing = sum(e * yy for e, yy in zip(fan.rays[j], y))
            factor = ComplexRational(svals[j], pairing)
            if factor.is_zero():
                raise ZeroDivisionError(
                    "factor for ray %d vanishes on cone %d" % (j, ci)
                )
            denom = denom * factor
        total = total + denom.reciprocal()
    return total


@dataclass(frozen=True)
class LocalDensity:
    """Point count over F_p with its measure-theoretic companions."""

    prime: int
    point_count: int
    density: Fraction
    convergence_factor: Fraction

    @property
    def euler_factor(self):
        return self.density * self.convergence_factor


def point_count_fp(fan, p) -> LocalDensity:
    """Card of the variety over F_p from the torus orbit decomposition."""
    _require_split(fan)
    d = fan.dim
    count = sum((p - 1) ** (d - len(c)) for c in fan.all_cones())
    k = fan.nrays - d
    return LocalDensity(
        prime=p,
        point_count=count,
        density=Fraction(count, p**d),
        convergence_factor=Fraction(p - 1, p) ** k,
    )
