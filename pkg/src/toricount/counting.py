"""Exact enumeration of bounded-height torus points and asymptotics.

The naive enumerator is provably complete: the anticanonical PL function
satisfies phi(n) >= |n|_1 / w with w = max_j |e_j|_1, which forces

    prod_i max(num_i, den_i)^2 <= B^w

for every point of height <= B (the finite places bound valuations, the
real place bounds magnitudes, and every local factor is >= 1).  Reduced
fractions are scanned inside that product cap and filtered by exact
height.  Specialized closed-form counters exist for the registered fans
where the naive cap is far too coarse.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as iter_product

from .heights import TorusPoint, anticanonical_height
from .linalg import solve_exact
from .picard import picard_data

DEFAULT_BUDGET = 50_000_000
SIEVE_CAP = 2_000_000


class BudgetExceededError(RuntimeError):
    def __init__(self, estimate, budget):
        super().__init__(
            "naive scan would visit ~%s candidates (budget %d)" % (estimate, budget)
        )
        self.estimate = estimate
        self.budget = budget


@dataclass(frozen=True)
class SearchBound:
    """Provably complete coordinate bounds for H(x) <= B."""

    slope: Fraction  # c with phi(n) >= c * |n|_1
    weight: int  # max_j |e_j|_1
    bound: Fraction
    product_cap: int  # prod_i max(num_i, den_i) <= product_cap

    @classmethod
    def for_fan(cls, fan, B):
        w = max(sum(abs(x) for x in r) for r in fan.rays)
        bound = Fraction(B)
        if bound < 1:
            return cls(Fraction(1, w), w, bound, 0)
        # prod max_i <= B^{w/2}, checked in the squared form to stay exact
        target = bound**w
        cap = math.isqrt(int(target))
        if Fraction(cap + 1) ** 2 <= target:
            cap += 1
        return cls(Fraction(1, w), w, bound, cap)

    def coordinate_bound(self):
        """ceil(B^{1/c}): numerators and denominators never exceed this."""
        if self.bound < 1:
            return 0
        target = self.bound**self.weight
        m = int(round(float(target)))
        while Fraction(m) < target:
            m += 1
        while m > 1 and Fraction(m - 1) >= target:
            m -= 1
        return m


def _phi_sieve(n):
    phi = list(range(n + 1))
    for p in range(2, n + 1):
        if phi[p] == p:  # p prime
            for k in range(p, n + 1, p):
                phi[k] -= phi[k] // p
    return phi


def _mobius_sieve(n):
    mu = [1] * (n + 1)
    primes = []
    is_comp = [False] * (n + 1)
    for i in range(2, n + 1):
        if not is_comp[i]:
            primes.append(i)
            mu[i] = -1
        for p in primes:
            if i * p > n:
                break
            is_comp[i * p] = True
            if i % p == 0:
                mu[i * p] = 0
                break
            mu[i * p] = -mu[i]
    return mu


def _spf_sieve(n):
    spf = list(range(n + 1))
    for p in range(2, math.isqrt(n) + 1):
        if spf[p] == p:
            for k in range(p * p, n + 1, p):
                if spf[k] == k:
                    spf[k] = p
    return spf


def _factor_with_spf(n, spf):
    out = {}
    while n > 1:
        p = spf[n]
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        out[p] = e
    return out


def _coords_by_max(cap):
    """Positive reduced fractions a/b grouped by max(a, b), as (a, b) pairs."""
    groups = {1: [(1, 1)]}
    for m in range(2, cap + 1):
        pairs = []
        for a in range(1, m):
            if math.gcd(a, m) == 1:
                pairs.append((a, m))
        for b in range(1, m):
            if math.gcd(m, b) == 1:
                pairs.append((m, b))
        groups[m] = pairs
    return groups


def _anticanonical_forms(fan):
    """Per-cone linear forms of phi_Sigma, plus a convexity certificate.

    When phi_Sigma is convex (anticanonical class nef) it equals the max
    of its cone forms everywhere, which gives the enumerator an exact
    integer fast path.
    """
    forms = []
    for cone in fan.max_cones:
        a = [list(fan.rays[j]) for j in cone]
        m = solve_exact(a, [1] * fan.dim)
        if any(x.denominator != 1 for x in m):
            raise AssertionError("non-integral cone form on a regular cone")
        forms.append(tuple(int(x) for x in m))
    convex = all(
        max(sum(m[i] * r[i] for i in range(fan.dim)) for m in forms) == 1
        for r in fan.rays
    )
    return forms, convex


def _nth_root_floor(x: Fraction, c: int) -> int:
    """Largest integer m with m^c <= x."""
    if x < 1:
        return 0
    m = int(round(float(x) ** (1.0 / c)))
    m = max(m, 1)
    while Fraction(m + 1) ** c <= x:
        m += 1
    while m > 1 and Fraction(m) ** c > x:
        m -= 1
    return m


def _axis_caps(fan, B):
    """Per-coordinate caps max(num_i, den_i) <= B^{1/c_i}, convex case only.

    For a convex phi the height dominates the pairwise form max, and with
    delta = m_sigma - m_tau supported on axis i alone the product formula
    leaves H(x) >= max(num, den)(x_i^{delta_i}).  Complete by proof, much
    tighter than the generic product cap on the surfaces.
    """
    forms, convex = _anticanonical_forms(fan)
    d = fan.dim
    if not convex:
        return None, forms, convex
    exps = [0] * d
    for i in range(d):
        for ma in forms:
            for mb in forms:
                delta = [ma[t] - mb[t] for t in range(d)]
                if delta[i] > 0 and all(delta[t] == 0 for t in range(d) if t != i):
                    exps[i] = max(exps[i], delta[i])
    bound = Fraction(B)
    caps = [
        _nth_root_floor(bound, e) if e > 0 else None for e in exps
    ]
    return caps, forms, convex


def candidate_estimate(fan, B):
    """Exact number of positive-orthant candidate tuples the scan visits."""
    sb = SearchBound.for_fan(fan, B)
    cap = sb.product_cap
    if cap <= 0:
        return 0
    axis_caps, _forms, _convex = _axis_caps(fan, B)
    coord_caps = [
        cap if axis_caps is None or axis_caps[i] is None else min(cap, axis_caps[i])
        for i in range(fan.dim)
    ]
    sieve_size = max(coord_caps)
    if sieve_size > SIEVE_CAP:
        raise BudgetExceededError(float("inf"), DEFAULT_BUDGET)
    phi = _phi_sieve(sieve_size)
    # sizes[m] = number of positive reduced fractions with max(num, den) = m
    sizes = [0] * (sieve_size + 1)
    sizes[1] = 1
    for m in range(2, sieve_size + 1):
        sizes[m] = 2 * phi[m]
    prefix = [0] * (sieve_size + 1)
    for m in range(1, sieve_size + 1):
        prefix[m] = prefix[m - 1] + sizes[m]
    d = fan.dim
    from functools import lru_cache

    @lru_cache(maxsize=None)
    def tuples(i, P):
        if i == d:
            return 1
        lim = min(P, coord_caps[i])
        if i == d - 1:
            return prefix[lim]
        return sum(sizes[m] * tuples(i + 1, P // m) for m in range(1, lim + 1))

    return tuples(0, cap)


def enumerate_naive(fan, B, budget=DEFAULT_BUDGET, with_heights=False):
    """Complete list of torus points with anticanonical height <= B.

    Scans reduced fractions inside the provable product cap, filters by
    exact height, and expands sign patterns (each coordinate's sign never
    changes any local height).  Deterministic order.  Refuses scans whose
    exact candidate count exceeds the budget.
    """
    if not fan.is_split():
        raise ValueError("counting needs a split fan")
    bound = Fraction(B)
    if bound < 1:
        return []
    sb = SearchBound.for_fan(fan, B)
    cap = sb.product_cap
    estimate = candidate_estimate(fan, B)
    if estimate > budget:
        raise BudgetExceededError(estimate, budget)

    d = fan.dim
    axis_caps, forms, convex = _axis_caps(fan, B)
    coord_caps = [
        cap if axis_caps is None or axis_caps[i] is None else min(cap, axis_caps[i])
        for i in range(d)
    ]
    sieve_size = max(coord_caps)
    groups = _coords_by_max(sieve_size)
    spf = _spf_sieve(max(sieve_size, 1))
    factor_cache = {n: _factor_with_spf(n, spf) for n in range(1, sieve_size + 1)}

    bnum, bden = bound.numerator, bound.denominator
    out = []
    signs = list(iter_product((1, -1), repeat=d))

    def eval_height_fast(pairs):
        # finite part: integer prod p^{max over forms of <m, vp-vector>}
        primes = set()
        for a, b in pairs:
            primes.update(factor_cache[a])
            primes.update(factor_cache[b])
        hfin = 1
        for p in primes:
            nbar = [
                factor_cache[a].get(p, 0) - factor_cache[b].get(p, 0)
                for a, b in pairs
            ]
            e = max(sum(m[i] * nbar[i] for i in range(d)) for m in forms)
            hfin *= p**e
        # real part: max over forms of prod (b/a)^{m_i}, kept as num/den
        best_n, best_d = 0, 1
        for m in forms:
            num = den = 1
            for (a, b), mi in zip(pairs, m):
                if mi > 0:
                    num *= b**mi
                    den *= a**mi
                elif mi < 0:
                    num *= a ** (-mi)
                    den *= b ** (-mi)
            if num * best_d > best_n * den:
                best_n, best_d = num, den
        return hfin * best_n, best_d

    def emit(pairs):
        if convex:
            hn, hd = eval_height_fast(pairs)
            if hn * bden > bnum * hd:
                return
            h = Fraction(hn, hd)
        else:
            x = TorusPoint([Fraction(a, b) for a, b in pairs])
            h = anticanonical_height(fan, x)
            if h > bound:
                return
        for sign in signs:
            pt = TorusPoint(
                [Fraction(s * a, b) for s, (a, b) in zip(sign, pairs)]
            )
            out.append((pt, h) if with_heights else pt)

    def rec(i, cap_left, pairs):
        lim = min(cap_left, coord_caps[i])
        for m in range(1, lim + 1):
            for pair in groups[m]:
                pairs.append(pair)
                if i + 1 == d:
                    emit(pairs)
                else:
                    rec(i + 1, cap_left // m, pairs)
                pairs.pop()

    rec(0, cap, [])
    return out


# ---------------------------------------------------------------------------
# specialized counters


def _isqrt_frac(x: Fraction) -> int:
    """Largest integer m with m^2 <= x."""
    m = math.isqrt(int(x))
    while Fraction((m + 1) ** 2) <= x:
        m += 1
    while Fraction(m**2) > x:
        m -= 1
    return m


def _icbrt_frac(x: Fraction) -> int:
    m = round(float(x) ** (1.0 / 3.0))
    while Fraction((m + 1) ** 3) <= x:
        m += 1
    while m > 0 and Fraction(m**3) > x:
        m -= 1
    return m


def count_p1(B) -> int:
    """Coprime-pair sieve: points +-a/b with max(|a|, b)^2 <= B."""
    bound = Fraction(B)
    if bound < 1:
        return 0
    s = _isqrt_frac(bound)
    phi = _phi_sieve(s)
    coprime_pairs = 2 * sum(phi[1 : s + 1]) - 1
    return 2 * coprime_pairs


def count_p2(B) -> int:
    """Primitive-triple sieve: nonzero (z0, z1, z2), gcd 1, max^3 <= B."""
    bound = Fraction(B)
    if bound < 1:
        return 0
    m = _icbrt_frac(bound)
    mu = _mobius_sieve(m)
    triples = sum(mu[k] * (m // k) ** 3 for k in range(1, m + 1))
    return 4 * triples


def count_p1xp1(B) -> int:
    """Sorted convolution of two P^1 height multisets (H1 * H2 <= B)."""
    bound = Fraction(B)
    if bound < 1:
        return 0
    s = _isqrt_frac(bound)
    phi = _phi_sieve(s)
    # P^1 points with height exactly m^2: 2 for m = 1, else 4*phi(m)
    npts = [0] * (s + 1)
    npts[1] = 2
    for m in range(2, s + 1):
        npts[m] = 4 * phi[m]
    prefix = [0] * (s + 1)
    for m in range(1, s + 1):
        prefix[m] = prefix[m - 1] + npts[m]
    total = 0
    for m1 in range(1, s + 1):
        if npts[m1] == 0:
            continue
        m2_max = _isqrt_frac(bound / (m1 * m1))
        total += npts[m1] * prefix[min(m2_max, s)]
    return total


SPECIALIZED = {
    "p1": count_p1,
    "p2": count_p2,
    "p1xp1": count_p1xp1,
}


def enumerate_specialized(fan_id, B) -> int:
    """Exact N(B) for a registered fan id."""
    if fan_id not in SPECIALIZED:
        raise KeyError(
            "no specialized enumerator for %r (have %s)"
            % (fan_id, sorted(SPECIALIZED))
        )
    return SPECIALIZED[fan_id](B)


def specialized_id_for(fan):
    """Registered id of the fan, matched on exact ray and cone sets."""
    rays = set(fan.rays)
    cones = {frozenset(c) for c in fan.max_cones}
    if fan.dim == 1 and rays == {(1,), (-1,)}:
        return "p1"
    if fan.dim == 2 and rays == {(1, 0), (0, 1), (-1, -1)} and len(cones) == 3:
        return "p2"
    if fan.dim == 2 and rays == {(1, 0), (0, 1), (-1, 0), (0, -1)} and len(cones) == 4:
        return "p1xp1"
    return None


def count_points(fan, B, strategy="auto", budget=DEFAULT_BUDGET):
    """N(B) by the requested strategy ("auto", "naive", "specialized")."""
    if strategy == "naive":
        return len(enumerate_naive(fan, B, budget=budget))
    if strategy == "specialized":
        fid = specialized_id_for(fan)
        if fid is None:
            raise KeyError("fan is not registered for specialized counting")
        return enumerate_specialized(fid, B)
    if strategy == "auto":
        fid = specialized_id_for(fan)
        if fid is not None:
            return enumerate_specialized(fid, B)
        return len(enumerate_naive(fan, B, budget=budget))
    raise ValueError("unknown strategy %r" % strategy)


# ---------------------------------------------------------------------------
# asymptotic comparison


@dataclass
class CountReport:
    fan_id: str
    strategy: str
    schedule: list
    counts: list
    predicted: list
    ratios: list
    k: int
    theta_lo: float
    theta_hi: float
    regression: dict = field(default_factory=dict)
    provenance: list = field(default_factory=list)

    def to_csv(self):
        lines = ["B,N,predicted,ratio"]
        for b, n, p, r in zip(self.schedule, self.counts, self.predicted, self.ratios):
            lines.append("%s,%d,%.6f,%.6f" % (b, n, p, r))
        return "\n".join(lines) + "\n"

    def to_json_dict(self):
        return {
            "fan_id": self.fan_id,
            "strategy": self.strategy,
            "schedule": [str(b) for b in self.schedule],
            "counts": self.counts,
            "predicted": self.predicted,
            "ratios": self.ratios,
            "k": self.k,
            "theta": {"lo": self.theta_lo, "hi": self.theta_hi},
            "regression": self.regression,
            "provenance": self.provenance,
        }


def leading_term(k, theta, B):
    """theta / (k-1)! * B (log B)^(k-1)."""
    return theta / math.factorial(k - 1) * B * math.log(B) ** (k - 1)


def fit_leading_coefficient(schedule, counts, k):
    """Two-term least squares N ~ a*B log^{k-1}B/(k-1)! + b*B log^{k-2}B.

    Returns (a, standard error of a, b).  Needs k >= 2.
    """
    import numpy as np

    if k < 2:
        raise ValueError("use ratio tables for k = 1")
    bs = np.array([float(b) for b in schedule])
    ls = np.log(bs)
    x1 = bs * ls ** (k - 1) / math.factorial(k - 1)
    x2 = bs * ls ** (k - 2)
    X = np.column_stack([x1, x2])
    y = np.array([float(n) for n in counts])
    coef, _res, _rank, _sv = np.linalg.lstsq(X, y, rcond=None)
    resid = y - X @ coef
    dof = max(len(schedule) - 2, 1)
    sigma2 = float(resid @ resid) / dof
    cov = sigma2 * np.linalg.inv(X.T @ X)
    return float(coef[0]), float(math.sqrt(max(cov[0, 0], 0.0))), float(coef[1])


def count_table(
    fan, schedule, theta_interval, strategy="auto", fan_id="", budget=DEFAULT_BUDGET
):
    """Plain counts-versus-prediction table, no regression, any schedule."""
    schedule = sorted(schedule)
    k = picard_data(fan).rank_K
    theta_lo, theta_hi = float(theta_interval[0]), float(theta_interval[1])
    theta_c = (theta_lo + theta_hi) / 2
    counts = [count_points(fan, b, strategy=strategy, budget=budget) for b in schedule]
    predicted = [leading_term(k, theta_c, float(b)) for b in schedule]
    ratios = [n / p if p else float("nan") for n, p in zip(counts, predicted)]
    return CountReport(
        fan_id=fan_id,
        strategy=strategy,
        schedule=list(schedule),
        counts=counts,
        predicted=predicted,
        ratios=ratios,
        k=k,
        theta_lo=theta_lo,
        theta_hi=theta_hi,
        provenance=["plain table; schedule too short for a regression"],
    )


def asymptotic_report(
    fan,
    schedule,
    theta_interval,
    strategy="auto",
    fan_id="",
    budget=DEFAULT_BUDGET,
    counts=None,
):
    """Counts along the schedule against theta/(k-1)! * B (log B)^(k-1)."""
    schedule = sorted(schedule)
    if len(schedule) < 4 or Fraction(schedule[-1]) < 100 * Fraction(schedule[0]):
        raise ValueError(
            "schedule needs at least 4 points spanning two decades"
        )
    k = picard_data(fan).rank_K
    theta_lo, theta_hi = float(theta_interval[0]), float(theta_interval[1])
    theta_c = (theta_lo + theta_hi) / 2
    if counts is None:
        counts = [count_points(fan, b, strategy=strategy, budget=budget) for b in schedule]
    prev = -1
    for n in counts:
        if n < prev:
            raise AssertionError("N(B) must be nondecreasing")
        prev = n
    predicted = [leading_term(k, theta_c, float(b)) for b in schedule]
    ratios = [n / p if p else float("nan") for n, p in zip(counts, predicted)]
    regression = {}
    if k >= 2:
        a, se, b2 = fit_leading_coefficient(schedule, counts, k)
        regression = {
            "leading": a,
            "leading_se": se,
            "secondary": b2,
            "model": "N ~ a*B*log^%d(B)/%d! + b*B*log^%d(B)" % (k - 1, k - 1, k - 2),
        }
    return CountReport(
        fan_id=fan_id,
        strategy=strategy,
        schedule=list(schedule),
        counts=list(counts),
        predicted=predicted,
        ratios=ratios,
        k=k,
        theta_lo=theta_lo,
        theta_hi=theta_hi,
        regression=regression,
        provenance=[
            "counts by strategy %r" % strategy,
            "prediction uses the midpoint of the theta interval",
        ],
    )
