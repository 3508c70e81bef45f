import random
from fractions import Fraction

import pytest

from toricount.fan import Fan, galois_orbits
from toricount.linalg import identity, mat_mul
from toricount.picard import (
    PLFunction,
    anticanonical,
    beta,
    from_character,
    h1_cyclic,
    h1_cyclic_cocycle,
    picard_data,
    pl_evaluate,
)


def test_pl_evaluate_examples(p1, p2):
    assert pl_evaluate(p2, anticanonical(p2), (1, 1)) == 2
    assert pl_evaluate(p2, PLFunction((0, 0, 0)), (7, -9)) == 0
    assert pl_evaluate(p1, PLFunction((1, 1)), (-3,)) == 3


def test_characters_are_globally_linear(corpus):
    rng = random.Random(7)
    for name, fan in corpus.items():
        for _ in range(20):
            m = [rng.randint(-5, 5) for _ in range(fan.dim)]
            phi = from_character(fan, m)
            v = [Fraction(rng.randint(-40, 40), rng.randint(1, 7)) for _ in range(fan.dim)]
            want = sum(mi * vi for mi, vi in zip(m, v))
            assert pl_evaluate(fan, phi, v) == want


def test_picard_data_split(p2):
    pd = picard_data(p2)
    assert pd.rank_split == 1
    assert pd.rank_K == 1
    assert pd.h == 1
    assert pd.beta == 1
    assert pd.anticanonical_class == (3,) or pd.anticanonical_class == (-3,)


def test_rank_split_is_n_minus_d(corpus):
    for name, fan in corpus.items():
        assert picard_data(fan).rank_split == fan.nrays - fan.dim, name


def test_norm_one_torus_h():
    fan = Fan(1, [(1,), (-1,)], [(0,), (1,)], galois=[[[-1]]])
    pd = picard_data(fan)
    assert pd.h == 2
    assert pd.beta == 1
    assert pd.t == 0
    assert pd.rank_K == 1


def test_swap_torus():
    fan = Fan(
        2,
        [(1, 0), (0, 1), (-1, 0), (0, -1)],
        [(0, 1), (1, 2), (2, 3), (3, 0)],
        galois=[[[0, 1], [1, 0]]],
    )
    pd = picard_data(fan)
    assert (pd.t, pd.r, pd.rank_K) == (1, 2, 1)
    assert pd.h == 1
    assert pd.beta == 1


def test_three_cycle():
    fan = Fan(
        2,
        [(1, 0), (0, 1), (-1, -1)],
        [(0, 1), (1, 2), (2, 0)],
        galois=[[[0, -1], [1, -1]]],
    )
    pd = picard_data(fan)
    assert pd.h == 3
    assert beta(fan) == 1


def test_exactness_bookkeeping(corpus):
    # free ranks of the exact sequence: rank_K + rank M^G = rank PL^G = r
    for name, fan in corpus.items():
        pd = picard_data(fan)
        assert pd.rank_K + pd.t == pd.r == galois_orbits(fan).r, name


def test_beta_split_is_one(corpus):
    for name, fan in corpus.items():
        if fan.is_split():
            assert beta(fan) == 1, name


def _random_finite_order_matrix(rng, size, order):
    """Conjugate of a block of structured finite-order integer matrices."""
    blocks = []
    left = size
    while left > 0:
        choices = [(1, 1)]
        if order % 2 == 0:
            choices.append((1, -1))
        if left >= 2:
            if order % 3 == 0:
                choices.append((2, "c3"))
            if order % 4 == 0:
                choices.append((2, "c4"))
            if order % 6 == 0:
                choices.append((2, "c6"))
            choices.append((2, "swap"))
        kind = rng.choice(choices)
        if kind == (1, 1):
            blocks.append([[1]])
            left -= 1
        elif kind == (1, -1):
            blocks.append([[-1]])
            left -= 1
        elif kind[1] == "c3":
            blocks.append([[0, -1], [1, -1]])
            left -= 2
        elif kind[1] == "c4":
            blocks.append([[0, -1], [1, 0]])
            left -= 2
        elif kind[1] == "c6":
            blocks.append([[0, -1], [1, 1]])
            left -= 2
        else:
            if order % 2 != 0:
                blocks.append([[1]])
                left -= 1
                continue
            blocks.append([[0, 1], [1, 0]])
            left -= 2
    a = [[0] * size for _ in range(size)]
    pos = 0
    for b in blocks:
        for i, row in enumerate(b):
            for j, x in enumerate(row):
                a[pos + i][pos + j] = x
        pos += len(b)
    # conjugate by a random unimodular matrix
    u = identity(size)
    for _ in range(6):
        i, j = rng.randrange(size), rng.randrange(size)
        if i != j:
            q = rng.randint(-2, 2)
            for t in range(size):
                u[i][t] += q * u[j][t]
    from toricount.linalg import unimodular_inverse

    return mat_mul(mat_mul(u, a), unimodular_inverse(u))


def test_h1_two_routes_agree_on_random_cyclic_modules():
    rng = random.Random(2024)
    done = 0
    while done < 50:
        size = rng.randint(1, 4)
        order = rng.choice([1, 2, 3, 4, 5, 6])
        a = _random_finite_order_matrix(rng, size, order)
        power = identity(size)
        for _ in range(order):
            power = mat_mul(power, a)
        if power != identity(size):
            continue
        route1 = 1
        for f in h1_cyclic(tuple(tuple(r) for r in a), order):
            route1 *= f
        route2 = h1_cyclic_cocycle(tuple(tuple(r) for r in a), order)
        assert route1 == route2, (a, order)
        done += 1


def test_h1_permutation_module_is_trivial():
    # Shapiro: a cyclic group permuting a basis has no H^1
    cyc = ((0, 1, 0), (0, 0, 1), (1, 0, 0))
    assert h1_cyclic(cyc, 3) == ()
    assert h1_cyclic_cocycle(cyc, 3) == 1


def test_h1_norm_one_module():
    assert h1_cyclic(((-1,),), 2) == (2,)
    assert h1_cyclic_cocycle(((-1,),), 2) == 2


def test_order_four_rotation_on_p1xp1():
    # rotation by 90 degrees: one ray orbit, M^G = 0, h = 2 from the
    # rotation module, beta trivial (the action on Pic is the swap)
    fan = Fan(
        2,
        [(1, 0), (0, 1), (-1, 0), (0, -1)],
        [(0, 1), (1, 2), (2, 3), (3, 0)],
        galois=[[[0, -1], [1, 0]]],
    )
    pd = picard_data(fan)
    assert (pd.r, pd.t, pd.rank_K) == (1, 0, 1)
    assert pd.h == 2
    assert pd.beta == 1
    from toricount.cones import alpha

    # Pic over the ground field is generated by the invariant class with
    # -K twice that class, so alpha must come out 1/2
    assert alpha(fan) == Fraction(1, 2)


def test_order_six_rotation_on_dp6():
    fan = Fan(
        2,
        [(1, 0), (1, 1), (0, 1), (-1, 0), (-1, -1), (0, -1)],
        [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)],
        galois=[[[1, -1], [1, 0]]],
    )
    from toricount.fan import validate_fan

    assert validate_fan(fan).ok
    pd = picard_data(fan)
    assert (pd.r, pd.t, pd.rank_K) == (1, 0, 1)
    assert pd.h == 1
    from toricount.cones import alpha

    # -K generates the ground-field Picard lattice here
    assert alpha(fan) == Fraction(1, 1)


def test_beta_agrees_with_cocycle_route_on_pic_actions():
    # both cohomology routes on the induced Picard action itself
    from toricount.fan import galois_group
    from toricount.picard import _cyclic_generator, _induced_pic_action, picard_quotient

    cases = [
        Fan(1, [(1,), (-1,)], [(0,), (1,)], galois=[[[-1]]]),
        Fan(2, [(1, 0), (0, 1), (-1, 0), (0, -1)],
            [(0, 1), (1, 2), (2, 3), (3, 0)], galois=[[[0, 1], [1, 0]]]),
        Fan(2, [(1, 0), (0, 1), (-1, 0), (0, -1)],
            [(0, 1), (1, 2), (2, 3), (3, 0)], galois=[[[0, -1], [1, 0]]]),
        Fan(2, [(1, 0), (0, 1), (-1, -1)],
            [(0, 1), (1, 2), (2, 0)], galois=[[[0, -1], [1, -1]]]),
        Fan(2, [(1, 0), (1, 1), (0, 1), (-1, 0), (-1, -1), (0, -1)],
            [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)],
            galois=[[[1, -1], [1, 0]]]),
    ]
    for fan in cases:
        group = galois_group(fan)
        gen = _cyclic_generator(group)
        project, lift = picard_quotient(fan)
        hat = _induced_pic_action(fan, project, lift, gen)
        route1 = 1
        for f in h1_cyclic(hat, len(group)):
            route1 *= f
        assert route1 == h1_cyclic_cocycle(hat, len(group))
        assert route1 == picard_data(fan).beta


def test_noncyclic_rejected():
    # Klein four group acting on Z^2 by sign flips
    fan = Fan(
        2,
        [(1, 0), (0, 1), (-1, 0), (0, -1)],
        [(0, 1), (1, 2), (2, 3), (3, 0)],
        galois=[[[-1, 0], [0, 1]], [[1, 0], [0, -1]]],
    )
    with pytest.raises(ValueError, match="not cyclic"):
        picard_data(fan)
    # orbit computation still works for the non-cyclic action
    assert galois_orbits(fan).orbits == ((0, 2), (1, 3))


def test_galois_invariant_pl_functions_constant_on_orbits(corpus):
    from toricount.picard import is_galois_invariant

    for name, fan in corpus.items():
        assert is_galois_invariant(fan, anticanonical(fan)), name
    swap = corpus["p1xp1-swap"]
    assert not is_galois_invariant(swap, PLFunction((1, 2, 1, 2)))
    assert is_galois_invariant(swap, PLFunction((2, 2, 5, 5)))


def test_pl_evaluate_vanishes_at_apex(corpus):
    rng = random.Random(12)
    for name, fan in corpus.items():
        phi = PLFunction(tuple(rng.randint(-5, 5) for _ in range(fan.nrays)))
        assert pl_evaluate(fan, phi, [0] * fan.dim) == 0


def test_pic_quotient_torsion_free(corpus):
    from toricount.picard import picard_quotient

    for name, fan in corpus.items():
        project, lift = picard_quotient(fan)
        assert len(project) == fan.nrays - fan.dim, name
