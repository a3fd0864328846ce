import random
from fractions import Fraction

import pytest

from hypwalk import words as W
from hypwalk.errors import InputError, ResourceError, UnsupportedError
from hypwalk.finitegroups import (
    Automorphism,
    FiniteGroup,
    cyclic_automorphism,
    closure_order,
)
from hypwalk.freegroup import (
    ExtendedElement,
    FreeGroupOracle,
    SemidirectOracle,
    axis_overlap_delta,
    characteristic_index,
    exact_shadow_measure,
    fellow_traveling_delta,
    stab_census,
)
from hypwalk.geometry import IsometryClass


def _z3_model():
    z3 = FiniteGroup.cyclic(3)
    invert = cyclic_automorphism(3, 2)
    ident = Automorphism.identity(z3)
    return SemidirectOracle(2, z3, [invert, ident])


def _random_word(rng, max_len=12):
    return W.reduce_letters(
        [rng.choice([1, -1, 2, -2]) for _ in range(rng.randrange(max_len))]
    )


# ---------------------------------------------------------------------------
# Free oracle basics.


def test_free_oracle_metric():
    fo = FreeGroupOracle(2)
    w = W.str_to_word("abA")
    assert fo.displacement(w) == 3.0
    assert fo.pairwise_distance(W.str_to_word("a"), W.str_to_word("b")) == 2.0
    assert fo.translation_length_estimate(W.str_to_word("abab"), 1) == 4.0
    assert fo.classify((), 8) is IsometryClass.ELLIPTIC
    assert fo.classify(W.str_to_word("aB"), 8) is IsometryClass.LOXODROMIC


# ---------------------------------------------------------------------------
# Semidirect model.


def test_semidirect_group_axioms():
    model = _z3_model()
    rng = random.Random(5)
    elements = [
        model.element(_random_word(rng, 6), rng.randrange(3)) for _ in range(40)
    ]
    e = model.identity()
    for g in elements:
        assert model.multiply(g, model.inverse(g)) == e
        assert model.multiply(model.inverse(g), g) == e
    for _ in range(120):
        g, h, k = rng.choice(elements), rng.choice(elements), rng.choice(elements)
        assert model.multiply(model.multiply(g, h), k) == model.multiply(
            g, model.multiply(h, k)
        )
        gh = model.multiply(g, h)
        assert gh.word == W.multiply(g.word, h.word)


def test_semidirect_twist_example():
    # a acts on Z/3 by inversion: moving a torsion element past a flips sign.
    model = _z3_model()
    a1 = model.element((1,), 1)
    e1 = model.element((), 1)
    product = model.multiply(a1, e1)
    assert product.word == (1,)
    assert product.torsion == 2  # phi(e)^-1(1) + 1 stays 2 in Z/3
    assert model.multiply(a1, model.inverse(a1)) == model.identity()


def test_word_action_is_homomorphism():
    model = _z3_model()
    rng = random.Random(9)
    for _ in range(10_000):
        u, v = _random_word(rng), _random_word(rng)
        lhs = model.word_action(W.multiply(u, v))
        rhs = model.word_action(u).compose(model.word_action(v))
        assert lhs == rhs


def test_conjugation_homomorphism_on_pairs():
    model = _z3_model()
    rng = random.Random(13)
    for _ in range(150):
        g = model.element(_random_word(rng), rng.randrange(3))
        h = model.element(_random_word(rng), rng.randrange(3))
        lhs = model.conjugation_on_kernel(model.multiply(g, h))
        rhs = model.conjugation_on_kernel(g).compose(model.conjugation_on_kernel(h))
        assert lhs == rhs
        # conjugation really is k -> g k g^-1 inside the extension
        for k in range(3):
            conj = model.multiply(
                model.multiply(g, model.element((), k)), model.inverse(g)
            )
            assert conj.word == ()
            assert conj.torsion == model.conjugation_on_kernel(g)(k)


def test_characteristic_index_examples():
    model = _z3_model()
    # phi(ab) = inversion, phi(a^2) = identity
    assert model.word_action(W.str_to_word("ab")).images == (0, 2, 1)
    assert model.word_action(W.str_to_word("aa")).images == (0, 1, 2)
    support = [model.element((1,)), model.element((-1,)), model.element((2,)),
               model.element((-2,))]
    assert characteristic_index(model, support) == 2

    trivial_actions = [Automorphism.identity(FiniteGroup.cyclic(3))] * 2
    direct = SemidirectOracle(2, FiniteGroup.cyclic(3), trivial_actions)
    support = [direct.element((1,)), direct.element((2,))]
    assert characteristic_index(direct, support) == 1


def test_characteristic_index_z5():
    z5 = FiniteGroup.cyclic(5)
    doubling = cyclic_automorphism(5, 2)  # order 4 in Aut(Z/5)
    model = SemidirectOracle(2, z5, [doubling, Automorphism.identity(z5)])
    assert characteristic_index(model, [model.element((1,))]) == 4


def test_bad_automorphism_rejected():
    z3 = FiniteGroup.cyclic(3)
    with pytest.raises(InputError):
        closure_order([Automorphism((0, 0, 0))], z3)
    with pytest.raises(InputError):
        closure_order([Automorphism((1, 0, 2))], z3)  # does not fix identity


# ---------------------------------------------------------------------------
# Stabilizer census.


def test_stab_census_examples():
    a10 = W.power((1,), 10)
    assert stab_census(a10, 0, rank=2) == 1
    assert stab_census(a10, 2, rank=2) == 5
    assert stab_census(a10, 0, rank=2, torsion_order=3) == 3


def test_stab_census_monotone_and_cap():
    rng = random.Random(31)
    for _ in range(20):
        w = _random_word(rng, 10)
        counts = [stab_census(w, K, rank=2) for K in range(4)]
        assert counts == sorted(counts)
    with pytest.raises(ResourceError):
        stab_census((1,), 5, rank=2, cap=4)


# ---------------------------------------------------------------------------
# Axis overlaps and the fellow-travelling constant.


def test_axis_overlap_examples():
    res = axis_overlap_delta(W.str_to_word("ab"), 4)
    assert res.value == 0 and res.certified
    res = axis_overlap_delta(W.str_to_word("aab"), 6)
    assert res.value == 1 and res.certified
    res = axis_overlap_delta(W.str_to_word("aa"), 5)
    assert res.value == 0 and res.certified
    with pytest.raises(InputError):
        axis_overlap_delta((), 3)


def test_fellow_traveling_examples():
    assert fellow_traveling_delta(W.str_to_word("ab")) == 0
    assert fellow_traveling_delta(W.str_to_word("aab")) == 1
    assert fellow_traveling_delta(W.power(W.str_to_word("ab"), 10)) == 0
    assert fellow_traveling_delta(W.str_to_word("aa")) == 0


def _overlap_oracle(w, h, radius):
    """Independent overlap oracle: the axis is the min-displacement set."""
    tau = W.translation_length(w)
    conj = W.multiply(W.multiply(h, w), W.invert(h))
    ours, theirs = [], []
    for v in W.ball_words(2, radius):
        vinv = W.invert(v)
        if len(W.multiply(W.multiply(vinv, w), v)) == tau:
            ours.append(v)
        if len(W.multiply(W.multiply(vinv, conj), v)) == tau:
            theirs.append(v)
    shared = set(ours) & set(theirs)
    if not shared:
        return 0
    return max(
        len(W.multiply(W.invert(v1), v2)) for v1 in shared for v2 in shared
    )


def test_line_overlap_against_min_displacement_oracle():
    from hypwalk.freegroup import _in_axis_stabilizer, _line_overlap

    rng = random.Random(41)
    checked = 0
    while checked < 20:
        w = ()
        while W.translation_length(w) == 0:
            w = _random_word(rng, 6)
        h = _random_word(rng, 4)
        prefix, core = W.cyclic_reduce(w)
        root = W.primitive_root(core)
        if not h or _in_axis_stabilizer(h, prefix, root):
            continue
        radius = len(w) + len(h) + 6
        expected = _overlap_oracle(w, h, radius)
        assert _line_overlap(prefix, core, h) == expected
        checked += 1


def test_fellow_traveling_matches_ball_search():
    rng = random.Random(43)
    for _ in range(12):
        w = ()
        while not (1 <= W.translation_length(w) <= 4):
            w = _random_word(rng, 5)
        exact = fellow_traveling_delta(w)
        _, core = W.cyclic_reduce(w)
        radius = len(core) + exact + 2
        searched = axis_overlap_delta(w, radius)
        assert searched.certified
        assert searched.value == exact


# ---------------------------------------------------------------------------
# Exact shadow measure.


def test_exact_shadow_measure_values():
    assert exact_shadow_measure(1, 2) == Fraction(1, 4)
    assert exact_shadow_measure(2, 2) == Fraction(1, 12)
    assert exact_shadow_measure(0, 2) == Fraction(1)
    with pytest.raises(UnsupportedError):
        exact_shadow_measure(1, 2, uniform=False)


def test_shadow_measure_partition_identity():
    # Depth-m cylinders partition the boundary.
    for rank in (2, 3):
        for m in range(1, 5):
            count = 2 * rank * (2 * rank - 1) ** (m - 1)
            assert count * exact_shadow_measure(m, rank) == 1
