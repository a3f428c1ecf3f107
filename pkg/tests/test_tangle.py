import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shadelift.grouppa import GENERATORS
from shadelift.tangle import (
    Tangle,
    TangleError,
    TangleParseError,
    compose,
    compose_shaded,
    forget,
    iter_all_colorings,
    parse_tangle,
    random_closure,
    random_connected_tangle,
    random_tangle,
    regions_and_signs,
    reverse_shading,
    shade,
)

ID4 = Tangle([4, 4], [((0, j), (1, j)) for j in range(4)])
ID2 = Tangle([2, 2], [((0, 0), (1, 0)), ((0, 1), (1, 1))])
# two through-strands, no input disk
TL_ID = Tangle([4], [((0, 0), (0, 3)), ((0, 1), (0, 2))])
F = GENERATORS["rotation_left"]


def rotation(clicks):
    return Tangle([4, 4], [((0, j), (1, (j + clicks) % 4)) for j in range(4)])


def is_checkerboard(t, colors):
    return all(colors[a] != colors[b] for a, b in t.strand_sides())


# -- validation ---------------------------------------------------------------


def test_valid_identity():
    assert ID4.validate().ok
    assert ID2.validate().ok


@pytest.mark.parametrize(
    "points, arcs, kind",
    [
        ([2], [], "dangling"),
        ([4], [((0, 0), (0, 2)), ((0, 1), (0, 3))], "nonplanar"),
        ([3], [((0, 0), (0, 1))], "odd"),
        ([0, 2, 2], [((1, 0), (1, 1)), ((2, 0), (2, 1))], "disconnected"),
        ([4], [((0, 0), (0, 1)), ((0, 0), (0, 3))], "repeated"),
    ],
)
def test_violations(points, arcs, kind):
    t = Tangle(points, arcs)
    rep = t.validate()
    assert not rep.ok
    assert kind in rep.kinds()
    with pytest.raises(TangleError):
        shade(t)


def test_bad_reference_rejected():
    with pytest.raises(TangleError):
        Tangle([2], [((0, 0), (5, 1))])


# -- shading ------------------------------------------------------------------


def test_shade_identity():
    S = shade(ID4)
    regions, signs = regions_and_signs(S)
    assert signs == ("+", "+")
    assert len(regions) == 4
    assert sorted(s for _, s in regions) == [False, False, True, True]
    assert reverse_shading(S).signs == ("-", "-")


def test_shade_temperley_lieb_identity():
    regions, signs = regions_and_signs(shade(TL_ID))
    assert len(regions) == 3
    assert signs == ("+",)
    # the middle region (between the strands) is the only shaded one
    assert sum(s for _, s in regions) == 1


def test_shade_rotation_sign():
    assert shade(F).signs == ("+", "-")
    assert shade(GENERATORS["rotation_right"]).signs == ("+", "-")


def test_shade_empty_and_loop():
    regions, signs = regions_and_signs(shade(Tangle([0])))
    assert len(regions) == 1 and signs == ("+",) and regions[0][1] is False
    regions, _ = regions_and_signs(shade(Tangle([0], loops=1)))
    assert [s for _, s in regions] == [False, True]


def test_odd_boundary_not_shadeable():
    with pytest.raises(TangleError):
        shade(Tangle([2, 1, 1], [((0, 0), (1, 0)), ((0, 1), (2, 0))]))


def test_forget():
    assert forget(shade(ID4)) == ID4
    assert forget(reverse_shading(shade(F))) == F


# -- composition --------------------------------------------------------------


def test_identity_absorbs():
    assert compose(ID4, 1, ID4) == ID4
    assert compose(ID2, 1, ID2) == ID2
    for name, t in GENERATORS.items():
        k = t.k0
        idk = Tangle([k, k], [((0, j), (1, j)) for j in range(k)]) if k else None
        if idk is not None:
            assert compose(idk, 1, t) == t, name
        for i in range(1, t.num_inputs + 1):
            m = t.points[i]
            if m:
                assert compose(t, i, Tangle([m, m], [((0, j), (1, j)) for j in range(m)])) == t, name


def test_rotation_squared():
    assert compose(F, 1, F) == rotation(-2)
    assert compose(rotation(1), 1, rotation(-1)) == ID4
    assert compose(compose(F, 1, F), 1, compose(F, 1, F)) == ID4


def test_cap_cup_makes_loop():
    cap = Tangle([0, 2], [((1, 0), (1, 1))], regions=[[(0, 0), (1, 0)]])
    cup = Tangle([2], [((0, 0), (0, 1))])
    W = compose(cap, 1, cup)
    assert W == Tangle([0], loops=1)
    assert W.num_loops == 1


def test_compose_errors():
    with pytest.raises(TangleError):
        compose(ID4, 1, ID2)
    with pytest.raises(TangleError):
        compose(ID4, 2, ID4)


def test_renumbering_order():
    mult = GENERATORS["multiplication"]
    W = compose(mult, 1, mult)
    assert W.num_inputs == 3
    # U's disk 2 ends up last; V's disks take positions 1 and 2
    W2 = compose(mult, 2, mult)
    assert W2.num_inputs == 3
    # multiplication is associative as a tangle
    assert W == W2


# -- random tangles -------------------------------------------------------------

randoms = st.randoms(use_true_random=False)


@settings(max_examples=60, deadline=None)
@given(randoms)
def test_random_tangles_valid_and_round_trip(rng):
    t = random_tangle(rng)
    assert t.validate().ok
    assert t.num_inputs <= 4 and sum(t.points) <= 12
    assert Tangle.from_json(json.loads(json.dumps(t.to_json()))) == t
    assert parse_tangle(t.to_dsl()) == t


@settings(max_examples=60, deadline=None)
@given(randoms)
def test_exactly_two_colorings(rng):
    t = random_tangle(rng)
    good = [c for c in iter_all_colorings(t) if is_checkerboard(t, c)]
    assert len(good) == 2
    S = shade(t)
    assert {tuple(S.shades), tuple(S.op().shades)} == set(good)


@settings(max_examples=60, deadline=None)
@given(randoms)
def test_reverse_shading_properties(rng):
    S = shade(random_tangle(rng))
    R = reverse_shading(S)
    assert reverse_shading(R) == S
    assert S.signs[0] == "+"
    assert all(a != b for a, b in zip(S.signs, R.signs))
    assert shade(forget(R)) in (R, R.op())
    assert forget(R) == forget(S)


def _inner(rng, k):
    if k == 0:
        U = random_connected_tangle(rng)
        return compose(random_closure(rng, U.k0), 1, U)
    while True:
        V = random_tangle(rng)
        if V.k0 == k:
            return V


@settings(max_examples=60, deadline=None)
@given(randoms)
def test_shading_case_rule(rng):
    U = random_tangle(rng)
    if not U.num_inputs:
        return
    i = rng.randint(1, U.num_inputs)
    V = _inner(rng, U.points[i])
    SU, SV = shade(U), shade(V)
    expected = compose_shaded(SU, i, SV if SU.sign(i) == "+" else SV.op())
    assert shade(compose(U, i, V)) == expected


def test_compose_shaded_rejects_mismatch():
    S = shade(F)  # disk 1 is "-"
    with pytest.raises(TangleError):
        compose_shaded(S, 1, shade(ID4))


@settings(max_examples=40, deadline=None)
@given(randoms)
def test_composition_associative(rng):
    U = random_connected_tangle(rng)
    if not U.num_inputs:
        return
    i = rng.randint(1, U.num_inputs)
    V = _inner(rng, U.points[i])
    if not V.num_inputs:
        return
    jv = rng.randint(1, V.num_inputs)
    W = _inner(rng, V.points[jv])
    lhs = compose(compose(U, i, V), i + jv - 1, W)
    rhs = compose(U, i, compose(V, jv, W))
    assert lhs == rhs


def test_seeded_generation_is_deterministic():
    a = [random_tangle(random.Random(7)) for _ in range(3)]
    b = [random_tangle(random.Random(7)) for _ in range(3)]
    assert a == b


# -- text format ----------------------------------------------------------------


def test_parse_dsl():
    text = """
    # the 1-click rotation
    disk 0 points 4 star 0
    disk 1 points 4 star 0
    arc 0.0 1.3
    arc 0.1 1.0
    arc 0.2 1.1
    arc 0.3 1.2
    """
    assert parse_tangle(text) == F


def test_parse_star_relabels():
    # moving the inner star by one click while rotating arcs the other way is the identity
    text = "disk 0 points 4 star 0\ndisk 1 points 4 star 1\n" + "\n".join(
        f"arc 0.{j} 1.{(j + 1) % 4}" for j in range(4)
    )
    assert parse_tangle(text) == ID4


def test_parse_loops():
    assert parse_tangle("disk 0 points 0 star 0\nloops 2\n") == Tangle([0], loops=2)


@pytest.mark.parametrize(
    "text, line, col",
    [
        ("disk 0 points 2 star 0\narc 0.0 0.x\n", 2, 9),
        ("disk 0 points 2 star 0\nfoo\n", 2, 1),
        ("disk 0 points two star 0\n", 1, 15),
        ("disk 0 points 2 star 0\n  loops\n", 2, 3),
        ("disk 0 points 2 star 0\narc 0.0 0.7\n", 2, 1),
        ("disk 0 points 2 star 0\nloop 0.0 x\n", 2, 10),
    ],
)
def test_parse_errors(text, line, col):
    with pytest.raises(TangleParseError) as exc:
        parse_tangle(text)
    assert (exc.value.line, exc.value.col) == (line, col)


def test_json_schema():
    data = F.to_json()
    assert set(data) >= {"disks", "arcs"}
    assert Tangle.from_json(data) == F
