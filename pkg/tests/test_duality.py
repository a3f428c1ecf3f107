import itertools
import json
from fractions import Fraction

import numpy as np
import pytest

import oracles
from shadelift.duality import (
    Bicharacter,
    BicharacterError,
    SelfDuality,
    all_bicharacters,
    bichar_enumerate_classify,
    bichar_props,
    check_functoriality,
    check_symmetric_duality,
    chi_from_phi,
    functoriality_suite,
    generator_terms,
    lift_action,
    parse_inline_chi,
    phi_from_chi,
    psi_identity_holds,
    verify_star_iso,
)
from shadelift.groups import AbelianGroup
from shadelift.grouppa import GENERATORS, P, Q, box_mul, calibrate, state_sum_eval
from shadelift.tangle import compose, shade

Z2, Z3, Z4, K4 = AbelianGroup([2]), AbelianGroup([3]), AbelianGroup([4]), AbelianGroup([2, 2])

# (total, symmetric, non-degenerate, symmetric non-degenerate, orbits, |Aut|), from oracles.py
FROZEN = {
    (2,): (2, 2, 1, 1, 1, 1),
    (4,): (4, 4, 2, 2, 2, 2),
    (2, 2): (16, 8, 6, 4, 2, 6),
    (3,): (3, 3, 2, 2, 2, 2),
}


def chi1(A, q):
    return Bicharacter(A, [[Fraction(q)]])


# -- bicharacters ---------------------------------------------------------------


def test_props_examples():
    p = bichar_props(chi1(Z2, 0))
    assert p.is_symmetric and not p.is_nondegenerate
    p = bichar_props(chi1(Z2, Fraction(1, 2)))
    assert p.is_symmetric and p.is_nondegenerate
    p = bichar_props(chi1(Z4, Fraction(1, 4)))
    assert p.is_symmetric and p.is_nondegenerate
    p = bichar_props(chi1(Z4, Fraction(1, 2)))
    assert p.is_symmetric and not p.is_nondegenerate


def test_ill_defined_phase_rejected():
    with pytest.raises(BicharacterError):
        chi1(Z2, Fraction(1, 4))
    with pytest.raises(BicharacterError):
        Bicharacter(K4, [[0, 0]])


@pytest.mark.parametrize("factors", list(FROZEN), ids=str)
def test_counts_frozen(factors):
    A = AbelianGroup(list(factors))
    total, sym, nd, sn, orbits, aut = FROZEN[factors]
    assert len(bichar_enumerate_classify(A, "all").bicharacters) == total
    assert len(bichar_enumerate_classify(A, "symmetric").bicharacters) == sym
    assert len(bichar_enumerate_classify(A, "nondegenerate").bicharacters) == nd
    cls = bichar_enumerate_classify(A, "symmetric_nondegenerate")
    assert len(cls.bicharacters) == sn
    assert len(cls.orbits) == orbits
    assert len(list(A.automorphisms())) == aut


@pytest.mark.parametrize("factors", [[2], [3], [4], [2, 2], [5], [6]], ids=str)
def test_tables_match_oracle(factors):
    A = AbelianGroup(factors)
    N = A.ring.N
    ours = set()
    for chi in all_bicharacters(A):
        T = chi.table
        ours.add(tuple(Fraction(T[i][j], N) for i in range(A.order) for j in range(A.order)))
    n_or, tables = oracles.bicharacters(factors)
    theirs = {tuple(Fraction(t[(g, h)], n_or) for g in A.elements for h in A.elements) for t in tables}
    assert ours == theirs


def test_orbits_match_oracle():
    for f in ([2, 2], [4], [6]):
        A = AbelianGroup(f)
        _, tables = oracles.bicharacters(f)
        sn = [t for t in tables if oracles.is_symmetric(t) and oracles.is_nondegenerate(f, t)]
        cls = bichar_enumerate_classify(A, "symmetric_nondegenerate")
        assert len(cls.orbits) == oracles.orbit_count(f, sn)


def test_trivial_group():
    A = AbelianGroup([])
    cls = bichar_enumerate_classify(A, "symmetric_nondegenerate")
    assert len(cls.bicharacters) == 1
    phi = phi_from_chi(cls.bicharacters[0])
    assert phi.minus == [[A.ring.one]]
    assert check_symmetric_duality(phi)


def test_bound_and_filter_errors():
    with pytest.raises(ValueError):
        bichar_enumerate_classify(AbelianGroup([2, 2]), "bogus")
    with pytest.raises(ValueError):
        bichar_enumerate_classify(AbelianGroup([4, 4]), "all", bound=8)


def test_representatives_are_lexicographic_minima():
    cls = bichar_enumerate_classify(K4, "symmetric_nondegenerate")
    for orbit in cls.orbits:
        assert orbit[0].key() == min(c.key() for c in orbit)
    assert json.loads(json.dumps(cls.to_json()))["orbit_count"] == 2


def test_inline_parse_and_json():
    chi = parse_inline_chi(K4, "1,2=1/2; 2,1=1/2")
    assert chi.phases == ((0, Fraction(1, 2)), (Fraction(1, 2), 0))
    assert Bicharacter.from_json(json.loads(json.dumps(chi.to_json()))) == chi
    with pytest.raises(BicharacterError):
        parse_inline_chi(K4, "3,1=1/2")
    with pytest.raises(BicharacterError):
        parse_inline_chi(K4, "1-1=1/2")


# -- self-dualities -------------------------------------------------------------


def test_phi_z2():
    phi = phi_from_chi(chi1(Z2, Fraction(1, 2)))
    inv_d = Z2.ring.delta_power(-1)
    assert phi.apply_minus(Q(Z2, 0)) == (P(Z2, 0) + P(Z2, 1)) * inv_d
    assert phi.apply_minus(Q(Z2, 1)) == (P(Z2, 0) - P(Z2, 1)) * inv_d


def test_phi_z3_matches_numeric_oracle():
    chi = chi1(Z3, Fraction(1, 3))
    phi = phi_from_chi(chi)
    M = np.array([[c.to_complex() for c in row] for row in phi.minus])
    _, tables = oracles.bicharacters([3])
    table = next(t for t in tables if t[((1,), (1,))] == 1)
    ref = oracles.phi_minus_matrix([3], table, 3)
    assert np.allclose(M, ref, atol=1e-12)
    assert np.allclose(M @ M.conj().T, np.eye(3), atol=1e-12)


def test_phi_plus_formula():
    chi = Bicharacter(AbelianGroup([3, 3]), [[0, Fraction(1, 3)], [Fraction(2, 3), 0]])
    phi = phi_from_chi(chi)
    A = chi.group
    d = A.ring.delta
    for g, h in itertools.product(range(A.order), repeat=2):
        assert phi.plus[g][h] * d == chi.value(A.elements[g], A.elements[h]).conjugate()


def test_degenerate_rejected():
    with pytest.raises(BicharacterError):
        phi_from_chi(chi1(Z2, 0))


def test_chi_values_at_identity():
    for chi in bichar_enumerate_classify(K4, "nondegenerate").bicharacters:
        back = chi_from_phi(phi_from_chi(chi))
        A = chi.group
        for g in A.elements:
            assert back.value(A.identity, g) == 1
            assert back.value(g, A.identity) == 1


def test_round_trip_k4_all_nondegenerate():
    chars = bichar_enumerate_classify(K4, "nondegenerate").bicharacters
    assert len(chars) == 6
    for chi in chars:
        assert chi_from_phi(phi_from_chi(chi)) == chi


# mutation tests; expected verdicts were brute-forced on the 2-element group


def test_mutation_all_ones_table():
    rep = verify_star_iso(phi_from_chi(chi1(Z2, 0), allow_degenerate=True))
    assert rep.checks == {
        "adjoint": True,
        "trace": False,
        "contragredient": True,
        "multiplication": True,
        "coproduct": False,
    }
    assert not rep.ok and rep.failures


def test_mutation_identity_shaped():
    ring = Z2.ring
    phi = SelfDuality(Z2, [[ring.one, ring.zero], [ring.zero, ring.one]])
    rep = verify_star_iso(phi)
    assert rep.checks == {
        "adjoint": True,
        "trace": False,
        "contragredient": True,
        "multiplication": False,
        "coproduct": False,
    }


def test_mutation_scaled_entry():
    phi = phi_from_chi(chi1(Z3, Fraction(1, 3)))
    minus = [row[:] for row in phi.minus]
    minus[1][2] = minus[1][2] * Z3.ring.zeta(Z3.ring.N // 3)
    rep = verify_star_iso(SelfDuality(Z3, minus))
    assert not rep.ok
    assert not any(rep.checks.values())


def test_chi_from_phi_rejects_non_bicharacter():
    ring = Z2.ring
    phi = SelfDuality(Z2, [[ring.one, ring.zero], [ring.zero, ring.one]])
    with pytest.raises(BicharacterError):
        chi_from_phi(phi)


def test_nonsymmetric_z3xz3():
    A = AbelianGroup([3, 3])
    chi = Bicharacter(A, [[0, Fraction(1, 3)], [Fraction(2, 3), 0]])
    assert chi.is_nondegenerate() and not chi.is_symmetric()
    phi = phi_from_chi(chi)
    assert verify_star_iso(phi).ok
    assert not check_symmetric_duality(phi)
    assert not psi_identity_holds(phi)
    with pytest.raises(BicharacterError):
        lift_action(GENERATORS["identity"], phi, [P(A, (0, 0))])


@pytest.mark.parametrize("A", [Z2, Z3, Z4, K4], ids=repr)
def test_psi_identity_for_symmetric(A):
    for chi in bichar_enumerate_classify(A, "symmetric_nondegenerate").bicharacters:
        assert psi_identity_holds(phi_from_chi(chi))


# -- lifting --------------------------------------------------------------------


@pytest.fixture(scope="module")
def phi_z2():
    return phi_from_chi(chi1(Z2, Fraction(1, 2)))


def test_generator_terms():
    terms = generator_terms()
    assert set(GENERATORS) <= set(terms)
    assert any("@" in name for name in terms)
    for t in terms.values():
        assert t.validate().ok


def test_lift_rotation_uses_phi_plus(phi_z2):
    F = GENERATORS["rotation_left"]
    w = calibrate(Z2).chosen
    for g in Z2.elements:
        x = P(Z2, g)
        lifted = lift_action(F, phi_z2, [x]).to_twobox()
        direct = state_sum_eval(shade(F), [phi_z2.apply_plus(x)], w, group=Z2).to_twobox()
        assert lifted == direct
        assert lifted.side == "+"


def test_lift_multiplication_is_plain(phi_z2):
    mult = GENERATORS["multiplication"]
    assert shade(mult).signs == ("+", "+", "+")
    for g, h in itertools.product(Z2.elements, repeat=2):
        x, y = P(Z2, g), P(Z2, h)
        assert lift_action(mult, phi_z2, [x, y]).to_twobox() == box_mul(x, y)


def test_lift_rotation_squared(phi_z2):
    F = GENERATORS["rotation_left"]
    FF = compose(F, 1, F)
    for g in Z2.elements:
        x = P(Z2, g)
        once = lift_action(F, phi_z2, [x]).to_twobox()
        twice = lift_action(F, phi_z2, [once]).to_twobox()
        assert twice == lift_action(FF, phi_z2, [x]).to_twobox()
    rep = check_functoriality(F, F, 1, phi_z2)
    assert rep.ok and rep.case == "-"


def test_lift_rejects_minus_inputs(phi_z2):
    with pytest.raises(ValueError):
        lift_action(GENERATORS["identity"], phi_z2, [Q(Z2, 0)])


def test_functoriality_identity_case(phi_z2):
    rep = check_functoriality(GENERATORS["multiplication"], GENERATORS["identity"], 1, phi_z2)
    assert rep.ok and rep.case == "+" and rep.checked == 4


def test_functoriality_suite_k4_both_orbits():
    for chi in bichar_enumerate_classify(K4, "symmetric_nondegenerate").representatives:
        rep = functoriality_suite(phi_from_chi(chi), trials=40, seed=3)
        assert rep.ok
        assert rep.cases == {"+": 20, "-": 20}
        assert json.loads(json.dumps(rep.to_json()))["passed"] == 40


def test_functoriality_suite_deterministic(phi_z2):
    a = functoriality_suite(phi_z2, trials=10, seed=5).to_json()
    b = functoriality_suite(phi_z2, trials=10, seed=5).to_json()
    assert a == b


def test_selfduality_json(phi_z2):
    data = json.loads(json.dumps(phi_z2.to_json()))
    assert data["group"] == [2]
    assert len(data["phi_minus"]) == 2 and len(data["phi_plus"]) == 2
