import pytest
from hypothesis import given, settings, strategies as st

from qbundle.catalogue import (UnsupportedGroup, catalogue_group, coefficient_rank, cyclic_group, decompose_regular,
                               dihedral_group_4, find_isomorphism, list_catalogue, parse_group_spec,
                               symmetric_group_3)
from qbundle.hopf import (Corepresentation, FiniteGroup, FunctionAlgebra, InvalidGroup, LaurentAlgebra,
                          TruncationOverflow, character_corep, check_corepresentation, hopf_axiom_checks,
                          trivial_corep)
from qbundle.linalg import I, ONE, S, Vec


@pytest.fixture(scope="module")
def z2():
    return FunctionAlgebra(cyclic_group(2))


def test_z2_coproduct_and_antipode(z2):
    assert z2.coproduct(z2.delta("g")) == Vec({("e", "g"): 1, ("g", "e"): 1})
    assert z2.antipode(z2.delta("g")) == z2.delta("g")


@pytest.mark.parametrize("name", ["Z2", "Z3", "Z4", "S3", "D4"])
def test_function_algebra_axioms(name):
    H = FunctionAlgebra(catalogue_group(name))
    failed = [c for c in hopf_axiom_checks(H) if not c.passed]
    assert not failed


def test_counit_after_antipode_on_s3():
    H = FunctionAlgebra(symmetric_group_3())
    for g in H.basis:
        assert H.counit(H.antipode(Vec.unit(g))) == H.counit(Vec.unit(g))


def test_laurent_group_like_and_window():
    L = LaurentAlgebra((-5, 5))
    assert L.coproduct(L.z(1)) == Vec.unit((1, 1))
    assert L.antipode(L.z(3)) == L.z(-3)
    with pytest.raises(TruncationOverflow):
        L.mul(L.z(3), L.z(4))
    assert not [c for c in hopf_axiom_checks(L) if not c.passed]


def test_adjoint_coaction():
    L = LaurentAlgebra((-5, 5))
    assert L.adjoint(L.unit()) == Vec.unit((0, 0))
    assert L.adjoint(L.z(1)) == Vec.unit((1, 0))
    H = FunctionAlgebra(cyclic_group(2))
    assert H.adjoint(H.delta("g")) == Vec({("g", "e"): 1, ("g", "g"): 1})


def test_corepresentation_checks():
    L = LaurentAlgebra((-5, 5))
    assert check_corepresentation(L, trivial_corep(L)).passed
    assert check_corepresentation(L, character_corep(L, 1)).passed
    bad = Corepresentation(L, [[L.z(1) + L.z(0)]], "z+1")
    report = check_corepresentation(L, bad)
    assert not report.by_name("corep-coassociativity").passed


@pytest.mark.parametrize("name, sizes", [("Z2", [1, 1]), ("S3", [1, 1, 2]), ("D4", [1, 1, 1, 1, 2])])
def test_regular_decomposition(name, sizes):
    G = catalogue_group(name)
    H = FunctionAlgebra(G)
    coreps = decompose_regular(G, H)
    assert sorted(c.dim for c in coreps) == sizes
    count, rank = coefficient_rank(H, coreps)
    assert count == rank == len(G.elements)
    for c in coreps:
        assert check_corepresentation(H, c).passed


def test_z4_needs_gaussian_scalars():
    G = catalogue_group("Z4")
    values = {c.matrix_at("g")[0][0] for c in decompose_regular(G)}
    assert I in values and -I in values


def test_invalid_group_table():
    with pytest.raises(InvalidGroup):
        FiniteGroup(["e", "a"], {("e", "e"): "e", ("e", "a"): "a", ("a", "e"): "a", ("a", "a"): "a"})


def test_group_spec_parsing_and_isomorphism():
    G = parse_group_spec("""
        name: C2
        elements: 1 t
        table:
          1 t
          t 1
    """)
    assert G.name == "C2"
    assert find_isomorphism(G, cyclic_group(2)) == {"1": "e", "t": "g"}
    assert find_isomorphism(G, cyclic_group(3)) is None
    assert [c.dim for c in decompose_regular(G)] == [1, 1]


def test_catalogue_listing():
    lines = list_catalogue()
    assert "group Z2 order=2" in lines
    assert "corep S3:std2 dim=2" in lines
    assert "root-system A2" in lines
    assert lines == list_catalogue()
    with pytest.raises(UnsupportedGroup):
        catalogue_group("A5")


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(dihedral_group_4().elements), st.sampled_from(dihedral_group_4().elements))
def test_d4_inverse_of_product(a, b):
    G = dihedral_group_4()
    assert G.inv(G.mul(a, b)) == G.mul(G.inv(b), G.inv(a))


def test_star_on_laurent_is_inverse():
    L = LaurentAlgebra((-5, 5))
    assert L.star(L.z(2) * S(I)) == L.z(-2) * S(-I)
    assert L.counit(L.z(4)) == ONE
