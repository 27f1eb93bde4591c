import pytest

from qbundle.catalogue import cyclic_group, symmetric_group_3
from qbundle.envelope import Envelope
from qbundle.fodc import Fodc, close_right_ideal, reflection_fodc
from qbundle.hopf import FunctionAlgebra
from qbundle.linalg import Vec
from qbundle.qpb import (BalancedTensor, BundleCalculus, NotFree, TranslationMap, build_finite_bundle,
                         build_intertwiners, build_u1_example, connection_checks, intertwiner_checks,
                         left_mul, multi_orbit_bundle, point4_sign, qtrs0_by_solving, qtrs0_from_intertwiners,
                         regular_bundle, right_mul, trivial_connection, u1_base_checks, verify_calculus,
                         verify_qpb, verify_qtrs_properties)


def pairs(x: Vec, y: Vec) -> Vec:
    return Vec({((a, ()), (b, ())): c * d for a, c in x.items() for b, d in y.items()})


@pytest.fixture(scope="module")
def z2():
    G = cyclic_group(2)
    H = FunctionAlgebra(G)
    Q = regular_bundle(G, H)
    C = BundleCalculus(Q, Envelope(Fodc(close_right_ideal(H, [])), 2))
    return G, H, Q, C


@pytest.fixture(scope="module")
def u1():
    Q, C = build_u1_example(6, 2)
    return Q, C


def test_regular_bundle_has_trivial_base(z2):
    _, _, Q, C = z2
    assert verify_qpb(Q).passed
    assert Q.base == [Vec({"e": 1, "g": 1})]
    assert len(C.base_forms(0)) == 1


def test_two_orbit_base_is_two_dimensional():
    G = cyclic_group(2)
    Q = multi_orbit_bundle(G, 2)
    assert verify_qpb(Q).passed
    assert len(Q.base) == 2


def test_fixed_point_is_not_free():
    G = cyclic_group(2)
    action = {("a", "e"): "a", ("a", "g"): "a", ("b", "e"): "b", ("b", "g"): "b"}
    with pytest.raises(NotFree) as err:
        build_finite_bundle(["a", "b"], G, action)
    assert "'a'" in err.value.witness
    assert "contains 'g'" in str(err.value)


def test_u1_base_forms(u1):
    _, C = u1
    report = u1_base_checks(C)
    assert report.passed
    assert report.by_name("base-forms-not-generated").passed


def test_u1_horizontal_forms_fill_degree_one(u1):
    _, C = u1
    assert len(C.horizontal_forms(0)) == len(C.basis(0))
    assert len(C.horizontal_forms(1)) == len(C.basis(1))


def test_intertwiners_on_z2_bundles(z2):
    _, _, Q, _ = z2
    triv, sign = Q.coreps
    fam = build_intertwiners(Q, triv)
    assert fam.size == 1 and fam.x(0, 0) == Q.hor.unit()
    fam = build_intertwiners(Q, sign)
    assert fam.size == 1
    assert fam.x(0, 0) == Vec({"e": 1, "g": -1})
    assert intertwiner_checks(fam).passed
    Q2 = multi_orbit_bundle(cyclic_group(2), 2)
    fam2 = build_intertwiners(Q2, Q2.coreps[1])
    assert fam2.size == 2
    assert intertwiner_checks(fam2).passed


@pytest.mark.parametrize("name", ["S3", "D4", "Z3", "Z4"])
def test_intertwiner_generators_on_catalogue(name):
    from qbundle.catalogue import catalogue_group
    G = catalogue_group(name)
    for copies in (1, 2):
        Q = multi_orbit_bundle(G, copies)
        for V in Q.coreps:
            assert intertwiner_checks(build_intertwiners(Q, V)).passed, V.name


def test_translation_map_degree_zero(z2, u1):
    _, H, Q, C = z2
    T = TranslationMap(C)
    assert T.on_h("e") + T.on_h("g") == pairs(Q.hor.unit(), Q.hor.unit())
    g = Vec({"e": 1, "g": -1})
    assert T.on_h("e") - T.on_h("g") == pairs(g, g)
    Qu, Cu = u1
    Tu = TranslationMap(Cu)
    z = lambda n: Vec.unit((n, ()))
    assert Tu.on_h(1) == pairs(z(-1), z(1))


def test_calculus_and_qtrs_on_z2(z2):
    _, _, _, C = z2
    assert verify_calculus(C).passed
    assert connection_checks(C, trivial_connection(C)).passed
    report = verify_qtrs_properties(C, TranslationMap(C), 2)
    assert report.passed, [c for c in report.checks if not c.passed]


def test_qtrs_on_two_orbit_s3_reflection_bundle():
    G = symmetric_group_3()
    H = FunctionAlgebra(G)
    Q = multi_orbit_bundle(G, 2, H)
    C = BundleCalculus(Q, Envelope(reflection_fodc(G, ["(12)", "(13)", "(23)"], H), 2))
    report = verify_qtrs_properties(C, TranslationMap(C), 1)
    assert report.passed, [c for c in report.checks if not c.passed]


def test_qtrs0_routes_agree_on_s3():
    G = symmetric_group_3()
    H = FunctionAlgebra(G)
    Q = regular_bundle(G, H)
    C = BundleCalculus(Q, Envelope(Fodc(close_right_ideal(H, [])), 2))
    bal = BalancedTensor(C, 0)
    for h in G.elements:
        a = qtrs0_from_intertwiners(Q, Vec.unit(h))
        b = qtrs0_by_solving(C, Vec.unit(h))
        assert bal.equal(a, b)


def test_point4_sign_is_plus_on_u1(u1):
    _, C = u1
    bal = BalancedTensor(C, 2, {k: [key for key in C.basis(k) if abs(key[0][0]) <= 4] for k in range(3)})
    mu = C.base_forms(1)[0]
    T = TranslationMap(C)
    assert [point4_sign(C, T, bal, (n, ()), mu) for n in (-1, 1, 2)] == [1, 1, 1]


def test_balanced_tensor_moves_base_elements(z2):
    _, _, Q, C = z2
    bal = BalancedTensor(C, 0)
    b = C.base_forms(0)[0]
    x, y = Vec.unit(("e", ())), Vec.unit(("g", ()))
    t = Vec({(p, q): c * d for p, c in C.mul(x, b).items() for q, d in y.items()})
    s = Vec({(p, q): c * d for p, c in x.items() for q, d in C.mul(b, y).items()})
    assert bal.equal(t, s)
    assert not bal.equal(t, -s) or not t
    assert left_mul(C, C.unit(), t) == t and right_mul(C, t, C.unit()) == t
