import pytest

from qbundle.catalogue import cyclic_group, symmetric_group_3
from qbundle.fodc import (Fodc, GeneratorNotInKerEps, NotAdInvariant, NotConjugationClosed, close_right_ideal,
                          corrupted_pi, ker2_ideal, ker_eps_basis, module_action, quantum_lie_bracket,
                          reflection_fodc, verify_germ_identities)
from qbundle.hopf import FunctionAlgebra, LaurentAlgebra
from qbundle.linalg import S, Vec

TRANSPOSITIONS = ["(12)", "(13)", "(23)"]


@pytest.fixture(scope="module")
def laurent():
    L = LaurentAlgebra((-3, 3))
    return L, Fodc(ker2_ideal(L))


@pytest.fixture(scope="module")
def s3():
    G = symmetric_group_3()
    return G, reflection_fodc(G, TRANSPOSITIONS)


def test_right_ideal_examples():
    H = FunctionAlgebra(cyclic_group(2))
    assert close_right_ideal(H, []).dim == 0
    trivial = close_right_ideal(H, [H.delta("g")])
    assert trivial.dim == 1
    assert all(trivial.contains(v) for v in ker_eps_basis(H))
    with pytest.raises(GeneratorNotInKerEps):
        close_right_ideal(H, [H.delta("e")])


def test_laurent_square_generator_gives_ker2():
    L = LaurentAlgebra((-3, 3))
    g = L.z(2) - L.z(1) * 2 + L.z(0)
    R = close_right_ideal(L, [g])
    K = ker2_ideal(L)
    assert R.dim == K.dim
    assert all(K.contains(v) for v in R.closure_basis)


def test_non_ad_invariant_ideal_is_rejected():
    G = symmetric_group_3()
    H = FunctionAlgebra(G)
    with pytest.raises(NotAdInvariant):
        close_right_ideal(H, [H.delta("(12)")])


def test_laurent_germs(laurent):
    L, F = laurent
    assert F.germs.dim == 1
    pz = F.pi(L.z(1))
    for n in range(-3, 4):
        assert F.pi(L.z(n)) == pz * n
    assert F.pi(L.z(2) + L.z(1)) == pz * 3
    assert not F.pi(L.unit())


def test_z2_ker2_has_no_germs():
    H = FunctionAlgebra(cyclic_group(2))
    assert Fodc(ker2_ideal(H)).germs.dim == 0


def test_germ_identities(laurent, s3):
    assert verify_germ_identities(laurent[1]).passed
    assert verify_germ_identities(s3[1]).passed


def test_corrupted_pi_fails_at_unit(laurent):
    _, F = laurent
    c = verify_germ_identities(F, corrupted_pi(F)).by_name("ker-pi")
    assert not c.passed
    assert c.witness == "1"


def test_laurent_ad_action_and_bracket(laurent):
    L, F = laurent
    pz = F.pi(L.z(1))
    assert F.ad(pz) == Vec.unit((1, 0))
    assert not F.ad(Vec())
    for n in range(-3, 3):
        assert module_action(F, pz, L.z(n)) == pz
    assert not quantum_lie_bracket(F, pz)


def test_s3_ad_is_conjugation(s3):
    G, F = s3
    for sigma in TRANSPOSITIONS:
        # Ad(δ_σ) = Σ_{abc=σ} δ_b ⊗ δ_{a⁻¹}δ_c = Σ_h δ_{hσh⁻¹} ⊗ δ_h
        want = Vec({(G.mul(G.mul(h, sigma), G.inv(h)), h): 1 for h in G.elements})
        assert F.ad(Vec.unit(sigma)) == want
    assert quantum_lie_bracket(F, Vec.unit("(12)"))


def test_z2_universal_action():
    H = FunctionAlgebra(cyclic_group(2))
    F = Fodc(close_right_ideal(H, []))
    theta = F.pi(H.delta("g"))
    assert module_action(F, theta, H.delta("g")) == theta
    assert module_action(F, theta, H.unit()) == theta


def test_reflection_calculus_dimensions():
    Z2 = cyclic_group(2)
    assert reflection_fodc(Z2, ["g"]).germs.dim == 1
    assert reflection_fodc(symmetric_group_3(), TRANSPOSITIONS).germs.dim == 3
    with pytest.raises(NotConjugationClosed):
        reflection_fodc(symmetric_group_3(), ["(12)"])


def test_germ_star_on_laurent(laurent):
    L, F = laurent
    pz = F.pi(L.z(1))
    assert F.germ_star(pz) == pz * S(-1)
