from itertools import product

import pytest

from qbundle.catalogue import cyclic_group, symmetric_group_3
from qbundle.envelope import Envelope, ideal_generator, maurer_cartan, verify_envelope, verify_hopf_structure
from qbundle.fodc import Fodc, close_right_ideal, ker2_ideal, reflection_fodc
from qbundle.hopf import FunctionAlgebra, LaurentAlgebra
from qbundle.linalg import Echelon, Vec, VectorSpace

T = ["(12)", "(13)", "(23)"]


@pytest.fixture(scope="module")
def laurent_env():
    L = LaurentAlgebra((-3, 3))
    return L, Envelope(Fodc(ker2_ideal(L)), 3)


@pytest.fixture(scope="module")
def s3_env():
    G = symmetric_group_3()
    return G, Envelope(reflection_fodc(G, T), 3)


def test_laurent_antisymmetrization(laurent_env):
    L, E = laurent_env
    g = L.z(2) - L.z(1) * 2 + L.z(0)
    assert ideal_generator(E.fodc, g) == Vec.unit((1, 1), 2)
    assert E.dims() == [1, 1, 0, 0]


def test_commutative_product_generator():
    # g = ab with a, b in Ker ε gives π(b)⊗π(a) + π(a)⊗π(b)
    L = LaurentAlgebra((-3, 3))
    F = Fodc(ker2_ideal(L))
    a = L.z(1) - L.z(0)
    b = L.z(-1) - L.z(0)
    pa, pb = F.pi(a), F.pi(b)
    want = Vec({(s, t): c * d for s, c in pb.items() for t, d in pa.items()}) + \
        Vec({(s, t): c * d for s, c in pa.items() for t, d in pb.items()})
    assert ideal_generator(F, L.mul(a, b)) == want
    assert want == Vec.unit((1, 1), -2)


def test_laurent_structure_maps(laurent_env):
    _, E = laurent_env
    pz = E.germ(Vec.unit(1))
    assert E.coproduct(pz) == Vec({((0, ()), (0, (1,))): 1, ((0, (1,)), (0, ())): 1})
    assert E.antipode(pz) == -pz
    assert E.counit(pz) == 0
    assert not E.d(pz)
    assert E.antipode(E.unit()) == E.unit()


def test_universal_z2_has_no_relations():
    H = FunctionAlgebra(cyclic_group(2))
    E = Envelope(Fodc(close_right_ideal(H, [])), 3)
    assert E.germs.relations == []
    assert E.dims() == [1, 1, 1, 1]


def _hand_relations():
    """Σ_{στ = ρ} θ_σ ⊗ θ_τ for the two 3-cycles ρ (π kills rotations, π(δ_e) = −Σθ)."""
    G = symmetric_group_3()
    out = []
    for rho in ("(123)", "(132)"):
        out.append(Vec({(s, t): 1 for s, t in product(T, T) if G.mul(s, t) == rho}))
    return out


def test_s3_relations_and_dimensions(s3_env):
    _, E = s3_env
    rels = _hand_relations()
    words2 = list(product(T, T))
    space2 = VectorSpace(words2)
    assert Echelon(space2.to_row(v) for v in E.germs.relations).rows() == \
        Echelon(space2.to_row(v) for v in rels).rows()
    words3 = list(product(T, T, T))
    space3 = VectorSpace(words3)
    ideal3 = Echelon()
    for r in rels:
        for t in T:
            ideal3.add(space3.to_row(Vec({w + (t,): c for w, c in r.items()})))
            ideal3.add(space3.to_row(Vec({(t,) + w: c for w, c in r.items()})))
    assert E.dims() == [1, 3, 9 - 2, 27 - ideal3.rank]


def test_s3_maurer_cartan_by_hand(s3_env):
    _, E = s3_env
    th = {t: E.germ(Vec.unit(t)) for t in T}
    want = E.mul(th["(12)"], th["(12)"]) * 2 - E.mul(th["(13)"], th["(23)"]) - E.mul(th["(23)"], th["(13)"])
    assert E.d(th["(12)"]) == want
    assert maurer_cartan(E, Vec.unit("(12)")) == want


def test_envelope_laws(laurent_env, s3_env):
    assert verify_envelope(laurent_env[1]).passed
    report = verify_envelope(s3_env[1])
    assert report.passed, [c for c in report.checks if not c.passed]


def test_hopf_structure_on_universal_z3():
    H = FunctionAlgebra(cyclic_group(3))
    E = Envelope(Fodc(close_right_ideal(H, [])), 2)
    assert verify_hopf_structure(E).passed


def test_module_action_on_words(s3_env):
    # θ_σθ_τ ∘ δ_h = δ_{h,στ} θ_σθ_τ
    G, E = s3_env
    x = E.germs.project(Vec.unit(("(12)", "(13)")))
    assert E.module_action(x, E.hopf.unit()) == x
    assert E.module_action(x, E.hopf.delta(G.mul("(12)", "(13)"))) == x
    assert not E.module_action(x, E.hopf.delta(G.identity))
