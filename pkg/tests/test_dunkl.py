import re
from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from qbundle.dunkl import (ROOT_SYSTEM_CATALOGUE, DivisibilityFailure, MissingFamily, Multiplicity, Poly,
                           UnsupportedRootSystem, build_dunkl_bundle, build_root_system, bundle_checks,
                           canonical_gauge, canonical_gauge_checks, canonical_gauge_roundtrip, choice_independence,
                           commutator_suite, covariant_derivative, coxeter_group, dunkl_commutator,
                           dunkl_derivative, dunkl_intertwiners, dunkl_property_checks, dunkl_translation_map,
                           hermitian_compatibility, intertwiner_mor_check, monomials_upto, multiplicity_checks,
                           nabla_on_intertwiners, weight_window)
from qbundle.gauge import envelope_keys
from qbundle.linalg import I, S, Vec
from qbundle.qpb import BalancedTensor, connection_checks, point4_sign, verify_qtrs_properties


def to_sympy(p: Poly, xs):
    out = 0
    for a, c in p.terms.items():
        assert not c.r3re and not c.r3im
        term = sp.Rational(c.re.numerator, c.re.denominator) + sp.I * sp.Rational(c.im.numerator, c.im.denominator)
        for x, e in zip(xs, a):
            term *= x ** e
        out += term
    return sp.expand(out)


def sympy_dunkl(RS, kappa, f, xs):
    """Df = ∇f + Σ_{r>0} κ(r)(f − f∘σ_r)/⟨r|x⟩ r, written out with sympy."""
    comps = [sp.diff(f, x) for x in xs]
    for r in RS.positive:
        rx = sum(sp.Rational(c) * x for c, x in zip(r, xs))
        rr = sum(sp.Rational(c) ** 2 for c in r)
        image = [x - 2 * rx / rr * sp.Rational(c) for x, c in zip(xs, r)]
        q = sp.cancel((f - f.subs(dict(zip(xs, image)), simultaneous=True)) / rx)
        k = kappa(r)
        kk = sp.Rational(k.re.numerator, k.re.denominator)
        comps = [a + kk * q * sp.Rational(c) for a, c in zip(comps, r)]
    return [sp.expand(c) for c in comps]


@pytest.fixture(scope="module")
def rank1():
    RS = build_root_system("B", 1)
    return RS, build_dunkl_bundle(RS, Multiplicity(RS, [1]), poly_cap=6, max_degree=2, real=True)


@pytest.mark.parametrize("kind, rank, positive, order", [
    ("A", 1, 1, 2), ("A", 2, 3, 6), ("A", 3, 6, 24), ("B", 1, 1, 2), ("B", 2, 4, 8), ("B", 3, 9, 48),
    ("D", 2, 2, 4), ("D", 3, 6, 24)])
def test_root_system_catalogue(kind, rank, positive, order):
    from qbundle.dunkl import root_system_checks
    RS = build_root_system(kind, rank)
    assert len(RS.positive) == positive
    assert root_system_checks(RS).passed
    W = coxeter_group(RS)
    assert len(W.elements) == order
    assert len(W.reflections) == positive


def test_catalogue_list_and_bounds():
    assert ("A", 2) in ROOT_SYSTEM_CATALOGUE
    with pytest.raises(UnsupportedRootSystem):
        build_root_system("E", 6)
    with pytest.raises(UnsupportedRootSystem):
        build_root_system("A", 9)


def test_a1_positive_root_and_d2_group():
    RS = build_root_system("A", 1)
    assert RS.positive == [(1, -1)]
    W = coxeter_group(build_root_system("D", 2))
    assert all(W.mul(g, g) == W.identity for g in W.elements)


def test_rank_one_examples():
    RS = build_root_system("B", 1)
    x = Poly.var(1, 0)
    for k in (0, 1, Fraction(3, 2)):
        kappa = Multiplicity(RS, [k])
        assert dunkl_derivative(RS, kappa, x * x) == [x * S(2)]
        assert dunkl_derivative(RS, kappa, x) == [Poly.const(1, 1 + 2 * Fraction(k))]


@pytest.mark.parametrize("kind, rank, values", [("A", 2, [1]), ("B", 2, [1, 2]), ("D", 3, [Fraction(1, 2)])])
def test_dunkl_matches_sympy(kind, rank, values):
    RS = build_root_system(kind, rank)
    kappa = Multiplicity(RS, values)
    xs = sp.symbols(f"x1:{RS.dim + 1}")
    for a in monomials_upto(RS.dim, 3)[::3]:
        f = Poly.monomial(a) + Poly.var(RS.dim, 0) * S(2)
        got = [to_sympy(p, xs) for p in dunkl_derivative(RS, kappa, f)]
        assert got == sympy_dunkl(RS, kappa, to_sympy(f, xs), xs)


def test_kappa_zero_is_gradient():
    RS = build_root_system("B", 2)
    zero = Multiplicity(RS, [0, 0])
    for a in monomials_upto(2, 4):
        f = Poly.monomial(a)
        assert dunkl_derivative(RS, zero, f) == f.gradient()


def test_commutativity_a2_and_b2():
    RS = build_root_system("A", 2)
    assert commutator_suite(RS, Multiplicity(RS, 1), 4).passed
    RS = build_root_system("B", 2)
    assert commutator_suite(RS, Multiplicity(RS, [1, 2]), 5).passed


def test_non_invariant_kappa_breaks_commutativity():
    RS = build_root_system("A", 2)
    values = dict(zip(RS.positive, (1, 2, 0)))
    kappa = lambda r: S(values[r])
    xi, eta = (1, 0, 0), (0, 1, 0)
    check = dunkl_commutator(RS, kappa, xi, eta, 3)
    assert not check.passed and check.witness == "(1)*x1*x2"
    # independent confirmation of the witness
    xs = sp.symbols("x1:4")
    f = xs[0] * xs[1]
    d1 = lambda g: sympy_dunkl(RS, kappa, g, xs)[0]
    d2 = lambda g: sympy_dunkl(RS, kappa, g, xs)[1]
    assert sp.expand(d1(d2(f)) - d2(d1(f))) != 0


def test_multiplicity_validation():
    RS = build_root_system("B", 2)
    with pytest.raises(ValueError):
        Multiplicity(RS, [1])
    assert multiplicity_checks(Multiplicity(RS, [1, 3]), coxeter_group(RS)).passed


def test_operator_properties():
    RS = build_root_system("B", 2)
    report = dunkl_property_checks(RS, Multiplicity(RS, [1, 2]), coxeter_group(RS), 3)
    assert report.passed, [c.name for c in report.checks if not c.passed]


def test_divide_linear_rejects_remainder():
    x = Poly.var(2, 0)
    with pytest.raises(DivisibilityFailure):
        (x * x + Poly.const(2, 1)).divide_linear((1, 0))


@settings(max_examples=25, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3), st.integers(-3, 3)), min_size=1, max_size=4),
       st.fractions(-3, 3, max_denominator=4), st.fractions(-3, 3, max_denominator=4))
def test_b2_commutes_for_any_kappa(terms, k1, k2):
    RS = build_root_system("B", 2)
    kappa = Multiplicity(RS, [k1, k2])
    f = Poly(2, {(a, b): S(c) for a, b, c in terms})
    from qbundle.dunkl import directional
    lhs = directional(RS, kappa, (1, 0), directional(RS, kappa, (0, 1), f))
    rhs = directional(RS, kappa, (0, 1), directional(RS, kappa, (1, 0), f))
    assert lhs == rhs


def test_rank_one_bundle(rank1):
    RS, (bundle, canonical, dunkl) = rank1
    C = bundle.calc
    report = bundle_checks(bundle)
    assert report.passed, [c.name for c in report.checks if not c.passed]
    evens = {C.format(b) for b in C.base_forms(0)}
    assert {"(1)*1⊗1", "(1)*x^2⊗1", "(1)*x^-2⊗1"} <= evens
    assert not any(re.search(r"x(\^-?[13])?⊗", s) for s in evens)
    assert connection_checks(C, canonical.omega).passed and connection_checks(C, dunkl.omega).passed


def test_canonical_derivative_is_de_rham(rank1):
    _, (bundle, canonical, _) = rank1
    x2 = Vec.unit((((2,), ()), ()))
    assert covariant_derivative(bundle, canonical.omega, x2) == Vec.unit((((1,), (0,)), ()), 2)


def test_real_dunkl_derivative_on_x(rank1):
    # D x = (1 + 2κ i) dx with λ̃ = iλ
    _, (bundle, _, dunkl) = rank1
    x = Vec.unit((((1,), ()), ()))
    assert covariant_derivative(bundle, dunkl.omega, x) == Vec.unit((((0,), (0,)), ()), S(1) + I * 2)


def test_intertwiners_rank_one(rank1):
    RS, (bundle, _, _) = rank1
    triv, sign = bundle.qpb.coreps
    assert [p.format() for T in dunkl_intertwiners(bundle, triv, 0) for p in T] == ["(1)"]
    assert not dunkl_intertwiners(bundle, triv, 1)
    fam = dunkl_intertwiners(bundle, sign, 1)
    assert [p.format() for T in fam for p in T] == ["(1)*x"]
    assert intertwiner_mor_check(bundle, sign, fam[0])


def test_nabla_on_intertwiners():
    RS = build_root_system("B", 1)
    x = Poly.var(1, 0)
    one = Poly.const(1)
    assert nabla_on_intertwiners(RS, Multiplicity(RS, [0]), [one], [[one]]) == [([Poly(1)], [one])]
    out = nabla_on_intertwiners(RS, Multiplicity(RS, [1]), [x], [[x]])
    assert out == [([x * S(3)], [x])]
    hat = nabla_on_intertwiners(RS, Multiplicity(RS, [1]), [x], [[x]], variant="hat")
    assert [(b, a) for a, b in hat] == out
    with pytest.raises(MissingFamily):
        nabla_on_intertwiners(RS, Multiplicity(RS, [1]), [x], [])


def test_hermitian_rank_one():
    RS = build_root_system("B", 1)
    kappa = Multiplicity(RS, [Fraction(3, 2)])
    x = Poly.var(1, 0)
    one = Poly.const(1)
    assert hermitian_compatibility(RS, kappa, [one], [one]).passed
    assert hermitian_compatibility(RS, kappa, [x], [x]).passed
    assert hermitian_compatibility(RS, kappa, [x], [x * x * x]).passed
    bad = hermitian_compatibility(RS, kappa, [x], [x], real=False)
    assert not bad.by_name("hermitian-L").passed and not bad.by_name("hermitian-R").passed


def test_hermitian_a2_std():
    RS = build_root_system("A", 2)
    kappa = Multiplicity(RS, 1)
    bundle, _, _ = build_dunkl_bundle(RS, kappa, poly_cap=4)
    std = [V for V in bundle.qpb.coreps if V.dim == 2][0]
    fam = [T for d in range(5) for T in dunkl_intertwiners(bundle, std, d)]
    assert len(fam) == 11
    assert all(intertwiner_mor_check(bundle, std, T) for T in fam)
    for T1 in fam:
        for T2 in fam:
            assert hermitian_compatibility(RS, kappa, T1, T2).passed


def test_canonical_gauge_moves_connection():
    RS = build_root_system("B", 1)
    bundle, canonical, dunkl = build_dunkl_bundle(RS, Multiplicity(RS, [1]), poly_cap=6)
    C = bundle.calc
    s = bundle.W.reflections[0]
    F, moved = canonical_gauge(bundle, dunkl)
    assert moved(s) == C.germ(Vec.unit(s)) + Vec.unit((((-1,), (0,)), ()))
    keys = weight_window(C, 2)
    report = canonical_gauge_checks(bundle, dunkl, keys)
    assert report.passed, [(c.name, c.witness) for c in report.checks if not c.passed]


def test_canonical_gauge_with_zero_kappa_is_identity():
    RS = build_root_system("B", 1)
    bundle, canonical, dunkl = build_dunkl_bundle(RS, Multiplicity(RS, [0]), poly_cap=4)
    C = bundle.calc
    F, moved = canonical_gauge(bundle, dunkl)
    for k in weight_window(C, 2):
        assert F.on_key(k) == Vec.unit(k)
    assert all(moved(t) == canonical.omega(t) for t in C.fodc.germs.basis)


def test_canonical_gauge_roundtrip():
    RS = build_root_system("B", 1)
    bundle, canonical, dunkl = build_dunkl_bundle(RS, Multiplicity(RS, [1]), poly_cap=6)
    C = bundle.calc
    T = dunkl_translation_map(bundle, canonical.omega, 2)
    report = canonical_gauge_roundtrip(bundle, dunkl, T, envelope_keys(C, 2), weight_window(C, 2))
    assert report.passed, [(c.name, c.witness) for c in report.checks if not c.passed]


def test_rank_two_gauge_is_unsupported():
    RS = build_root_system("A", 2)
    bundle, _, dunkl = build_dunkl_bundle(RS, Multiplicity(RS, 1), poly_cap=2)
    with pytest.raises(UnsupportedRootSystem):
        dunkl.displacement(bundle.W.reflections[0])


def test_translation_map_choice_independence(rank1):
    _, (bundle, canonical, dunkl) = rank1
    C = bundle.calc
    T1 = dunkl_translation_map(bundle, canonical.omega, 2)
    T2 = dunkl_translation_map(bundle, dunkl.omega, 2)
    kb = {d: [k for k in C.basis(d) if abs(k[0][0][0]) <= 6] for d in range(3)}
    bal = BalancedTensor(C, 2, kb)
    keys = [(h, w) for h in bundle.W.elements for d in range(3) for w in C.germs.basis[d]]
    assert choice_independence(bundle, T1, T2, keys, bal).passed
    s = bundle.W.reflections[0]
    mu = Vec.unit((((1,), (0,)), ()))
    assert point4_sign(C, T2, bal, (bundle.W.identity, (s,)), mu) == -1
    wkeys = [k for d in range(3) for k in kb[d] if abs(k[0][0][0]) <= 1]
    report = verify_qtrs_properties(C, T2, 2, bal=bal, hkeys=bundle.W.elements, wkeys=wkeys)
    assert report.passed, [c.name for c in report.checks if not c.passed]
