import random

import pytest

from qbundle.catalogue import cyclic_group
from qbundle.envelope import Envelope
from qbundle.fodc import Fodc, close_right_ideal
from qbundle.gauge import (ConvolutionMap, F_from_f, NotConvolutionInvertible, OutsideDomain, convolution_inverse,
                           convolution_map_checks, convolve, envelope_keys, f_from_F, form_keys, gauge_map_space,
                           identity_epsilon, identity_map, module_map_checks, random_gauge_map, random_module_map,
                           roundtrip_checks)
from qbundle.hopf import FunctionAlgebra
from qbundle.linalg import Vec
from qbundle.qpb import BundleCalculus, TranslationMap, build_u1_example, regular_bundle


@pytest.fixture(scope="module")
def z2():
    H = FunctionAlgebra(cyclic_group(2))
    C = BundleCalculus(regular_bundle(cyclic_group(2), H), Envelope(Fodc(close_right_ideal(H, [])), 2))
    return C, TranslationMap(C), envelope_keys(C, 2), form_keys(C, 2)


@pytest.fixture(scope="module")
def u1():
    _, C = build_u1_example(6, 2)
    ek = envelope_keys(C, 2, lambda k: abs(k[0]) <= 3)
    ck = form_keys(C, 2, lambda k: abs(k[0][0]) <= 3)
    return C, TranslationMap(C), ek, ck


def test_identity_is_a_unit_for_convolution(z2):
    C, _, ek, _ = z2
    f = random_gauge_map(C, ek, random.Random(3))
    eps = identity_epsilon(C, ek)
    assert convolve(f, eps) == f
    assert convolve(eps, f) == f
    assert convolution_map_checks(eps).passed


def test_identity_correspondence(z2):
    C, T, ek, ck = z2
    assert F_from_f(identity_epsilon(C, ek), ck) == identity_map(C, ck)
    assert f_from_F(T, identity_map(C, ck), ek) == identity_epsilon(C, ek)
    assert module_map_checks(identity_map(C, ck)).passed


def test_convolution_inverse(z2):
    C, _, ek, _ = z2
    f = random_gauge_map(C, ek, random.Random(11))
    g = convolution_inverse(f)
    assert convolve(f, g) == identity_epsilon(C, ek)
    assert convolve(g, f) == identity_epsilon(C, ek)


def test_vanishing_on_a_generator_is_not_invertible(u1):
    # f(z) = 0 leaves ε(z) = 1 unreachable in degree 0
    C, _, ek, _ = u1
    table = {k: identity_epsilon(C, ek).on_key(k) for k in ek}
    table[(1, ())] = Vec()
    with pytest.raises(NotConvolutionInvertible) as err:
        convolution_inverse(ConvolutionMap(C, table))
    assert err.value.degree == 0


def test_outside_domain_is_reported(u1):
    C, _, ek, _ = u1
    f = identity_epsilon(C, ek)
    with pytest.raises(OutsideDomain):
        f.on_key((5, ()))


def test_gauge_space_is_nontrivial(z2):
    C, _, ek, _ = z2
    variables, part, kernel = gauge_map_space(C, ek)
    assert part is not None and kernel


@pytest.mark.parametrize("seed", [0, 1, 7])
def test_roundtrip_z2(z2, seed):
    _, T, ek, ck = z2
    report = roundtrip_checks(T, ek, ck, 6, seed)
    assert report.passed, [(c.name, c.witness) for c in report.checks if not c.passed]


def test_roundtrip_u1(u1):
    _, T, ek, ck = u1
    report = roundtrip_checks(T, ek, ck, 6, 2)
    assert report.passed, [(c.name, c.witness) for c in report.checks if not c.passed]


def test_composition_order(z2):
    # (F1∘F2)(w) = F2(F1(w)) corresponds to f_{F1} ∗ f_{F2}
    C, T, ek, ck = z2
    rng = random.Random(5)
    F1, F2 = random_module_map(C, ck, rng), random_module_map(C, ck, rng)
    lhs = f_from_F(T, F1.then(F2), ek)
    assert lhs == convolve(f_from_F(T, F1, ek), f_from_F(T, F2, ek))


def test_samples_are_deterministic(z2):
    C, _, ek, _ = z2
    assert random_gauge_map(C, ek, random.Random(9)) == random_gauge_map(C, ek, random.Random(9))
