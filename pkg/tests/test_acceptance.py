"""One test per acceptance criterion, at the stated tolerances (all exact) and time limits."""
import time
from fractions import Fraction

from qbundle.catalogue import GROUP_BUILDERS, catalogue_group, cyclic_group, symmetric_group_3
from qbundle.dunkl import (Multiplicity, Poly, build_dunkl_bundle, build_root_system, canonical_gauge,
                           canonical_gauge_checks, choice_independence, commutator_suite, dunkl_derivative,
                           dunkl_intertwiners, dunkl_translation_map, hermitian_compatibility, monomials_upto,
                           weight_window)
from qbundle.envelope import Envelope, ideal_generator, verify_envelope, verify_hopf_structure
from qbundle.fodc import Fodc, close_right_ideal, ker2_ideal, reflection_fodc, verify_germ_identities
from qbundle.gauge import envelope_keys, form_keys, roundtrip_checks
from qbundle.hopf import FunctionAlgebra, LaurentAlgebra, hopf_axiom_checks
from qbundle.linalg import Vec
from qbundle.qpb import (BalancedTensor, BundleCalculus, TranslationMap, build_intertwiners, build_u1_example,
                         intertwiner_checks, multi_orbit_bundle, regular_bundle, u1_base_checks,
                         verify_qtrs_properties)

TRANSPOSITIONS = ["(12)", "(13)", "(23)"]


def failures(report):
    return [c.name for c in report.checks if not c.passed]


def z2_regular_calculus():
    H = FunctionAlgebra(cyclic_group(2))
    return BundleCalculus(regular_bundle(cyclic_group(2), H), Envelope(Fodc(close_right_ideal(H, [])), 2))


def u1_windows(C, sample=3):
    keys = {k: [key for key in C.basis(k) if abs(key[0][0]) <= sample] for k in range(3)}
    wkeys = [key for j in keys for key in keys[j] if abs(key[0][0]) < sample]
    return keys, list(range(-sample, sample + 1)), wkeys


def test_criterion_01_hopf_axioms(criterion):
    t = time.perf_counter()
    bad = []
    for H in [FunctionAlgebra(catalogue_group(n)) for n in ("Z2", "Z3", "Z4", "S3", "D4")] + \
            [LaurentAlgebra((-5, 5))]:
        bad += [c.name for c in hopf_axiom_checks(H) if not c.passed]
    elapsed = time.perf_counter() - t
    ok = not bad and elapsed < 5
    criterion(1, "Hopf axioms on Z2, Z3, Z4, S3, D4 and Laurent [-5,5]", ok, f"{elapsed:.2f}s < 5s, failed={bad}")
    assert ok


def test_criterion_02_u1_base_forms(criterion):
    t = time.perf_counter()
    _, C = build_u1_example(6, 2)
    report = u1_base_checks(C)
    one_forms = C.base_forms(1)
    dB = [C.d(b) for b in C.base_forms(0)]
    elapsed = time.perf_counter() - t
    ok = report.passed and len(one_forms) == 1 and not any(dB) and elapsed < 1
    criterion(2, "U(1) example: dim Ω¹(B) = 1 spanned by π(z), dB = 0", ok,
              f"{elapsed:.2f}s < 1s, failed={failures(report)}")
    assert ok


def test_criterion_03_germ_identities(criterion):
    G = symmetric_group_3()
    L = LaurentAlgebra((-3, 3))
    r1 = verify_germ_identities(reflection_fodc(G, TRANSPOSITIONS))
    r2 = verify_germ_identities(Fodc(ker2_ideal(L)))
    ok = r1.passed and r2.passed
    criterion(3, "germ identities on Fun(S3) reflection and Laurent classical calculi", ok,
              f"failed={failures(r1) + failures(r2)}")
    assert ok


def test_criterion_04_antisymmetrization(criterion):
    L = LaurentAlgebra((-3, 3))
    E = Envelope(Fodc(ker2_ideal(L)), 3)
    g = L.z(2) - L.z(1) * 2 + L.z(0)
    gen = ideal_generator(E.fodc, g)
    dims = E.dims()
    ok = gen == Vec.unit((1, 1), 2) and dims[2] == 0
    criterion(4, "generator of (z-1)² is 2π(z)⊗π(z) and the degree-2 envelope vanishes", ok,
              f"generator={gen}, dims={dims}")
    assert ok


def test_criterion_05_envelope_laws(criterion):
    t = time.perf_counter()
    E = Envelope(reflection_fodc(symmetric_group_3(), TRANSPOSITIONS), 3)
    r1 = verify_envelope(E)
    r2 = verify_hopf_structure(E)
    elapsed = time.perf_counter() - t
    ok = r1.passed and r2.passed and elapsed < 30
    criterion(5, "S3 reflection envelope to degree 3: d²=0, Leibniz, Maurer-Cartan, Hopf laws", ok,
              f"{elapsed:.2f}s < 30s, failed={failures(r1) + failures(r2)}")
    assert ok


def test_criterion_06_translation_map(criterion):
    bad = {}
    C = z2_regular_calculus()
    bad["Z2"] = failures(verify_qtrs_properties(C, TranslationMap(C), 2))
    _, Cu = build_u1_example(6, 2)
    keys, hkeys, wkeys = u1_windows(Cu)
    bal = BalancedTensor(Cu, 2)
    bad["U1"] = failures(verify_qtrs_properties(Cu, TranslationMap(Cu), 2, bal=bal, hkeys=hkeys, wkeys=wkeys))
    RS = build_root_system("B", 1)
    bundle, canonical, dunkl = build_dunkl_bundle(RS, Multiplicity(RS, [1]), poly_cap=6, real=True)
    Cd = bundle.calc
    T1 = dunkl_translation_map(bundle, canonical.omega, 2)
    T2 = dunkl_translation_map(bundle, dunkl.omega, 2)
    kb = {d: [k for k in Cd.basis(d) if abs(k[0][0][0]) <= 6] for d in range(3)}
    dbal = BalancedTensor(Cd, 2, kb)
    theta = [(h, w) for h in bundle.W.elements for d in range(3) for w in Cd.germs.basis[d]]
    distinct = any(T1.on_key(k) != T2.on_key(k) for k in theta)
    bad["dunkl"] = failures(choice_independence(bundle, T1, T2, theta, dbal))
    ok = not any(bad.values()) and distinct
    criterion(6, "qtrs points 1-4 and qtrs∘d on Z2 and U(1); choice independence on rank-1 Dunkl", ok,
              f"failed={bad}, distinct representatives={distinct}")
    assert ok


def test_criterion_07_gauge_isomorphism(criterion):
    t = time.perf_counter()
    C = z2_regular_calculus()
    r1 = roundtrip_checks(TranslationMap(C), envelope_keys(C, 2), form_keys(C, 2), 20, 1)
    _, Cu = build_u1_example(6, 2)
    ek = envelope_keys(Cu, 2, lambda k: abs(k[0]) <= 3)
    ck = form_keys(Cu, 2, lambda k: abs(k[0][0]) <= 3)
    r2 = roundtrip_checks(TranslationMap(Cu), ek, ck, 20, 1)
    elapsed = time.perf_counter() - t
    ok = r1.passed and r2.passed and elapsed < 60
    criterion(7, "20 seeded gauge maps per bundle: F_{f_F}=F, f_{F_f}=f, f_{F1∘F2}=f_{F1}∗f_{F2}", ok,
              f"{elapsed:.2f}s < 60s, failed={failures(r1) + failures(r2)}")
    assert ok


def test_criterion_08_intertwiner_generators(criterion):
    bad = []
    count = 0
    for name in GROUP_BUILDERS:
        G = catalogue_group(name)
        for copies in (1, 2):
            Q = multi_orbit_bundle(G, copies)
            for V in Q.coreps:
                count += 1
                if not intertwiner_checks(build_intertwiners(Q, V)).passed:
                    bad.append((V.name, copies))
    ok = not bad and count > 0
    criterion(8, "Σ_k x*_ki x_kj = δ_ij for every catalogue corep on 1- and 2-orbit bundles", ok,
              f"{count} families, failed={bad}")
    assert ok


def test_criterion_09_dunkl_operator(criterion):
    t = time.perf_counter()
    gradient = True
    for kind, rank in (("A", 2), ("B", 2)):
        RS = build_root_system(kind, rank)
        zero = Multiplicity(RS, [0] * len(RS.orbits))
        for a in monomials_upto(RS.dim, 6):
            f = Poly.monomial(a)
            gradient &= dunkl_derivative(RS, zero, f) == f.gradient()
    A2 = build_root_system("A", 2)
    B2 = build_root_system("B", 2)
    r1 = commutator_suite(A2, Multiplicity(A2, 1), 6)
    r2 = commutator_suite(B2, Multiplicity(B2, [1, 2]), 6)
    elapsed = time.perf_counter() - t
    ok = gradient and r1.passed and r2.passed and elapsed < 120
    criterion(9, "κ=0 gives the gradient; A2 (κ=1) and B2 (κ=(1,2)) commute to degree 6", ok,
              f"{elapsed:.2f}s < 120s, failed={failures(r1) + failures(r2)}")
    assert ok


def test_criterion_10_hermitian(criterion):
    bad = []
    B1 = build_root_system("B", 1)
    kappa = Multiplicity(B1, [Fraction(3, 2)])
    bundle, _, _ = build_dunkl_bundle(B1, kappa, poly_cap=6)
    sign = [V for V in bundle.qpb.coreps if V.name == "Z2:chi1"][0]
    fam = [T for d in range(6) for T in dunkl_intertwiners(bundle, sign, d)]
    bad += [("B1", a, b) for a in range(len(fam)) for b in range(len(fam))
            if not hermitian_compatibility(B1, kappa, fam[a], fam[b]).passed]
    A2 = build_root_system("A", 2)
    kappa = Multiplicity(A2, 1)
    bundle, _, _ = build_dunkl_bundle(A2, kappa, poly_cap=4)
    std = [V for V in bundle.qpb.coreps if V.dim == 2][0]
    fam2 = [T for d in range(5) for T in dunkl_intertwiners(bundle, std, d)]
    bad += [("A2", a, b) for a in range(len(fam2)) for b in range(len(fam2))
            if not hermitian_compatibility(A2, kappa, fam2[a], fam2[b]).passed]
    ok = not bad and fam and fam2
    criterion(10, "⟨∇T1,T2⟩+⟨T1,∇T2⟩ = d⟨T1,T2⟩ (L and R) on rank-1 sign and A2 std2 to degree 4", bool(ok),
              f"{len(fam)} + {len(fam2)} intertwiners, failed={bad}")
    assert ok


def test_criterion_11_canonical_gauge(criterion):
    RS = build_root_system("B", 1)
    bundle, canonical, dunkl = build_dunkl_bundle(RS, Multiplicity(RS, [1]), poly_cap=6)
    C = bundle.calc
    _, moved = canonical_gauge(bundle, dunkl)
    exact = all(moved(t) == canonical.omega(t) + dunkl.lam(t) for t in C.fodc.germs.basis)
    report = canonical_gauge_checks(bundle, dunkl, weight_window(C, 2))
    ok = exact and report.passed
    criterion(11, "𝔉∘ω^c = ω^c + λ on the rank-1 bundle and 𝔉 is covariant", ok,
              f"convention ω ↦ 𝔉∘ω, failed={failures(report)}")
    assert ok
