"""Convolution-invertible maps Γ^∧ → Ω(P) and covariant module automorphisms of Ω(P).

Both kinds of map are stored as tables on basis keys over a finite domain
(all keys up to a degree cap, or a window of them for the Laurent example).
"""
from __future__ import annotations

import random
from fractions import Fraction
from typing import Sequence

from .checks import CheckList, exhaustive
from .hopf import TruncationOverflow
from .linalg import ONE, ZERO, Accumulator, Vec, null_space_rows, solve_rows, S
from .qpb import BundleCalculus, TranslationMap


class NotConvolutionInvertible(ArithmeticError):
    def __init__(self, degree: int):
        super().__init__(f"convolution system is singular in degree {degree}")
        self.degree = degree


class NotInvertible(ArithmeticError):
    pass


class OutsideDomain(KeyError):
    pass


def _lookup(table: dict, key, what: str) -> Vec:
    try:
        return table[key]
    except KeyError:
        raise OutsideDomain(f"{what} is not tabulated on {key!r}") from None


class _TableMap:
    def __init__(self, calc: BundleCalculus, table: dict):
        self.calc = calc
        self.table = dict(table)

    @property
    def keys(self) -> list:
        return list(self.table)

    def on_key(self, key) -> Vec:
        return _lookup(self.table, key, type(self).__name__)

    def __call__(self, x: Vec) -> Vec:
        acc = Accumulator()
        for k, c in x.items():
            acc.add_vec(self.on_key(k), c)
        return acc.vec()

    def __eq__(self, other):
        return type(self) is type(other) and self.table == other.table

    def __hash__(self):
        return id(self)


class ConvolutionMap(_TableMap):
    """A graded map f: Γ^∧ → Ω(P)."""

    @property
    def envelope(self):
        return self.calc.envelope


class ModuleAutomorphism(_TableMap):
    """A graded map F: Ω(P) → Ω(P)."""

    def then(self, other: "ModuleAutomorphism") -> "ModuleAutomorphism":
        """w ↦ other(self(w)), the group product F1∘F2 with F1 applied first."""
        return ModuleAutomorphism(self.calc, {k: other(v) for k, v in self.table.items()})


# --- domains ---------------------------------------------------------------------

def envelope_keys(C: BundleCalculus, max_degree: int, keep=None) -> list:
    E = C.envelope
    return [k for d in range(max_degree + 1) for k in E.basis(d) if keep is None or keep(k)]


def form_keys(C: BundleCalculus, max_degree: int, keep=None) -> list:
    return [k for d in range(max_degree + 1) for k in C.basis(d) if keep is None or keep(k)]


def identity_epsilon(C: BundleCalculus, keys: Sequence) -> ConvolutionMap:
    """1ε: ϑ ↦ ε(ϑ)1."""
    E = C.envelope
    one = C.unit()
    return ConvolutionMap(C, {k: one * E.counit(Vec.unit(k)) for k in keys})


def identity_map(C: BundleCalculus, keys: Sequence) -> ModuleAutomorphism:
    return ModuleAutomorphism(C, {k: Vec.unit(k) for k in keys})


# --- convolution ------------------------------------------------------------------

def convolve(f1: ConvolutionMap, f2: ConvolutionMap) -> ConvolutionMap:
    """(f1 ∗ f2)(ϑ) = f1(ϑ(1)) f2(ϑ(2))."""
    C = f1.calc
    E = C.envelope
    table = {}
    for k in f1.keys:
        acc = Accumulator()
        for (a, b), c in E.coproduct_basis(k).items():
            acc.add_vec(C.mul(f1.on_key(a), f2.on_key(b)), c)
        table[k] = acc.vec()
    return ConvolutionMap(C, table)


def _table_from_solution(sol: dict, variables: list, keys: Sequence) -> dict:
    table = {k: Accumulator() for k in keys}
    for j, c in sol.items():
        k, lab = variables[j]
        table[k].add(lab, c)
    return {k: acc.vec() for k, acc in table.items()}


def _inverse_system(f: ConvolutionMap, keys: list):
    C = f.calc
    E = C.envelope
    variables = [(k, lab) for k in keys for lab in C.basis(E.degree_of(k))]
    index = {v: j for j, v in enumerate(variables)}
    rows: list = []
    rhs: list = []
    one = C.unit()
    for k in keys:
        eq: dict = {}
        for (a, b), c in E.coproduct_basis(k).items():
            fa = f.on_key(a)
            if not fa:
                continue
            for lab in C.basis(E.degree_of(b)):
                if (b, lab) not in index:
                    raise OutsideDomain(f"coproduct leg {b!r} is outside the domain")
                for m, u in C.mul(fa, Vec.unit(lab)).items():
                    eq.setdefault(m, {})
                    j = index[(b, lab)]
                    eq[m][j] = eq[m].get(j, ZERO) + c * u
        target = one * E.counit(Vec.unit(k))
        for m in set(eq) | set(target.labels()):
            rows.append({j: v for j, v in eq.get(m, {}).items() if v})
            rhs.append(target[m])
    return rows, rhs, variables


def convolution_inverse(f: ConvolutionMap) -> ConvolutionMap:
    """Solve f ∗ g = 1ε degree by degree; the first singular degree is reported."""
    C = f.calc
    E = C.envelope
    keys = f.keys
    top = max(E.degree_of(k) for k in keys)
    g = None
    for d in range(top + 1):
        part = [k for k in keys if E.degree_of(k) <= d]
        rows, rhs, variables = _inverse_system(f, part)
        sol = solve_rows(rows, rhs, len(variables))
        if sol is None:
            raise NotConvolutionInvertible(d)
        g = ConvolutionMap(C, _table_from_solution(sol, variables, part))
    if convolve(g, f) != identity_epsilon(C, keys):
        raise NotConvolutionInvertible(top)
    return g


# --- Λ̂ and Λ̃ ----------------------------------------------------------------------

def F_from_f(f: ConvolutionMap, keys: Sequence) -> ModuleAutomorphism:
    """F_f(w) = w(0) f(w(1))."""
    C = f.calc
    table = {}
    for k in keys:
        acc = Accumulator()
        for (w0, t), c in C.coaction_basis(k).items():
            acc.add_vec(C.mul(Vec.unit(w0), f.on_key(t)), c)
        table[k] = acc.vec()
    return ModuleAutomorphism(C, table)


def f_from_F(T: TranslationMap, F: ModuleAutomorphism, keys: Sequence) -> ConvolutionMap:
    """f_F(ϑ) = [ϑ]1 F([ϑ]2)."""
    C = T.calc
    table = {}
    for k in keys:
        acc = Accumulator()
        for (x, y), c in T.on_key(k).items():
            acc.add_vec(C.mul(Vec.unit(x), F.on_key(y)), c)
        table[k] = acc.vec()
    return ConvolutionMap(C, table)


# --- validity ------------------------------------------------------------------------

def convolution_map_checks(f: ConvolutionMap) -> CheckList:
    C = f.calc
    E = C.envelope
    out = CheckList()
    out.add(exhaustive("f-unit", "f(1) = 1", [None], lambda _: f(E.unit()) == C.unit(), repr))

    def covariant(k):
        rhs = Accumulator()
        for (a, h), c in E.Ad(Vec.unit(k)).items():
            for m, u in f.on_key(a).items():
                rhs.add((m, h), c * u)
        return C.coaction(f.on_key(k)) == rhs.vec()

    out.add(exhaustive("f-covariant", "(f⊗id)Ad = Δ_Ω f", f.keys, covariant, repr))
    return out


def module_map_checks(F: ModuleAutomorphism) -> CheckList:
    C = F.calc
    out = CheckList()
    domain = set(F.keys)
    out.add(exhaustive("F-unit", "F(1) = 1", [None], lambda _: F(C.unit()) == C.unit(), repr))

    def covariant(k):
        lhs = Accumulator()
        for (w, t), c in C.coaction_basis(k).items():
            for m, u in F.on_key(w).items():
                lhs.add((m, t), c * u)
        return lhs.vec() == C.coaction(F.on_key(k))

    out.add(exhaustive("F-covariant", "(F⊗id)Δ_Ω = Δ_Ω F", F.keys, covariant, repr))

    def linear(t):
        mu, k = t
        try:
            prod = C.mul(mu, Vec.unit(k))
        except TruncationOverflow:
            return True
        if any(x not in domain for x in prod):
            return True
        return F(prod) == C.mul(mu, F.on_key(k))

    base = _base_elements(C, max(C.degree_of(k) for k in F.keys))
    out.add(exhaustive("F-left-linear", "F(μw) = μF(w) for μ in Ω(B)", [(mu, k) for mu in base for k in F.keys],
                       linear, repr))
    out.add(exhaustive("F-invertible", "F is bijective on the computed degrees", [None],
                       lambda _: _try_inverse(F) is not None, repr))
    return out


def _base_elements(C: BundleCalculus, top: int) -> list:
    return [b for d in range(top + 1) for b in C.base_forms(d)]


def module_inverse(F: ModuleAutomorphism) -> ModuleAutomorphism:
    G = _try_inverse(F)
    if G is None:
        raise NotInvertible("module map is singular on its domain")
    return G


def _try_inverse(F: ModuleAutomorphism):
    keys = F.keys
    index = {k: j for j, k in enumerate(keys)}
    rows: dict = {}
    for j, k in enumerate(keys):
        for m, c in F.on_key(k).items():
            if m not in index:
                return None
            rows.setdefault(index[m], {})[j] = c
    table = {}
    for k in keys:
        sol = solve_rows([rows.get(i, {}) for i in range(len(keys))],
                         [ONE if i == index[k] else ZERO for i in range(len(keys))], len(keys))
        if sol is None:
            return None
        table[k] = Vec({keys[j]: c for j, c in sol.items()})
    G = ModuleAutomorphism(F.calc, table)
    if F.then(G) != identity_map(F.calc, keys):
        return None
    return G


# --- sampling ---------------------------------------------------------------------

def _small(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(-4, 4), rng.randint(1, 3))


def _affine_solutions(rows: list, rhs: list, n: int):
    part = solve_rows(rows, rhs, n)
    if part is None:
        raise ValueError("constraint system is inconsistent")
    return part, null_space_rows(rows, n)


def _sample(part: dict, kernel: list, rng: random.Random) -> dict:
    x = dict(part)
    for v in kernel:
        r = S(_small(rng))
        if not r:
            continue
        for j, c in v.items():
            x[j] = x.get(j, ZERO) + r * c
    return {j: c for j, c in x.items() if c}


def _emit(rows: list, rhs: list, eqs: dict, target: Vec):
    for m in set(eqs) | set(target.labels()):
        rows.append({j: c for j, c in eqs.get(m, {}).items() if c})
        rhs.append(target[m])


def _add(eqs: dict, label, j: int, c):
    row = eqs.setdefault(label, {})
    row[j] = row.get(j, ZERO) + c


def gauge_map_space(C: BundleCalculus, keys: Sequence):
    """Affine solution space of {f : f(1) = 1, (f⊗id)Ad = Δ_Ω f} on ``keys``."""
    E = C.envelope
    variables = [(k, lab) for k in keys for lab in C.basis(E.degree_of(k))]
    index = {v: j for j, v in enumerate(variables)}
    rows: list = []
    rhs: list = []
    for k in keys:
        eqs: dict = {}
        for lab in C.basis(E.degree_of(k)):
            j = index[(k, lab)]
            for m, c in C.coaction_basis(lab).items():
                _add(eqs, m, j, c)
        for (a, h), c in E.Ad(Vec.unit(k)).items():
            for lab in C.basis(E.degree_of(a)):
                if (a, lab) not in index:
                    raise OutsideDomain(f"Ad leg {a!r} is outside the domain")
                _add(eqs, (lab, h), index[(a, lab)], -c)
        _emit(rows, rhs, eqs, Vec())
    eqs = {}
    for k, c in E.unit().items():
        for lab in C.basis(0):
            _add(eqs, lab, index[(k, lab)], c)
    _emit(rows, rhs, eqs, C.unit())
    part, kernel = _affine_solutions(rows, rhs, len(variables))
    return variables, part, kernel


def module_map_space(C: BundleCalculus, keys: Sequence):
    """Affine solution space of {F : F(1) = 1, covariant, left Ω(B)-linear} on ``keys``."""
    variables = [(k, lab) for k in keys for lab in C.basis(C.degree_of(k))]
    index = {v: j for j, v in enumerate(variables)}
    domain = set(keys)
    rows: list = []
    rhs: list = []
    for k in keys:
        eqs: dict = {}
        for lab in C.basis(C.degree_of(k)):
            j = index[(k, lab)]
            for m, c in C.coaction_basis(lab).items():
                _add(eqs, m, j, c)
        for (w, t), c in C.coaction_basis(k).items():
            if w not in domain:
                raise OutsideDomain(f"coaction leg {w!r} is outside the domain")
            for lab in C.basis(C.degree_of(w)):
                _add(eqs, (lab, t), index[(w, lab)], -c)
        _emit(rows, rhs, eqs, Vec())
    top = max(C.degree_of(k) for k in keys)
    for mu in _base_elements(C, top):
        dmu = C.degree(mu)
        for k in keys:
            if dmu + C.degree_of(k) > top:
                continue
            try:
                prod = C.mul(mu, Vec.unit(k))
            except TruncationOverflow:
                continue
            if any(x not in domain for x in prod):
                continue
            eqs = {}
            for x, c in prod.items():
                for lab in C.basis(C.degree_of(x)):
                    _add(eqs, lab, index[(x, lab)], c)
            for lab in C.basis(C.degree_of(k)):
                try:
                    image = C.mul(mu, Vec.unit(lab))
                except TruncationOverflow:
                    image = None
                if image is None:
                    continue
                for m, c in image.items():
                    _add(eqs, m, index[(k, lab)], -c)
            _emit(rows, rhs, eqs, Vec())
    eqs = {}
    for k, c in C.unit().items():
        for lab in C.basis(0):
            _add(eqs, lab, index[(k, lab)], c)
    _emit(rows, rhs, eqs, C.unit())
    part, kernel = _affine_solutions(rows, rhs, len(variables))
    return variables, part, kernel


def random_gauge_map(C: BundleCalculus, keys: Sequence, rng: random.Random, space=None,
                     attempts: int = 50) -> ConvolutionMap:
    variables, part, kernel = space or gauge_map_space(C, keys)
    for _ in range(attempts):
        f = ConvolutionMap(C, _table_from_solution(_sample(part, kernel, rng), variables, keys))
        try:
            convolution_inverse(f)
        except NotConvolutionInvertible:
            continue
        return f
    raise NotConvolutionInvertible(0)


def random_module_map(C: BundleCalculus, keys: Sequence, rng: random.Random, space=None,
                      attempts: int = 50) -> ModuleAutomorphism:
    variables, part, kernel = space or module_map_space(C, keys)
    for _ in range(attempts):
        F = ModuleAutomorphism(C, _table_from_solution(_sample(part, kernel, rng), variables, keys))
        if _try_inverse(F) is not None:
            return F
    raise NotInvertible("no invertible sample found")


# --- the correspondence -------------------------------------------------------------

def roundtrip_checks(T: TranslationMap, ekeys: Sequence, ckeys: Sequence, samples: int = 20,
                     seed: int = 0) -> CheckList:
    """Λ̃Λ̂ = id, Λ̂Λ̃ = id and f_{F1∘F2} = f_{F1} ∗ f_{F2} on seeded random samples."""
    C = T.calc
    rng = random.Random(seed)
    fspace = gauge_map_space(C, ekeys)
    Fspace = module_map_space(C, ckeys)
    fs = [random_gauge_map(C, ekeys, rng, fspace) for _ in range(samples)]
    Fs = [random_module_map(C, ckeys, rng, Fspace) for _ in range(samples)]
    out = CheckList()
    out.add(exhaustive("f-samples-valid", "(f⊗id)Ad = Δ_Ω f and f(1) = 1", range(samples),
                       lambda i: convolution_map_checks(fs[i]).passed, repr))
    out.add(exhaustive("F-samples-valid", "F covariant, left Ω(B)-linear, invertible", range(samples),
                       lambda i: module_map_checks(Fs[i]).passed, repr))
    out.add(exhaustive("f-F-f", "f_{F_f} = f", range(samples),
                       lambda i: f_from_F(T, F_from_f(fs[i], ckeys), ekeys) == fs[i], repr))
    out.add(exhaustive("F-f-F", "F_{f_F} = F", range(samples),
                       lambda i: F_from_f(f_from_F(T, Fs[i], ekeys), ckeys) == Fs[i], repr))
    out.add(exhaustive("f_F-valid", "f_F is covariant with f_F(1) = 1", range(samples),
                       lambda i: convolution_map_checks(f_from_F(T, Fs[i], ekeys)).passed, repr))

    def hom(i):
        F1, F2 = Fs[i], Fs[(i + 1) % samples]
        return f_from_F(T, F1.then(F2), ekeys) == convolve(f_from_F(T, F1, ekeys), f_from_F(T, F2, ekeys))

    out.add(exhaustive("anti-homomorphism", "f_{F1∘F2} = f_{F1} ∗ f_{F2}, (F1∘F2)(w) = F2(F1(w))",
                       range(samples), hom, repr))

    def inverse(i):
        g = convolution_inverse(fs[i])
        eps = identity_epsilon(C, ekeys)
        return convolve(fs[i], g) == eps and F_from_f(fs[i], ckeys).then(F_from_f(g, ckeys)) == identity_map(C, ckeys)

    out.add(exhaustive("inverse", "f ∗ f⁻¹ = 1ε and F_f⁻¹ = F_{f⁻¹}", range(samples), inverse, repr))
    return out
