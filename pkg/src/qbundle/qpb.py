"""Quantum principal bundles, their form calculi and the quantum translation map.

Ω(P) is realized as Hor ⊗ qg#∧ (a CrossedForms algebra) with the coaction
Δ_Ω(α ⊗ θ1…θk) = Δ_Hor(α) Δ(θ1)…Δ(θk) into Ω(P) ⊗ Γ^∧.  Elements of
Ω(P) ⊗_{Ω(B)} Ω(P) are Vecs over pairs of Ω(P) keys; equality is decided by a
quotient by the balancing relations x μ ⊗ y − x ⊗ μ y.
"""
from __future__ import annotations

from typing import Callable, Sequence

from .catalogue import decompose_regular
from .checks import Check, CheckList, exhaustive, single
from .envelope import (CrossedForms, Envelope, HorAlgebra, _sign, tensor_d, tensor_mul,
                       verify_forms)
from .fodc import Fodc, close_right_ideal, ker2_ideal, ker_eps_basis
from .hopf import (Corepresentation, FiniteGroup, FunctionAlgebra, LaurentAlgebra,
                   TruncationOverflow, character_corep)
from .linalg import ONE, ZERO, Accumulator, Echelon, Quotient, Vec, VectorSpace, null_space_rows, solve_rows


class NotFree(ValueError):
    def __init__(self, message: str, witness: str):
        super().__init__(message)
        self.witness = witness


class MissingCorepresentation(KeyError):
    pass


def _kernel(keys: Sequence, f: Callable[[object], Vec]) -> list:
    """Basis (as Vecs over ``keys``) of the kernel of the linear map given on keys."""
    images = [f(k) for k in keys]
    labels = {}
    for v in images:
        for lab in v:
            labels.setdefault(lab, len(labels))
    rows: dict = {}
    for j, v in enumerate(images):
        for lab, c in v.items():
            rows.setdefault(labels[lab], {})[j] = c
    null = null_space_rows(list(rows.values()), len(keys))
    return [Vec({keys[j]: c for j, c in x.items()}) for x in null]


# --- horizontal algebras -------------------------------------------------------

class FunHor(HorAlgebra):
    """Fun(X) in degree 0 with Δ_P(δ_x) = Σ_{y·g = x} δ_y ⊗ δ_g."""

    def __init__(self, points: Sequence, H: FunctionAlgebra, action: dict):
        self.points = tuple(points)
        self.hopf = H
        self.action = action
        self._unit = Vec({x: ONE for x in self.points})
        cop = {x: Accumulator() for x in self.points}
        for y in self.points:
            for g in H.group.elements:
                cop[action[(y, g)]].add((y, g), ONE)
        self._cop = {x: acc.vec() for x, acc in cop.items()}

    def degree(self, a) -> int:
        return 0

    def basis(self, k: int) -> list:
        return list(self.points) if k == 0 else []

    def unit(self) -> Vec:
        return self._unit

    def mul_basis(self, a, b) -> Vec:
        return Vec.unit(a) if a == b else Vec()

    def coaction_basis(self, a) -> Vec:
        return self._cop[a]

    def d_basis(self, a) -> Vec:
        return Vec()

    def star_basis(self, a) -> Vec:
        return Vec.unit(a)

    def label_str(self, a) -> str:
        return f"δ[{a}]"


class EnvelopeHor(HorAlgebra):
    """A whole calculus Γ^∧ of H used as horizontal forms, coacting by (id ⊗ p0)Δ."""

    def __init__(self, calculus: Envelope):
        self.calc = calculus
        self.hopf = calculus.hopf

    def degree(self, a) -> int:
        return self.calc.degree_of(a)

    def basis(self, k: int) -> list:
        return self.calc.basis(k) if k <= self.calc.max_degree else []

    def unit(self) -> Vec:
        return self.calc.unit()

    def mul_basis(self, a, b) -> Vec:
        return self.calc.mul_basis(a, b)

    def coaction_basis(self, a) -> Vec:
        return Vec._raw({(x, h): c for (x, (h, w)), c in self.calc.coproduct_basis(a).items() if not w})

    def d_basis(self, a) -> Vec:
        return self.calc.d_basis(a)

    def star_basis(self, a) -> Vec:
        return self.calc.star_basis(a)

    def label_str(self, a) -> str:
        return self.calc.format(Vec.unit(a))


# --- bundles --------------------------------------------------------------------

class Qpb:
    """(P, B, Δ_P) with P the degree-0 part of ``hor``."""

    def __init__(self, hor: HorAlgebra, name: str = "P"):
        self.hor = hor
        self.hopf = hor.hopf
        self.name = name
        self.total = tuple(hor.basis(0))
        self.base = _kernel(self.total, lambda a: self.coaction(Vec.unit(a)) - _tensor_one(self, Vec.unit(a)))
        self.coreps: list = []
        self.families: dict = {}

    def coaction(self, x: Vec) -> Vec:
        return x.apply(self.hor.coaction_basis)

    def beta(self, a, b) -> Vec:
        """β(x ⊗ y) = (x ⊗ 1) Δ_P(y) over (P label, H label)."""
        acc = Accumulator()
        for (y0, h), c in self.hor.coaction_basis(b).items():
            for m, u in self.hor.mul_basis(a, y0).items():
                acc.add((m, h), c * u)
        return acc.vec()

    def __repr__(self):
        return f"Qpb({self.name}, dim P={len(self.total)}, dim B={len(self.base)})"


def _tensor_one(Q: Qpb, x: Vec) -> Vec:
    one = Q.hopf.unit()
    return Vec._raw({(a, h): c * d for a, c in x.items() for h, d in one.items()})


def verify_qpb(Q: Qpb, inner: Callable | None = None) -> CheckList:
    """The three bundle axioms; ``inner`` limits targets of β on windowed algebras."""
    H = Q.hopf
    hor = Q.hor
    out = CheckList()
    pts = list(Q.total)

    def coassoc(a):
        left = Accumulator()
        right = Accumulator()
        for (x, h), c in hor.coaction_basis(a).items():
            for (y, k), d in hor.coaction_basis(x).items():
                left.add((y, k, h), c * d)
            for (h1, h2), d in H.coproduct_basis(h).items():
                right.add((x, h1, h2), c * d)
        return left.vec() == right.vec()

    def counit(a):
        acc = Accumulator()
        for (x, h), c in hor.coaction_basis(a).items():
            acc.add(x, c * H.counit_basis(h))
        return acc.vec() == Vec.unit(a)

    def multiplicative(t):
        a, b = t
        lhs = Q.coaction(hor.mul_basis(a, b))
        acc = Accumulator()
        for (x, h), c in hor.coaction_basis(a).items():
            for (y, k), d in hor.coaction_basis(b).items():
                for m, u in hor.mul_basis(x, y).items():
                    for n, v in H.mul_basis(h, k).items():
                        acc.add((m, n), c * d * u * v)
        return lhs == acc.vec()

    def star(a):
        lhs = Q.coaction(hor.star_basis(a))
        acc = Accumulator()
        for (x, h), c in hor.coaction_basis(a).items():
            for m, u in hor.star_basis(x).items():
                for n, v in H.star_basis(h).items():
                    acc.add((m, n), c.conj() * u * v)
        return lhs == acc.vec()

    out.add(exhaustive("coaction-coassociative", "(Δ_P⊗id)Δ_P = (id⊗Δ)Δ_P", pts, _tol(coassoc), hor.label_str))
    out.add(exhaustive("coaction-counit", "(id⊗ε)Δ_P = id", pts, _tol(counit), hor.label_str))
    out.add(exhaustive("coaction-multiplicative", "Δ_P(xy) = Δ_P(x)Δ_P(y)", [(a, b) for a in pts for b in pts],
                       _tol(multiplicative), repr))
    out.add(exhaustive("coaction-star", "Δ_P(x*) = Δ_P(x)*", pts, _tol(star), hor.label_str))
    out.add(exhaustive("base-fixed", "B = {x : Δ_P(x) = x⊗1}", Q.base,
                       lambda b: Q.coaction(b) == _tensor_one(Q, b), repr))
    out.add(beta_surjective(Q, inner))
    return out


def _tol(f):
    def run(x):
        try:
            return f(x)
        except TruncationOverflow:
            return True
    return run


def beta_surjective(Q: Qpb, inner: Callable | None = None) -> Check:
    H = Q.hopf
    ech = Echelon()
    index = {}
    for a in Q.total:
        for b in Q.total:
            try:
                v = Q.beta(a, b)
            except TruncationOverflow:
                continue
            ech.add({index.setdefault(k, len(index)): c for k, c in v.items()})
    targets = [(x, h) for x in Q.total for h in H.basis if inner is None or inner(x, h)]
    for t in targets:
        if t not in index or not ech.contains({index[t]: ONE}):
            return Check("beta-surjective", "β(x⊗y) = (x⊗1)Δ_P(y) is onto", False, f"{t!r} not in the image")
    return Check("beta-surjective", "β(x⊗y) = (x⊗1)Δ_P(y) is onto", True)


def _orbits(points, G: FiniteGroup, action: dict) -> list:
    seen = set()
    orbits = []
    for x in points:
        if x in seen:
            continue
        orb = []
        for g in G.elements:
            y = action[(x, g)]
            if y not in orb:
                orb.append(y)
        seen.update(orb)
        orbits.append(orb)
    return orbits


def build_finite_bundle(X: Sequence, G: FiniteGroup, action: dict, H: FunctionAlgebra | None = None,
                        name: str = "P") -> Qpb:
    """P = Fun(X) for a right action X × G → X given as a table {(x, g): x·g}."""
    H = H or FunctionAlgebra(G)
    X = list(X)
    for x in X:
        if action.get((x, G.identity)) != x:
            raise ValueError(f"x·e ≠ x at {x!r}")
        for g in G.elements:
            for h in G.elements:
                if action[(action[(x, g)], h)] != action[(x, G.mul(g, h))]:
                    raise ValueError(f"not a right action at ({x!r}, {g!r}, {h!r})")
    Q = Qpb(FunHor(X, H, action), name)
    Q.points = X
    Q.group = G
    Q.action = action
    Q.orbits = _orbits(X, G, action)
    chk = beta_surjective(Q)
    if not chk.passed:
        for orb in Q.orbits:
            x = orb[0]
            stab = [g for g in G.elements if g != G.identity and action[(x, g)] == x]
            if stab:
                raise NotFree(f"stabilizer of {x!r} contains {stab[0]!r}", f"orbit {orb}")
        raise NotFree("β is not surjective", chk.witness)
    Q.coreps = decompose_regular(G, H)
    return Q


def regular_bundle(G: FiniteGroup, H: FunctionAlgebra | None = None) -> Qpb:
    """X = G with right translation."""
    action = {(x, g): G.mul(x, g) for x in G.elements for g in G.elements}
    return build_finite_bundle(G.elements, G, action, H, name=f"{G.name}-regular")


def multi_orbit_bundle(G: FiniteGroup, copies: int, H: FunctionAlgebra | None = None) -> Qpb:
    """X = G × {0..copies−1}, translation on the first factor."""
    X = [(x, i) for i in range(copies) for x in G.elements]
    action = {((x, i), g): (G.mul(x, g), i) for (x, i) in X for g in G.elements}
    return build_finite_bundle(X, G, action, H, name=f"{G.name}x{copies}")


# --- intertwiners ------------------------------------------------------------------

class IntertwinerFamily:
    """Maps T_k with values x_ki = T_k(e_i) ∈ P, satisfying Σ_k x*_ki x_kj = δ_ij 1."""

    def __init__(self, Q: Qpb, corep: Corepresentation, values: list):
        self.qpb = Q
        self.corep = corep
        self.values = values

    @property
    def size(self) -> int:
        return len(self.values)

    def x(self, k: int, i: int) -> Vec:
        return self.values[k][i]


def build_intertwiners(Q: Qpb, corep: Corepresentation) -> IntertwinerFamily:
    """T^{(l,j)}(e_k) = 1_{O_l} · g_jk(A(x)), where x = x_l · A(x) in orbit O_l."""
    if not hasattr(Q, "orbits"):
        raise NotFree("intertwiner construction needs a finite free action", Q.name)
    G = Q.group
    n = corep.dim
    values = []
    for orb in Q.orbits:
        base = orb[0]
        where = {}
        for g in G.elements:
            y = Q.action[(base, g)]
            if y in where:
                raise NotFree(f"stabilizer of {base!r} is nontrivial", f"orbit {orb}")
            where[y] = g
        for j in range(n):
            values.append([Vec({y: corep.g[j][k][where[y]] for y in orb}) for k in range(n)])
    fam = IntertwinerFamily(Q, corep, values)
    return fam


def intertwiner_checks(fam: IntertwinerFamily) -> CheckList:
    Q = fam.qpb
    hor = Q.hor
    n = fam.corep.dim
    g = fam.corep.g
    one = hor.unit()
    out = CheckList()

    def gen(t):
        i, j = t
        acc = Vec()
        for k in range(fam.size):
            acc = acc + _hor_mul(hor, _hor_star(hor, fam.x(k, i)), fam.x(k, j))
        return acc == one * (ONE if i == j else ZERO)

    def mor(t):
        k, i = t
        lhs = Q.coaction(fam.x(k, i))
        acc = Accumulator()
        for j in range(n):
            for a, c in fam.x(k, j).items():
                for h, d in g[j][i].items():
                    acc.add((a, h), c * d)
        return lhs == acc.vec()

    idx = [(i, j) for i in range(n) for j in range(n)]
    out.add(exhaustive("intertwiner-generators", "Σ_k x*_ki x_kj = δ_ij 1", idx, _tol(gen), repr))
    out.add(exhaustive("intertwiner-mor", "Δ_P T(e_i) = Σ_j T(e_j) ⊗ g_ji",
                       [(k, i) for k in range(fam.size) for i in range(n)], _tol(mor), repr))
    return out


def _hor_mul(hor: HorAlgebra, x: Vec, y: Vec) -> Vec:
    acc = Accumulator()
    for a, c in x.items():
        for b, d in y.items():
            acc.add_vec(hor.mul_basis(a, b), c * d)
    return acc.vec()


def _hor_star(hor: HorAlgebra, x: Vec) -> Vec:
    acc = Accumulator()
    for a, c in x.items():
        acc.add_vec(hor.star_basis(a), c.conj())
    return acc.vec()


# --- calculus -------------------------------------------------------------------------

class BundleCalculus(CrossedForms):
    """Ω(P) = Hor ⊗ qg#∧ for a bundle, with Δ_Ω into Ω(P) ⊗ Γ^∧."""

    def __init__(self, qpb: Qpb, envelope: Envelope, name: str = "Ω(P)"):
        super().__init__(qpb.hor, envelope.germs)
        self.qpb = qpb
        self.envelope = envelope
        self.name = name
        self._coact: dict = {}
        self._base: dict = {}
        self._horiz: dict = {}

    def _delta_letter(self, t) -> Vec:
        E = self.envelope
        acc = Accumulator()
        for k, c in self.unit().items():
            for m, d in E.germ(Vec.unit(t)).items():
                acc.add((k, m), c * d)
        for (s, y), c in self.fodc.ad(Vec.unit(t)).items():
            for m, d in self.germ(Vec.unit(s)).items():
                acc.add((m, (y, ())), c * d)
        return acc.vec()

    def coaction_basis(self, key) -> Vec:
        v = self._coact.get(key)
        if v is not None:
            return v
        a, w = key
        out = Vec._raw({((x, ()), (h, ())): c for (x, h), c in self.hor.coaction_basis(a).items()})
        for t in w:
            out = tensor_mul(self, self.envelope, out, self._delta_letter(t))
        v = self._coact[key] = out
        return v

    def coaction(self, x: Vec) -> Vec:
        return x.apply(self.coaction_basis)

    def tensor_one(self, x: Vec) -> Vec:
        one = self.envelope.unit()
        return Vec._raw({(a, b): c * d for a, c in x.items() for b, d in one.items()})

    def base_forms(self, k: int) -> list:
        if k not in self._base:
            keys = self.basis(k)
            self._base[k] = _kernel(keys, lambda key: self.coaction_basis(key) - self.tensor_one(Vec.unit(key)))
        return self._base[k]

    def horizontal_forms(self, k: int) -> list:
        if k not in self._horiz:
            E = self.envelope
            keys = self.basis(k)
            self._horiz[k] = _kernel(keys, lambda key: Vec._raw(
                {lab: c for lab, c in self.coaction_basis(key).items() if E.degree_of(lab[1]) > 0}))
        return self._horiz[k]

    def beta(self, x, y) -> Vec:
        """β̃(x ⊗ y) = (x ⊗ 1) Δ_Ω(y) over (Ω key, Γ^∧ key)."""
        acc = Accumulator()
        for (y0, g), c in self.coaction_basis(y).items():
            for m, u in self.mul_basis(x, y0).items():
                acc.add((m, g), c * u)
        return acc.vec()

    def beta_vec(self, t: Vec) -> Vec:
        acc = Accumulator()
        for (x, y), c in t.items():
            acc.add_vec(self.beta(x, y), c)
        return acc.vec()

    def pair_degree(self, pair) -> int:
        return self.degree_of(pair[0]) + self.degree_of(pair[1])


def trivial_connection(C: BundleCalculus) -> Callable[[object], Vec]:
    """θ ↦ 1 ⊗ θ."""
    return lambda t: C.germ(Vec.unit(t))


def connection_checks(C: BundleCalculus, omega: Callable, name: str = "ω") -> CheckList:
    """Δ_Ω ω(θ) = (ω⊗id)ad(θ) + 1⊗θ and ω(θ*) = ω(θ)*."""
    E = C.envelope
    F = C.fodc
    out = CheckList()

    def omega_vec(theta: Vec) -> Vec:
        acc = Accumulator()
        for t, c in theta.items():
            acc.add_vec(omega(t), c)
        return acc.vec()

    def covariant(t):
        lhs = C.coaction(omega(t))
        acc = Accumulator()
        for k, c in C.unit().items():
            for m, d in E.germ(Vec.unit(t)).items():
                acc.add((k, m), c * d)
        for (s, y), c in F.ad(Vec.unit(t)).items():
            for m, d in omega(s).items():
                acc.add((m, (y, ())), c * d)
        return lhs == acc.vec()

    out.add(exhaustive(f"{name}-connection", "Δ_Ω ω(θ) = (ω⊗id)ad(θ) + 1⊗θ", list(F.germs.basis), _tol(covariant), repr))
    out.add(exhaustive(f"{name}-real", "ω(θ*) = ω(θ)*", list(F.germs.basis),
                       _tol(lambda t: omega_vec(F.germ_star(Vec.unit(t))) == C.star(omega(t))), repr))
    return out


def build_bundle_calculus(Q: Qpb, F: Fodc, max_degree: int = 3) -> BundleCalculus:
    return BundleCalculus(Q, Envelope(F, max_degree))


def build_u1_example(window: int = 6, max_degree: int = 2) -> tuple:
    """P = H = Laurent, Ω(P) the classical envelope, structure calculus with R = Ker ε."""
    L = LaurentAlgebra((-window, window))
    classical = Envelope(Fodc(ker2_ideal(L)), max_degree)
    Q = Qpb(EnvelopeHor(classical), name="U(1)")
    Q.window = window
    Q.coreps = [character_corep(L, n) for n in range(-window, window + 1)]
    trivial_group_calc = Fodc(close_right_ideal(L, ker_eps_basis(L)))
    C = BundleCalculus(Q, Envelope(trivial_group_calc, max_degree), name="Ω(U(1))")
    C.classical = classical
    return Q, C


def _span_equal(xs: Sequence[Vec], ys: Sequence[Vec]) -> bool:
    space = VectorSpace(sorted({k for v in list(xs) + list(ys) for k in v}, key=repr))
    rank = lambda vs: Echelon(space.to_row(v) for v in vs).rank
    return rank(xs) == rank(ys) == rank(list(xs) + list(ys))


def u1_base_checks(C: BundleCalculus) -> CheckList:
    """Ω(B) for the U(1) example: B = C1, Ω¹(B) = C π(z) and dB = 0, so Ω¹(B) is not B dB B."""
    classical = C.classical
    pz = C.embed_hor(classical.germ(classical.fodc.germs.pi_basis(1)))
    base0, base1 = C.base_forms(0), C.base_forms(1)
    out = CheckList()
    out.add(single("base-functions", "B = C·1", _span_equal(base0, [C.unit()])))
    out.add(single("base-one-forms", "Ω¹(B) = C·π(z)", _span_equal(base1, [pz]), f"dim Ω¹(B) = {len(base1)}"))
    out.add(exhaustive("base-d-zero", "dB = {0}", base0, lambda b: not C.d(b), C.format))
    out.add(single("base-forms-not-generated", "Ω¹(B) ≠ B dB B", bool(base1) and all(not C.d(b) for b in base0)))
    return out


def horizontal_forms(C: BundleCalculus, degree: int) -> list:
    return C.horizontal_forms(degree)


def base_forms(C: BundleCalculus, degree: int) -> list:
    return C.base_forms(degree)


def verify_calculus(C: BundleCalculus, keys_by_degree=None) -> CheckList:
    """Ω(P) is a graded differential ∗-algebra and Δ_Ω a compatible coaction; sub-algebras close."""
    E = C.envelope
    top = C.max_degree
    out = verify_forms(C, keys_by_degree)
    kb = keys_by_degree or {k: C.basis(k) for k in range(top + 1)}
    keys = [k for j in range(top + 1) for k in kb.get(j, [])]
    fmt = lambda k: C.format(Vec.unit(k))

    def coassoc(key):
        left = Accumulator()
        right = Accumulator()
        for (a, g), c in C.coaction_basis(key).items():
            for (a1, g1), d in C.coaction_basis(a).items():
                left.add((a1, g1, g), c * d)
            for (g1, g2), d in E.coproduct_basis(g).items():
                right.add((a, g1, g2), c * d)
        return left.vec() == right.vec()

    def counit(key):
        acc = Accumulator()
        for (a, g), c in C.coaction_basis(key).items():
            acc.add(a, c * E.counit(Vec.unit(g)))
        return acc.vec() == Vec.unit(key)

    pairs = [(x, y) for x in keys for y in keys if C.degree_of(x) + C.degree_of(y) <= top]

    def mult(t):
        x, y = t
        return C.coaction(C.mul_basis(x, y)) == tensor_mul(C, E, C.coaction_basis(x), C.coaction_basis(y))

    out.add(exhaustive("coaction-coassociative", "(Δ_Ω⊗id)Δ_Ω = (id⊗Δ)Δ_Ω", keys, _tol(coassoc), fmt))
    out.add(exhaustive("coaction-counit", "(id⊗ε)Δ_Ω = id", keys, _tol(counit), fmt))
    out.add(exhaustive("coaction-multiplicative", "Δ_Ω(xy) = Δ_Ω(x)Δ_Ω(y)", pairs, _tol(mult), repr))
    out.add(exhaustive("coaction-d", "Δ_Ω d = d_⊗ Δ_Ω", [k for k in keys if C.degree_of(k) < top],
                       _tol(lambda k: C.coaction(C.d_basis(k)) == tensor_d(C, E, C.coaction_basis(k))), fmt))

    def coaction_star(key):
        acc = Accumulator()
        for (a, g), c in C.coaction_basis(key).items():
            for m, u in C.star_basis(a).items():
                for n, v in E.star_basis(g).items():
                    acc.add((m, n), c.conj() * u * v)
        return C.coaction(C.star_basis(key)) == acc.vec()

    out.add(exhaustive("coaction-star", "Δ_Ω(x*) = Δ_Ω(x)*", keys, _tol(coaction_star), fmt))

    base = [b for k in range(top + 1) for b in C.base_forms(k)]
    horiz = [b for k in range(top + 1) for b in C.horizontal_forms(k)]
    out.add(exhaustive("base-d-closed", "dΩ(B) ⊆ Ω(B)", [b for b in base if C.degree(b) < top],
                       _tol(lambda b: _is_base(C, C.d(b))), C.format))
    out.add(exhaustive("base-star-closed", "Ω(B)* = Ω(B)", base, _tol(lambda b: _is_base(C, C.star(b))), C.format))
    out.add(exhaustive("horizontal-star-closed", "Hor* = Hor", horiz,
                       _tol(lambda b: _is_horizontal(C, C.star(b))), C.format))
    out.add(exhaustive("horizontal-product-closed", "Hor · Hor ⊆ Hor",
                       [(a, b) for a in horiz for b in horiz if C.degree(a) + C.degree(b) <= top],
                       _tol(lambda t: _is_horizontal(C, C.mul(*t))), repr))
    return out


def _is_base(C: BundleCalculus, x: Vec) -> bool:
    return C.coaction(x) == C.tensor_one(x)


def _is_horizontal(C: BundleCalculus, x: Vec) -> bool:
    return all(C.envelope.degree_of(g) == 0 for (_, g) in C.coaction(x))


# --- balanced tensor products -------------------------------------------------------------

class BalancedTensor:
    """Ω(P) ⊗_{Ω(B)} Ω(P) per total degree as a quotient by x μ ⊗ y − x ⊗ μ y.

    Relations whose products leave a truncation window are dropped, so on
    windowed algebras membership in the relation span is a sufficient test
    for zero (exact for finite bundles).
    """

    def __init__(self, C: BundleCalculus, max_total: int | None = None, keys_by_degree=None):
        self.calc = C
        top = C.max_degree if max_total is None else max_total
        self.max_total = top
        kb = keys_by_degree or {k: C.basis(k) for k in range(C.max_degree + 1)}
        self.keys_by_degree = kb
        base = {k: C.base_forms(k) for k in range(C.max_degree + 1)}
        self._quot = {}
        for n in range(top + 1):
            pairs = [(x, y) for a in range(n + 1) for x in kb.get(a, []) for y in kb.get(n - a, [])]
            space = VectorSpace(pairs)
            rels = []
            for da in range(n + 1):
                for dm in range(n - da + 1):
                    db = n - da - dm
                    for x in kb.get(da, []):
                        for mu in base.get(dm, []):
                            try:
                                xm = C.mul(Vec.unit(x), mu)
                            except TruncationOverflow:
                                continue
                            for y in kb.get(db, []):
                                try:
                                    my = C.mul(mu, Vec.unit(y))
                                except TruncationOverflow:
                                    continue
                                r = _pairs(xm, Vec.unit(y)) - _pairs(Vec.unit(x), my)
                                if r and all(p in space for p in r):
                                    rels.append(r)
            self._quot[n] = Quotient(space, rels)

    def normal_form(self, t: Vec) -> Vec:
        by_deg: dict = {}
        for p, c in t.items():
            by_deg.setdefault(self.calc.pair_degree(p), Accumulator()).add(p, c)
        out = Vec()
        for n, acc in by_deg.items():
            out = out + self._quot[n].project(acc.vec())
        return out

    def equal(self, s: Vec, t: Vec) -> bool:
        return not self.normal_form(s - t)

    def normal_form3(self, t: Vec, tail_first: bool = False) -> Vec:
        """Normal form of Vecs over (x, y, g): the first two legs balanced, g carried along."""
        groups: dict = {}
        for (x, y, g), c in t.items():
            groups.setdefault(g, Accumulator()).add((x, y), c)
        out = Accumulator()
        for g, acc in groups.items():
            for (x, y), c in self.normal_form(acc.vec()).items():
                out.add((x, y, g), c)
        return out.vec()


def _pairs(x: Vec, y: Vec) -> Vec:
    return Vec._raw({(a, b): c * d for a, c in x.items() for b, d in y.items()})


def m_balanced(C: BundleCalculus, t: Vec) -> Vec:
    acc = Accumulator()
    for (x, y), c in t.items():
        acc.add_vec(C.mul_basis(x, y), c)
    return acc.vec()


def d_balanced(C: BundleCalculus, t: Vec) -> Vec:
    """d(x ⊗ y) = dx ⊗ y + (−1)^{|x|} x ⊗ dy."""
    acc = Accumulator()
    for (x, y), c in t.items():
        for m, u in C.d_basis(x).items():
            acc.add((m, y), c * u)
        s = _sign(C.degree_of(x))
        for n, v in C.d_basis(y).items():
            acc.add((x, n), c * v * s)
    return acc.vec()


def left_mul(C: BundleCalculus, a: Vec, t: Vec) -> Vec:
    acc = Accumulator()
    for (x, y), c in t.items():
        for m, u in C.mul(a, Vec.unit(x)).items():
            acc.add((m, y), c * u)
    return acc.vec()


def right_mul(C: BundleCalculus, t: Vec, b: Vec) -> Vec:
    acc = Accumulator()
    for (x, y), c in t.items():
        for n, v in C.mul(Vec.unit(y), b).items():
            acc.add((x, n), c * v)
    return acc.vec()


# --- translation map ----------------------------------------------------------------------

def qtrs0_from_intertwiners(Q: Qpb, g: Vec, families: dict | None = None) -> Vec:
    """qtrs(g_ij) = Σ_k x*_ki ⊗ x_kj, after writing g in the corepresentation coefficients."""
    H = Q.hopf
    coreps = Q.coreps
    if not coreps:
        raise MissingCorepresentation("no corepresentation data for this bundle")
    families = families if families is not None else Q.families
    coeffs = []
    for ci, V in enumerate(coreps):
        for i in range(V.dim):
            for j in range(V.dim):
                coeffs.append((ci, i, j, V.g[i][j]))
    sp = H.space
    rows: dict = {}
    for col, (_, _, _, v) in enumerate(coeffs):
        for a, c in v.items():
            rows.setdefault(sp.index(a), {})[col] = c
    target = sp.to_row(g)
    keys = sorted(set(rows) | set(target))
    sol = solve_rows([rows.get(r, {}) for r in keys], [target.get(r, ZERO) for r in keys], len(coeffs))
    if sol is None:
        raise MissingCorepresentation(f"{H.format(g)} is not in the span of the known coefficients")
    hor = Q.hor
    acc = Accumulator()
    for col, c in sol.items():
        ci, i, j, _ = coeffs[col]
        V = coreps[ci]
        fam = families.get(V.name)
        if fam is None:
            fam = families[V.name] = _family_for(Q, V)
        for k in range(fam.size):
            left = _hor_star(hor, fam.x(k, i))
            for a, u in left.items():
                for b, v in fam.x(k, j).items():
                    acc.add(((a, ()), (b, ())), c * u * v)
    return acc.vec()


def _family_for(Q: Qpb, V: Corepresentation) -> IntertwinerFamily:
    if hasattr(Q, "orbits"):
        return build_intertwiners(Q, V)
    if isinstance(Q.hor, EnvelopeHor):
        # P = H: T(e_i) = g_1i style family from the coefficient row of the character
        return IntertwinerFamily(Q, V, [[_embed0(Q, V.g[k][i]) for i in range(V.dim)] for k in range(V.dim)])
    raise MissingCorepresentation(f"no intertwiners for {V.name}")


def _embed0(Q: Qpb, h: Vec) -> Vec:
    return Vec._raw({(a, ()): c for a, c in h.items()})


def qtrs0_by_solving(C: BundleCalculus, g: Vec, keys0: Sequence | None = None) -> Vec | None:
    """A preimage of 1 ⊗ g under β̃ among degree-0 pairs (linear solve)."""
    keys0 = list(keys0 if keys0 is not None else C.basis(0))
    pairs = [(x, y) for x in keys0 for y in keys0]
    target = Accumulator()
    for k, c in C.unit().items():
        for h, d in g.items():
            target.add((k, (h, ())), c * d)
    target = target.vec()
    index: dict = {}
    cols = []
    for p in pairs:
        try:
            v = C.beta(*p)
        except TruncationOverflow:
            v = None
        cols.append(v)
    usable = [(p, v) for p, v in zip(pairs, cols) if v is not None]
    for _, v in usable:
        for lab in v:
            index.setdefault(lab, len(index))
    for lab in target:
        index.setdefault(lab, len(index))
    rows: dict = {}
    for j, (_, v) in enumerate(usable):
        for lab, c in v.items():
            rows.setdefault(index[lab], {})[j] = c
    rhs = [target[lab] for lab in index]
    sol = solve_rows([rows.get(r, {}) for r in range(len(index))], rhs, len(usable))
    if sol is None:
        return None
    return Vec({usable[j][0]: c for j, c in sol.items()})


class TranslationMap:
    """qtrs on Γ^∧ built from the degree-0 map and a real connection ω."""

    def __init__(self, C: BundleCalculus, omega: Callable | None = None, qtrs0: Callable | None = None):
        self.calc = C
        self.omega = omega or trivial_connection(C)
        self._qtrs0 = qtrs0 or (lambda g: qtrs0_from_intertwiners(C.qpb, g))
        self._h: dict = {}
        self._germ: dict = {}
        self._key: dict = {}

    def on_h(self, a) -> Vec:
        v = self._h.get(a)
        if v is None:
            v = self._h[a] = self._qtrs0(Vec.unit(a))
        return v

    def on_germ(self, t) -> Vec:
        """qtrs(θ) = 1 ⊗ ω(θ) − Σ ω(θ_a)[h_a]1 ⊗ [h_a]2 for ad(θ) = Σ θ_a ⊗ h_a."""
        v = self._germ.get(t)
        if v is not None:
            return v
        C = self.calc
        acc = Accumulator()
        for k, c in C.unit().items():
            for m, d in self.omega(t).items():
                acc.add((k, m), c * d)
        for (s, h), c in C.fodc.ad(Vec.unit(t)).items():
            w = self.omega(s)
            for p, u in left_mul(C, w, self.on_h(h)).items():
                acc.add(p, -c * u)
        v = self._germ[t] = acc.vec()
        return v

    def _times(self, left: Vec, letter: Vec, left_degree: int) -> Vec:
        """qtrs(ϑυ) = (−1)^{∂ϑ∂[υ]1} [υ]1 qtrs(ϑ) [υ]2."""
        C = self.calc
        acc = Accumulator()
        for (u1, u2), c in letter.items():
            s = _sign(left_degree * C.degree_of(u1))
            for (x, y), d in left.items():
                xs = C.mul_basis(u1, x)
                if not xs:
                    continue
                ys = C.mul_basis(y, u2)
                for m, p in xs.items():
                    for n, q in ys.items():
                        acc.add((m, n), c * d * p * q * s)
        return acc.vec()

    def on_word(self, h, word: Sequence) -> Vec:
        """qtrs(h θ1 … θk) on an unprojected word, letter by letter."""
        out = self.on_h(h)
        for i, t in enumerate(word):
            out = self._times(out, self.on_germ(t), i)
        return out

    def on_key(self, key) -> Vec:
        v = self._key.get(key)
        if v is None:
            v = self._key[key] = self.on_word(*key)
        return v

    def __call__(self, x: Vec) -> Vec:
        acc = Accumulator()
        for k, c in x.items():
            acc.add_vec(self.on_key(k), c)
        return acc.vec()

    def extended(self, w, key) -> Vec:
        """q̃trs(w ⊗ ϑ) = (w ⊗ 1) qtrs(ϑ)."""
        return left_mul(self.calc, Vec.unit(w), self.on_key(key))


def qtrs0(Q: Qpb, g: Vec) -> Vec:
    return qtrs0_from_intertwiners(Q, g)


def qtrs_extend(C: BundleCalculus, omega: Callable | None, theta: Vec) -> Vec:
    return TranslationMap(C, omega)(theta)


def verify_qtrs_properties(C: BundleCalculus, T: TranslationMap, max_degree: int = 2,
                           bal: BalancedTensor | None = None, hkeys: Sequence | None = None,
                           wkeys: Sequence | None = None) -> CheckList:
    """β̃/q̃trs inverse pair, the four structural points, d-compatibility and the ideal."""
    E = C.envelope
    H = C.hopf
    bal = bal or BalancedTensor(C, max_degree + 1)
    hkeys = list(hkeys if hkeys is not None else H.basis)
    theta_keys = [(h, w) for k in range(max_degree + 1) for (h, w) in E.basis(k) if h in hkeys]
    wkeys = list(wkeys) if wkeys is not None else [k for j in range(max_degree + 1) for k in C.basis(j)]
    out = CheckList()
    fmtE = lambda k: E.format(Vec.unit(k))

    def right_inverse(key):
        want = Accumulator()
        for k, c in C.unit().items():
            want.add((k, key), c)
        return C.beta_vec(T.on_key(key)) == want.vec()

    out.add(exhaustive("beta-qtrs", "β̃ ∘ q̃trs = id", theta_keys, _tol(right_inverse), fmtE))

    def left_inverse(p):
        x, y = p
        acc = Vec()
        for (m, g), c in C.beta(x, y).items():
            acc = acc + T.extended(m, g) * c
        return bal.equal(acc, Vec.unit(p))

    pairs = [(x, y) for x in wkeys for y in wkeys if C.degree_of(x) + C.degree_of(y) <= max_degree]
    out.add(exhaustive("qtrs-beta", "q̃trs ∘ β̃ = id", pairs, _tol(left_inverse), repr))

    out.add(exhaustive("qtrs-unit", "qtrs(1) = 1 ⊗ 1", [None],
                       _tol(lambda _: bal.equal(T(E.unit()), _pairs(C.unit(), C.unit()))), repr))

    def point1(key):
        want = C.unit() * E.counit(Vec.unit(key))
        return m_balanced(C, T.on_key(key)) == want

    out.add(exhaustive("qtrs-point-1", "[ϑ]1[ϑ]2 = ε(ϑ)1", theta_keys, _tol(point1), fmtE))

    def point2(key):
        lhs = Accumulator()
        for (x, y), c in T.on_key(key).items():
            for (y0, g), d in C.coaction_basis(y).items():
                lhs.add((x, y0, g), c * d)
        rhs = Accumulator()
        for (a, b), c in E.coproduct_basis(key).items():
            for (x, y), d in T.on_key(a).items():
                rhs.add((x, y, b), c * d)
        return bal.normal_form3(lhs.vec() - rhs.vec()) == Vec()

    out.add(exhaustive("qtrs-point-2", "(id ⊗ Δ_Ω) qtrs = (qtrs ⊗ id) Δ", theta_keys, _tol(point2), fmtE))

    def point3(key):
        # compare after moving the Γ^∧ leg to the end: a⊗g⊗y ↦ (−1)^{|g||y|} a⊗y⊗g
        lhs = Accumulator()
        for (x, y), c in T.on_key(key).items():
            for (x0, g), d in C.coaction_basis(x).items():
                s = _sign(E.degree_of(g) * C.degree_of(y))
                lhs.add((x0, y, g), c * d * s)
        rhs = Accumulator()
        for (a, b), c in E.coproduct_basis(key).items():
            sa = E.antipode_basis(a)
            for (x, y), d in T.on_key(b).items():
                for g, e in sa.items():
                    s = _sign(E.degree_of(g) * C.degree_of(x))
                    s2 = _sign(E.degree_of(g) * C.degree_of(y))
                    rhs.add((x, y, g), c * d * e * s * s2)
        return bal.normal_form3(lhs.vec() - rhs.vec()) == Vec()

    out.add(exhaustive("qtrs-point-3", "(Δ_Ω ⊗ id) qtrs = (σ ⊗ id)(S ⊗ qtrs) Δ", theta_keys, _tol(point3), fmtE))

    base = [(b, C.degree(b) if b else 0) for k in range(max_degree + 1) for b in C.base_forms(k)]

    def point4(t):
        key, (mu, k) = t
        l = E.degree_of(key)
        q = T.on_key(key)
        return bal.equal(left_mul(C, mu, q), right_mul(C, q, mu) * _sign(l * k))

    out.add(exhaustive("qtrs-point-4", "μ qtrs(ϑ) = (−1)^{lk} qtrs(ϑ) μ",
                       [(key, m) for key in theta_keys for m in base if E.degree_of(key) + m[1] <= max_degree],
                       _tol(point4), lambda t: f"{fmtE(t[0])} , {C.format(t[1][0])}"))

    def commutes_d(key):
        return bal.equal(T(E.d_basis(key)), d_balanced(C, T.on_key(key)))

    out.add(exhaustive("qtrs-d", "qtrs ∘ d = d_⊗ ∘ qtrs", [k for k in theta_keys if E.degree_of(k) < max_degree],
                       _tol(commutes_d), fmtE))

    def kills_ideal(rel):
        acc = Vec()
        for w, c in rel.items():
            for h, d in H.unit().items():
                if h in hkeys:
                    acc = acc + T.on_word(h, w) * (c * d)
        return bal.equal(acc, Vec())

    out.add(exhaustive("qtrs-ideal", "qtrs vanishes on the envelope ideal", E.germs.relations,
                       _tol(kills_ideal), repr))
    return out


def point4_sign(C: BundleCalculus, T: TranslationMap, bal: BalancedTensor, key, mu: Vec) -> int | None:
    """The sign s with μ qtrs(ϑ) = s qtrs(ϑ) μ, or None if neither sign holds (0 if both sides vanish)."""
    q = T.on_key(key)
    lhs = left_mul(C, mu, q)
    rhs = right_mul(C, q, mu)
    plus = bal.equal(lhs, rhs)
    minus = bal.equal(lhs, -rhs)
    if plus and minus:
        return 0
    return 1 if plus else (-1 if minus else None)
