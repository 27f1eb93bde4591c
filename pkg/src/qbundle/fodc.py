"""Bicovariant first-order calculi from Ad-invariant right ideals of Ker ε.

Γ is kept left-trivialized as H ⊗ qg#, with qg# = Ker ε / R realized on
coset representatives: a germ is a Vec over the H-labels left free by the
quotient of H by R + C1.
"""
from __future__ import annotations

from typing import Iterable, Sequence

from .checks import Check, CheckList, exhaustive, single
from .hopf import FiniteGroup, FunctionAlgebra, HopfAlgebra, LaurentAlgebra, TruncationOverflow
from .linalg import Accumulator, Echelon, Quotient, Vec, VectorSpace


class GeneratorNotInKerEps(ValueError):
    pass


class NotAdInvariant(ValueError):
    def __init__(self, message: str, witness: str):
        super().__init__(message)
        self.witness = witness


class NotConjugationClosed(ValueError):
    pass


class IllDefined(ValueError):
    pass


class RightIdeal:
    """A right ideal R ⊆ Ker ε of H with an explicit (echelon) basis."""

    def __init__(self, parent: HopfAlgebra, generators: Sequence[Vec], closure_basis: Sequence[Vec]):
        self.parent = parent
        self.generators = tuple(generators)
        self.closure_basis = tuple(closure_basis)
        self._ech = Echelon(parent.space.to_row(v) for v in self.closure_basis)

    @property
    def dim(self) -> int:
        return len(self.closure_basis)

    def contains(self, v: Vec) -> bool:
        return self._ech.contains(self.parent.space.to_row(v))

    def __repr__(self):
        return f"RightIdeal(dim={self.dim} in {self.parent.name})"


def _right_closure(H: HopfAlgebra, generators: Sequence[Vec]) -> list:
    """Iterate right multiplication by basis elements to a fixed point.

    Products leaving a truncation window are skipped: for Laurent windows
    the support of r·z^k is the shifted support of r, so this computes the
    ideal intersected with the window exactly.
    """
    sp = H.space
    ech = Echelon()
    basis = []
    queue = list(generators)
    while queue:
        v = queue.pop()
        if not v or not ech.add(sp.to_row(v)):
            continue
        basis.append(v)
        for b in H.basis:
            try:
                w = H.mul(v, Vec.unit(b))
            except TruncationOverflow:
                continue
            if w and not ech.contains(sp.to_row(w)):
                queue.append(w)
    return basis


def _ad_witness(H: HopfAlgebra, ideal: RightIdeal) -> Vec | None:
    """An element r of R with Ad(r) ∉ R ⊗ H, or None."""
    for r in ideal.closure_basis:
        parts: dict = {}
        for (x, y), c in H.adjoint(r).items():
            parts.setdefault(y, Accumulator()).add(x, c)
        if any(not ideal.contains(acc.vec()) for acc in parts.values()):
            return r
    return None


def close_right_ideal(H: HopfAlgebra, generators: Iterable[Vec]) -> RightIdeal:
    gens = [Vec(g.items()) for g in generators]
    for g in gens:
        if H.counit(g):
            raise GeneratorNotInKerEps(f"ε({H.format(g)}) = {H.counit(g)} ≠ 0")
    ideal = RightIdeal(H, gens, _right_closure(H, gens))
    bad = _ad_witness(H, ideal)
    if bad is not None:
        w = H.format(bad)
        raise NotAdInvariant(f"Ad({w}) leaves R ⊗ H", w)
    return ideal


def ker_eps_basis(H: HopfAlgebra) -> list:
    """Basis {b − ε(b)1} of Ker ε, dropping zeros."""
    one = H.unit()
    out = []
    for b in H.basis:
        v = Vec.unit(b) - one * H.counit_basis(b)
        if v:
            out.append(v)
    return out


def ker2_ideal(H: HopfAlgebra) -> RightIdeal:
    """Span of all pairwise products of Ker ε."""
    kb = ker_eps_basis(H)
    prods = []
    for a in kb:
        for b in kb:
            try:
                prods.append(H.mul(a, b))
            except TruncationOverflow:
                continue
    sp = H.space
    ech = Echelon()
    gens = [p for p in prods if p and ech.add(sp.to_row(p))]
    return close_right_ideal(H, gens)


def _default_preferred(H: HopfAlgebra) -> tuple:
    # z is the natural free representative for Laurent germs
    if isinstance(H, LaurentAlgebra) and H.hi >= 1:
        return (1,)
    return ()


class GermsSpace:
    """qg# = Ker ε / R on coset representatives; ``preferred`` labels are kept free if possible."""

    def __init__(self, ideal: RightIdeal, preferred: Sequence = None):
        H = ideal.parent
        self.ideal = ideal
        self.hopf = H
        pref = tuple(_default_preferred(H) if preferred is None else preferred)
        order = [b for b in H.basis if b not in pref] + [b for b in pref if b in H.space]
        self._space = VectorSpace(order)
        self._quot = Quotient(self._space, [H.unit(), *ideal.closure_basis])
        self.basis = tuple(self._quot.target.labels)
        self.space = VectorSpace(self.basis)
        self._pi: dict = {}

    @property
    def dim(self) -> int:
        return len(self.basis)

    def pi_basis(self, a) -> Vec:
        v = self._pi.get(a)
        if v is None:
            v = self._pi[a] = self._quot.project(Vec.unit(a))
        return v

    def pi(self, g: Vec) -> Vec:
        """[g − ε(g)1]; the unit lies in the quotiented span, so the ε-term is implicit."""
        return g.apply(self.pi_basis)

    @property
    def pi_map(self):
        from .linalg import LinearMap
        return LinearMap.from_function(self.hopf.space, self.space, self.pi_basis)

    def representative(self, theta: Vec) -> Vec:
        """An element h with π(h) = θ (the coset labels themselves)."""
        return Vec(theta.items())

    def label_str(self, a) -> str:
        return f"π({self.hopf.label_str(a)})"

    def format(self, theta: Vec) -> str:
        if not theta:
            return "0"
        idx = {b: i for i, b in enumerate(self.basis)}
        return " + ".join(f"({c})*{self.label_str(a)}" for a, c in sorted(theta.items(), key=lambda kv: idx[kv[0]]))


def germs_map(G: GermsSpace, g: Vec) -> Vec:
    return G.pi(g)


class Fodc:
    """(Γ = H ⊗ qg#, d) with the bimodule and ∗-structure derived from π."""

    def __init__(self, ideal: RightIdeal, preferred: Sequence = None):
        self.germs = GermsSpace(ideal, preferred)
        self.hopf = ideal.parent
        self._act: dict = {}
        self._ad: dict | None = None

    @property
    def ideal(self) -> RightIdeal:
        return self.germs.ideal

    # germs level ---------------------------------------------------------
    def pi(self, g: Vec) -> Vec:
        return self.germs.pi(g)

    def act_basis(self, t, b) -> Vec:
        """π(t)∘b = π(t b − ε(t) b) for a coset label t and an H-label b."""
        key = (t, b)
        v = self._act.get(key)
        if v is None:
            H = self.hopf
            tb = H.mul_basis(t, b) - Vec.unit(b) * H.counit_basis(t)
            v = self._act[key] = self.pi(tb)
        return v

    def act(self, theta: Vec, g: Vec) -> Vec:
        acc = Accumulator()
        for t, c in theta.items():
            for b, d in g.items():
                acc.add_vec(self.act_basis(t, b), c * d)
        return acc.vec()

    def germ_star(self, theta: Vec) -> Vec:
        """θ* = −π(S(h)*) for θ = π(h)."""
        H = self.hopf
        return -self.pi(H.star(H.antipode(self.germs.representative(theta))))

    def _ad_table(self) -> dict:
        if self._ad is None:
            H = self.hopf
            G = self.germs

            def push(h: Vec) -> Vec:
                acc = Accumulator()
                for (x, y), c in H.adjoint(h).items():
                    for t, u in G.pi_basis(x).items():
                        acc.add((t, y), c * u)
                return acc.vec()

            for r in [H.unit(), *self.ideal.closure_basis]:
                if push(r):
                    raise IllDefined(f"(π⊗id)Ad does not vanish on {H.format(r)}")
            self._ad = {t: push(Vec.unit(t)) for t in G.basis}
        return self._ad

    def ad(self, theta: Vec) -> Vec:
        """Right adjoint coaction on germs as a Vec over (germ label, H-label)."""
        table = self._ad_table()
        acc = Accumulator()
        for t, c in theta.items():
            acc.add_vec(table[t], c)
        return acc.vec()

    # Γ level ---------------------------------------------------------------
    def d_basis(self, a) -> Vec:
        acc = Accumulator()
        for (x, y), c in self.hopf.coproduct_basis(a).items():
            for t, u in self.germs.pi_basis(y).items():
                acc.add((x, t), c * u)
        return acc.vec()

    def d(self, g: Vec) -> Vec:
        return g.apply(self.d_basis)

    def left(self, h: Vec, form: Vec) -> Vec:
        H = self.hopf
        acc = Accumulator()
        for a, c in h.items():
            for (x, t), u in form.items():
                for m, w in H.mul_basis(a, x).items():
                    acc.add((m, t), c * u * w)
        return acc.vec()

    def right(self, form: Vec, g: Vec) -> Vec:
        """(h ⊗ θ) g = h g(1) ⊗ θ∘g(2)."""
        H = self.hopf
        acc = Accumulator()
        for b, c in g.items():
            for (g1, g2), k in H.coproduct_basis(b).items():
                for (x, t), u in form.items():
                    th = self.act_basis(t, g2)
                    if not th:
                        continue
                    for m, w in H.mul_basis(x, g1).items():
                        cw = c * k * u * w
                        for s, v in th.items():
                            acc.add((m, s), cw * v)
        return acc.vec()

    def invariant(self, theta: Vec) -> Vec:
        """1 ⊗ θ inside Γ."""
        one = self.hopf.unit()
        acc = Accumulator()
        for a, c in one.items():
            for t, u in theta.items():
                acc.add((a, t), c * u)
        return acc.vec()

    def star(self, form: Vec) -> Vec:
        """(h ⊗ θ)* = (1 ⊗ θ)* h* with (1 ⊗ π(k))* = d(k(2)*) S(k(1))*."""
        H = self.hopf
        acc = Accumulator()
        for (x, t), c in form.items():
            inv = Vec()
            for (k1, k2), u in H.coproduct_basis(t).items():
                inv = inv + self.right(self.d(H.star_basis(k2)), H.star(H.antipode_basis(k1))) * u.conj()
            acc.add_vec(self.right(inv, H.star_basis(x)), c.conj())
        return acc.vec()

    def format_form(self, form: Vec) -> str:
        if not form:
            return "0"
        return " + ".join(f"({c})*{self.hopf.label_str(x)}⊗{self.germs.label_str(t)}"
                          for (x, t), c in form.sorted_items())


def ad_on_germs(F: Fodc, theta: Vec, representative: Vec | None = None) -> Vec:
    """ad(θ); with an explicit representative h the value is (π⊗id)Ad(h), checked against the table."""
    val = F.ad(theta)
    if representative is not None:
        H = F.hopf
        if F.pi(representative) != theta:
            raise ValueError("representative does not map to θ")
        alt = Accumulator()
        for (x, y), c in H.adjoint(representative).items():
            for t, u in F.germs.pi_basis(x).items():
                alt.add((t, y), c * u)
        if alt.vec() != val:
            raise IllDefined("ad depends on the coset representative")
    return val


def module_action(F: Fodc, theta: Vec, g: Vec) -> Vec:
    return F.act(theta, g)


def quantum_lie_bracket(F: Fodc, theta: Vec) -> Vec:
    """c^T = (id ⊗ π) ad, as a Vec over germ-label pairs."""
    acc = Accumulator()
    for (t, y), c in F.ad(theta).items():
        for s, u in F.germs.pi_basis(y).items():
            acc.add((t, s), c * u)
    return acc.vec()


def reflection_fodc(W: FiniteGroup, reflections: Iterable, H: FunctionAlgebra | None = None) -> Fodc:
    """R = functions in Ker ε vanishing on every reflection; germs π(δ_σ)."""
    refl = set(reflections)
    if W.identity in refl:
        raise NotConjugationClosed("the identity cannot be a reflection")
    missing = [x for x in refl if x not in W.elements]
    if missing:
        raise ValueError(f"{missing[0]!r} is not a group element")
    if not W.is_conjugation_closed(refl):
        raise NotConjugationClosed(f"{sorted(map(str, refl))} is not closed under conjugation")
    H = H or FunctionAlgebra(W)
    gens = [Vec.unit(g) for g in W.elements if g != W.identity and g not in refl]
    return Fodc(close_right_ideal(H, gens), preferred=[g for g in W.elements if g in refl])


# --- verification ---------------------------------------------------------

def _tolerant(f):
    """Predicate wrapper: a product leaving a truncation window is not evidence either way."""
    def run(x):
        try:
            return f(x)
        except TruncationOverflow:
            return True
    return run


def verify_germ_identities(F: Fodc, pi=None) -> CheckList:
    """Each germ identity on every H basis element.

    ``pi`` overrides the germs map used in the kernel check (to exhibit a
    corrupted map); it must return germ coordinates or H/R cosets.
    """
    H = F.hopf
    G = F.germs
    out = CheckList()
    basis = list(H.basis)
    one = H.unit()
    mine = pi or G.pi

    def name_of(h: Vec) -> str:
        return "1" if h == one else H.format(h)

    kernel_items = [one, *F.ideal.closure_basis]
    c = exhaustive("ker-pi", "ker π = R ⊕ C1", kernel_items, lambda h: not mine(h), name_of)
    if c.passed:
        rows = Echelon(H.space.to_row(v) for v in kernel_items)
        if len(H.basis) - rows.rank != G.dim:
            c = Check("ker-pi", "ker π = R ⊕ C1", False, "dimension count")
    out.add(c)
    out.add(single("pi-surjective", "π(Ker ε) = qg#",
                   Echelon(G.space.to_row(G.pi(v)) for v in ker_eps_basis(H)).rank == G.dim,
                   "image rank"))

    def s_dg(a):
        acc = Vec()
        for (x, y), c in H.coproduct_basis(a).items():
            acc = acc + F.left(H.antipode_basis(x), F.d_basis(y)) * c
        return acc == F.invariant(G.pi_basis(a))

    out.add(exhaustive("pi-via-d", "π(g) = S(g(1)) dg(2)", basis, _tolerant(s_dg), H.label_str))

    quot_r = Quotient(H.space, F.ideal.closure_basis)

    def d_universal(a):
        # 1⊗g − g⊗1 ↦ x y(1) ⊗ y(2), right leg projected to H/R
        raw = Accumulator()
        for (y1, y2), c in H.coproduct_basis(a).items():
            raw.add((y1, y2), c)
        for b, c in one.items():
            raw.add((a, b), -c)
        proj = Accumulator()
        for (x, y), c in raw.vec().items():
            for t, u in quot_r.project(Vec.unit(y)).items():
                proj.add((x, t), c * u)
        proj = proj.vec()
        eps_leg = Accumulator()
        lifted = Accumulator()
        for (x, t), c in proj.items():
            eps_leg.add(x, c * H.counit_basis(t))
            for s, u in G.pi_basis(t).items():
                lifted.add((x, s), c * u)
        return not eps_leg.vec() and lifted.vec() == F.d_basis(a)

    out.add(exhaustive("d-via-universal", "dg = g(1) ⊗ π(g(2))", basis, _tolerant(d_universal), H.label_str))

    def dS_right(a):
        acc = Vec()
        for (x, y), c in H.coproduct_basis(a).items():
            acc = acc - F.right(F.d(H.antipode_basis(x)), Vec.unit(y)) * c
        return acc == F.invariant(G.pi_basis(a))

    out.add(exhaustive("pi-via-dS", "π(g) = −(dS(g(1))) g(2)", basis, _tolerant(dS_right), H.label_str))

    def d_antipode(a):
        acc = Vec()
        for (x, y), c in H.coproduct_basis(a).items():
            acc = acc - F.right(F.invariant(G.pi_basis(x)), H.antipode_basis(y)) * c
        return acc == F.d(H.antipode_basis(a))

    out.add(exhaustive("dS", "dS(g) = −π(g(1)) S(g(2))", basis, _tolerant(d_antipode), H.label_str))

    def pi_star(a):
        lhs = F.star(F.invariant(G.pi_basis(a)))
        rhs = F.invariant(-G.pi(H.star(H.antipode_basis(a))))
        return lhs == rhs

    out.add(exhaustive("pi-star", "π(g)* = −π(S(g)*)", basis, _tolerant(pi_star), H.label_str))

    def leibniz(t):
        a, b = t
        lhs = F.d(H.mul_basis(a, b))
        rhs = F.right(F.d_basis(a), Vec.unit(b)) + F.left(Vec.unit(a), F.d_basis(b))
        return lhs == rhs

    pairs = [(a, b) for a in basis for b in basis]
    out.add(exhaustive("leibniz", "d(gh) = (dg)h + g(dh)", pairs, _tolerant(leibniz), repr))

    germ_pairs = [(t, b) for t in G.basis for b in basis]

    def act_assoc(t):
        th, b = t
        for b2 in basis:
            lhs = F.act(F.act_basis(th, b), Vec.unit(b2))
            try:
                rhs = F.act(Vec.unit(th), H.mul_basis(b, b2))
            except TruncationOverflow:
                continue
            if lhs != rhs:
                return False
        return True

    out.add(exhaustive("action-associative", "(θ∘g)∘g' = θ∘(gg')", germ_pairs, _tolerant(act_assoc), repr))

    def act_star(t):
        th, b = t
        lhs = F.germ_star(F.act_basis(th, b))
        rhs = F.act(F.germ_star(Vec.unit(th)), H.star(H.antipode_basis(b)))
        return lhs == rhs

    out.add(exhaustive("action-star", "(θ∘g)* = θ*∘S(g)*", germ_pairs, _tolerant(act_star), repr))

    def intertwine(a):
        lhs = F.ad(G.pi_basis(a))
        rhs = Accumulator()
        for (x, y), c in H.adjoint(Vec.unit(a)).items():
            for s, u in G.pi_basis(x).items():
                rhs.add((s, y), c * u)
        return lhs == rhs.vec()

    try:
        out.add(exhaustive("ad-intertwines", "ad∘π = (π⊗id)Ad", basis, _tolerant(intertwine), H.label_str))
    except IllDefined as e:
        out.add(Check("ad-intertwines", "ad∘π = (π⊗id)Ad", False, str(e)))
    return out


def corrupted_pi(F: Fodc):
    """π without the ε(g)1 correction: g ↦ [g]_R in H/R."""
    q = Quotient(F.hopf.space, F.ideal.closure_basis)
    return q.project
