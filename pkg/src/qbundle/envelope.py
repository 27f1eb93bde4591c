"""The universal differential envelope Γ^∧ = H ⊗ qg#∧ up to a degree cap.

qg#∧ is the tensor algebra on the germs modulo the two-sided ideal generated
by Σ π(g(1)) ⊗ π(g(2)) for g in R.  Elements of a crossed form algebra
Hor ⊗ qg#∧ are Vecs over keys (hor_label, word) with ``word`` a coset
representative tuple of germ labels.
"""
from __future__ import annotations

from itertools import product as iproduct
from typing import Sequence

from .checks import CheckList, exhaustive
from .fodc import Fodc
from .hopf import HopfAlgebra, TruncationOverflow
from .linalg import ZERO, Accumulator, Quotient, Vec, VectorSpace


def _sign(n: int) -> int:
    return -1 if n % 2 else 1


def _concat(x: Vec, y: Vec) -> Vec:
    acc = Accumulator()
    for u, a in x.items():
        for v, b in y.items():
            acc.add(u + v, a * b)
    return acc.vec()


def ideal_generator(F: Fodc, g: Vec) -> Vec:
    """Σ π(g(1)) ⊗ π(g(2)) as a Vec over two-letter words."""
    H = F.hopf
    acc = Accumulator()
    for (a, b), c in H.coproduct(g).items():
        pa = F.germs.pi_basis(a)
        if not pa:
            continue
        pb = F.germs.pi_basis(b)
        for s, u in pa.items():
            for t, v in pb.items():
                acc.add((s, t), c * u * v)
    return acc.vec()


class GermAlgebra:
    """qg#∧ per degree, with the right H-action, d and ∗ on words."""

    def __init__(self, F: Fodc, max_degree: int, relations: Sequence[Vec] | None = None):
        if max_degree < 2:
            raise ValueError("max_degree must be at least 2")
        self.fodc = F
        self.hopf = F.hopf
        self.max_degree = max_degree
        letters = F.germs.basis
        if relations is None:
            relations = [ideal_generator(F, r) for r in F.ideal.closure_basis]
        self.relations = [r for r in relations if r]
        self._quot = {}
        self.basis = {}
        for k in range(max_degree + 1):
            words = list(iproduct(letters, repeat=k))
            sub = []
            if k >= 2:
                for left in range(k - 1):
                    right = k - 2 - left
                    for u in iproduct(letters, repeat=left):
                        for v in iproduct(letters, repeat=right):
                            for r in self.relations:
                                sub.append(_concat(_concat(Vec.unit(u), r), Vec.unit(v)))
            q = Quotient(VectorSpace(words), sub)
            self._quot[k] = q
            self.basis[k] = tuple(q.target.labels)
        self._proj: dict = {}
        self._act: dict = {}
        self._d: dict = {}

    def dims(self) -> list:
        return [len(self.basis[k]) for k in range(self.max_degree + 1)]

    def _check_degree(self, k: int):
        if k > self.max_degree:
            raise TruncationOverflow(f"degree {k} exceeds the cap {self.max_degree}")

    def project_word(self, w: tuple) -> Vec:
        v = self._proj.get(w)
        if v is None:
            self._check_degree(len(w))
            v = self._proj[w] = self._quot[len(w)].project(Vec.unit(w))
        return v

    def project(self, x: Vec) -> Vec:
        return x.apply(self.project_word)

    def in_ideal(self, x: Vec) -> bool:
        return not self.project(x)

    def mul(self, x: Vec, y: Vec) -> Vec:
        return self.project(_concat(x, y))

    def act_word(self, w: tuple, h) -> Vec:
        """(θ1…θk)∘h = (θ1∘h(1))…(θk∘h(k)), projected."""
        key = (w, h)
        v = self._act.get(key)
        if v is None:
            H = self.hopf
            if not w:
                v = Vec.unit((), H.counit_basis(h))
            else:
                acc = Accumulator()
                for (h1, h2), c in H.coproduct_basis(h).items():
                    first = self.fodc.act_basis(w[0], h1)
                    if not first:
                        continue
                    rest = self.act_word(w[1:], h2)
                    for t, a in first.items():
                        for u, b in rest.items():
                            acc.add((t,) + u, c * a * b)
                v = self.project(acc.vec())
            self._act[key] = v
        return v

    def act(self, x: Vec, g: Vec) -> Vec:
        acc = Accumulator()
        for w, c in x.items():
            for h, d in g.items():
                acc.add_vec(self.act_word(w, h), c * d)
        return acc.vec()

    def d_letter(self, t) -> Vec:
        """Maurer–Cartan: dπ(g) = −π(g(1)) π(g(2)) on the representative g = t."""
        return -ideal_generator(self.fodc, Vec.unit(t))

    def d_word(self, w: tuple) -> Vec:
        v = self._d.get(w)
        if v is None:
            self._check_degree(len(w) + 1)
            acc = Accumulator()
            for i, t in enumerate(w):
                mid = self.d_letter(t)
                s = _sign(i)
                for m, c in mid.items():
                    acc.add(w[:i] + m + w[i + 1:], c * s)
            v = self._d[w] = self.project(acc.vec())
        return v

    def d(self, x: Vec) -> Vec:
        return x.apply(self.d_word)

    def star_word(self, w: tuple) -> Vec:
        out = Vec.unit((), _sign(len(w) * (len(w) - 1) // 2))
        for t in reversed(w):
            out = _concat(out, self.letter(self.fodc.germ_star(Vec.unit(t))))
        return self.project(out)

    def star(self, x: Vec) -> Vec:
        acc = Accumulator()
        for w, c in x.items():
            acc.add_vec(self.star_word(w), c.conj())
        return acc.vec()

    def letter(self, theta: Vec) -> Vec:
        """A germ as a degree-1 word Vec."""
        return Vec._raw({(t,): c for t, c in theta.items()})


class HorAlgebra:
    """Graded ∗-algebra with a right H-coaction and a differential (the horizontal part)."""

    hopf: HopfAlgebra

    def degree(self, a) -> int:
        raise NotImplementedError

    def basis(self, k: int) -> list:
        raise NotImplementedError

    def unit(self) -> Vec:
        raise NotImplementedError

    def mul_basis(self, a, b) -> Vec:
        raise NotImplementedError

    def coaction_basis(self, a) -> Vec:
        """Vec over (hor label, H label)."""
        raise NotImplementedError

    def d_basis(self, a) -> Vec:
        raise NotImplementedError

    def star_basis(self, a) -> Vec:
        raise NotImplementedError

    def label_str(self, a) -> str:
        return str(a)


class HopfHor(HorAlgebra):
    """H itself in degree 0, coacting on itself by Δ, with zero differential."""

    def __init__(self, H: HopfAlgebra):
        self.hopf = H

    def degree(self, a) -> int:
        return 0

    def basis(self, k: int) -> list:
        return list(self.hopf.basis) if k == 0 else []

    def unit(self) -> Vec:
        return self.hopf.unit()

    def mul_basis(self, a, b) -> Vec:
        return self.hopf.mul_basis(a, b)

    def coaction_basis(self, a) -> Vec:
        return self.hopf.coproduct_basis(a)

    def d_basis(self, a) -> Vec:
        return Vec()

    def star_basis(self, a) -> Vec:
        return self.hopf.star_basis(a)

    def label_str(self, a) -> str:
        return self.hopf.label_str(a)


class CrossedForms:
    """Hor ⊗ qg#∧ with (α⊗w)(β⊗v) = (−1)^{|w||β|} αβ(0) ⊗ (w∘β(1)) v."""

    def __init__(self, hor: HorAlgebra, germs: GermAlgebra):
        self.hor = hor
        self.germs = germs
        self.fodc = germs.fodc
        self.hopf = germs.hopf
        self.max_degree = germs.max_degree
        self._mul: dict = {}
        self._d: dict = {}

    # bookkeeping -----------------------------------------------------------
    def degree_of(self, key) -> int:
        a, w = key
        return self.hor.degree(a) + len(w)

    def degree(self, x: Vec) -> int:
        degs = {self.degree_of(k) for k in x}
        if len(degs) > 1:
            raise ValueError("inhomogeneous element")
        return degs.pop() if degs else 0

    def basis(self, k: int) -> list:
        out = []
        for j in range(k + 1):
            for a in self.hor.basis(j):
                for w in self.germs.basis[k - j]:
                    out.append((a, w))
        return out

    def unit(self) -> Vec:
        return Vec._raw({(a, ()): c for a, c in self.hor.unit().items()})

    def embed_hor(self, alpha: Vec) -> Vec:
        return Vec._raw({(a, ()): c for a, c in alpha.items()})

    def embed_words(self, x: Vec, hor_part: Vec | None = None) -> Vec:
        """α ⊗ x for a word Vec x (α defaults to 1)."""
        base = self.hor.unit() if hor_part is None else hor_part
        acc = Accumulator()
        for a, c in base.items():
            for w, d in x.items():
                acc.add((a, w), c * d)
        return acc.vec()

    def germ(self, theta: Vec) -> Vec:
        return self.embed_words(self.germs.letter(theta))

    # algebra ---------------------------------------------------------------
    def mul_basis(self, x, y) -> Vec:
        key = (x, y)
        v = self._mul.get(key)
        if v is not None:
            return v
        a, w = x
        b, u = y
        db = self.hor.degree(b)
        if self.degree_of(x) + self.degree_of(y) > self.max_degree:
            raise TruncationOverflow("product exceeds the degree cap")
        s = _sign(len(w) * db)
        G = self.germs
        acc = Accumulator()
        for (b0, h), c in self.hor.coaction_basis(b).items():
            ab = self.hor.mul_basis(a, b0)
            if not ab:
                continue
            wh = G.act_word(w, h)
            if not wh:
                continue
            wu = G.mul(wh, Vec.unit(u)) if u else wh
            for m, p in ab.items():
                for z, q in wu.items():
                    acc.add((m, z), c * p * q * s)
        v = self._mul[key] = acc.vec()
        return v

    def mul(self, x: Vec, y: Vec) -> Vec:
        acc = Accumulator()
        for a, c in x.items():
            for b, d in y.items():
                acc.add_vec(self.mul_basis(a, b), c * d)
        return acc.vec()

    def prod(self, *xs: Vec) -> Vec:
        out = xs[0]
        for x in xs[1:]:
            out = self.mul(out, x)
        return out

    def d_basis(self, key) -> Vec:
        v = self._d.get(key)
        if v is not None:
            return v
        a, w = key
        if self.degree_of(key) + 1 > self.max_degree:
            raise TruncationOverflow("d exceeds the degree cap")
        G = self.germs
        pi = self.fodc.germs.pi_basis
        s = _sign(self.hor.degree(a))
        acc = Accumulator()
        for m, c in self.hor.d_basis(a).items():
            acc.add((m, w), c)
        for (a0, h), c in self.hor.coaction_basis(a).items():
            th = pi(h)
            if not th:
                continue
            for z, q in G.mul(G.letter(th), Vec.unit(w)).items():
                acc.add((a0, z), c * q * s)
        if w:
            for z, q in G.d_word(w).items():
                acc.add((a, z), q * s)
        v = self._d[key] = acc.vec()
        return v

    def d(self, x: Vec) -> Vec:
        return x.apply(self.d_basis)

    def star_basis(self, key) -> Vec:
        """(α⊗w)* = (−1)^{|α||w|} (1⊗w*)(α*⊗1)."""
        a, w = key
        s = _sign(self.hor.degree(a) * len(w))
        left = self.embed_words(self.germs.star_word(w))
        right = self.embed_hor(self.hor.star_basis(a))
        return self.mul(left, right) * s

    def star(self, x: Vec) -> Vec:
        acc = Accumulator()
        for k, c in x.items():
            acc.add_vec(self.star_basis(k), c.conj())
        return acc.vec()

    def right_act(self, x: Vec, g: Vec) -> Vec:
        """Right multiplication by a degree-0 element of H (only meaningful when Hor ⊇ H)."""
        return self.mul(x, self.embed_hor(g))

    def format(self, x: Vec) -> str:
        if not x:
            return "0"
        gl = self.fodc.germs.label_str
        parts = []
        for (a, w), c in x.sorted_items():
            word = "".join(gl(t) for t in w) or "1"
            parts.append(f"({c})*{self.hor.label_str(a)}⊗{word}")
        return " + ".join(parts)


def tensor_mul(A: CrossedForms, B: CrossedForms, x: Vec, y: Vec) -> Vec:
    """(a⊗b)(c⊗d) = (−1)^{|b||c|} ac ⊗ bd for Vecs over key pairs."""
    acc = Accumulator()
    for (a, b), p in x.items():
        db = B.degree_of(b)
        for (c, d), q in y.items():
            s = _sign(db * A.degree_of(c))
            ac = A.mul_basis(a, c)
            if not ac:
                continue
            bd = B.mul_basis(b, d)
            for m, u in ac.items():
                for n, v in bd.items():
                    acc.add((m, n), p * q * u * v * s)
    return acc.vec()


def bidegree_part(A: CrossedForms, x: Vec, p: int, q: int) -> Vec:
    """Component of a two-leg element in bidegree (p, q)."""
    return Vec._raw({(a, b): c for (a, b), c in x.items() if A.degree_of(a) == p and A.degree_of(b) == q})


def tensor_d(A: CrossedForms, B: CrossedForms, x: Vec) -> Vec:
    """d(a⊗b) = da⊗b + (−1)^{|a|} a⊗db."""
    acc = Accumulator()
    for (a, b), c in x.items():
        for m, u in A.d_basis(a).items():
            acc.add((m, b), c * u)
        s = _sign(A.degree_of(a))
        for n, v in B.d_basis(b).items():
            acc.add((a, n), c * v * s)
    return acc.vec()


class Envelope(CrossedForms):
    """Γ^∧ with its graded differential ∗-Hopf structure."""

    def __init__(self, F: Fodc, max_degree: int = 3, relations: Sequence[Vec] | None = None):
        super().__init__(HopfHor(F.hopf), GermAlgebra(F, max_degree, relations))
        self._cop: dict = {}
        self._s: dict = {}

    def dims(self) -> list:
        return self.germs.dims()

    def h(self, g: Vec) -> Vec:
        return self.embed_hor(g)

    def _delta_letter(self, t) -> Vec:
        """Δ(θ) = 1⊗θ + ad(θ)."""
        one = self.unit()
        acc = Accumulator()
        for k, c in one.items():
            for m, d in self.germ(Vec.unit(t)).items():
                acc.add((k, m), c * d)
        for (s, y), c in self.fodc.ad(Vec.unit(t)).items():
            for m, d in self.germ(Vec.unit(s)).items():
                acc.add((m, (y, ())), c * d)
        return acc.vec()

    def coproduct_basis(self, key) -> Vec:
        v = self._cop.get(key)
        if v is not None:
            return v
        a, w = key
        out = Vec._raw({((x, ()), (y, ())): c for (x, y), c in self.hopf.coproduct_basis(a).items()})
        for t in w:
            out = tensor_mul(self, self, out, self._delta_letter(t))
        v = self._cop[key] = out
        return v

    def coproduct(self, x: Vec) -> Vec:
        return x.apply(self.coproduct_basis)

    def counit(self, x: Vec) -> object:
        s = ZERO
        for (a, w), c in x.items():
            if not w:
                s = s + c * self.hopf.counit_basis(a)
        return s

    def _antipode_letter(self, t) -> Vec:
        """S(π(g)) = −π(g(2)) S(g(3)) S²(g(1)) for the representative g = t."""
        H = self.hopf
        acc = Vec()
        for (g1, g2, g3), c in H.coproduct2(Vec.unit(t)).items():
            th = self.fodc.germs.pi_basis(g2)
            if not th:
                continue
            tail = H.mul(H.antipode_basis(g3), H.antipode(H.antipode_basis(g1)))
            acc = acc - self.mul(self.germ(th), self.h(tail)) * c
        return acc

    def antipode_basis(self, key) -> Vec:
        v = self._s.get(key)
        if v is not None:
            return v
        a, w = key
        out = self.unit() * _sign(len(w) * (len(w) - 1) // 2)
        for t in reversed(w):
            out = self.mul(out, self._antipode_letter(t))
        v = self._s[key] = self.mul(out, self.h(self.hopf.antipode_basis(a)))
        return v

    def antipode(self, x: Vec) -> Vec:
        return x.apply(self.antipode_basis)

    def Ad(self, x: Vec) -> Vec:
        """Ad(t) = (−1)^{|t(1)||t(2)|} t(2) ⊗ S(t(1)) t(3)."""
        acc = Accumulator()
        for (k1, k23), c in self.coproduct(x).items():
            sk1 = self.antipode_basis(k1)
            d1 = self.degree_of(k1)
            for (k2, k3), e in self.coproduct_basis(k23).items():
                s = _sign(d1 * self.degree_of(k2))
                right = self.mul(sk1, Vec.unit(k3))
                for m, u in right.items():
                    acc.add((k2, m), c * e * u * s)
        return acc.vec()

    def module_action(self, x: Vec, g: Vec) -> Vec:
        """Right H-action on qg#∧ (word Vecs)."""
        return self.germs.act(x, g)


def build_envelope(F: Fodc, max_degree: int = 3) -> Envelope:
    return Envelope(F, max_degree)


def maurer_cartan(E: Envelope, g: Vec) -> Vec:
    """dπ(g) two ways: d(S(g(1)) dg(2)) and −π(g(1))π(g(2)); raises on mismatch."""
    H = E.hopf
    via_d = Vec()
    for (a, b), c in H.coproduct(g).items():
        via_d = via_d + E.mul(E.d(E.h(H.antipode_basis(a))), E.d(E.h(Vec.unit(b)))) * c
    formula = Vec()
    for (a, b), c in H.coproduct(g).items():
        pa = E.fodc.germs.pi_basis(a)
        pb = E.fodc.germs.pi_basis(b)
        if pa and pb:
            formula = formula - E.mul(E.germ(pa), E.germ(pb)) * c
    if via_d != formula:
        raise AssertionError(f"Maurer–Cartan mismatch at {H.format(g)}")
    return formula


def extended_coproduct(E: Envelope, w: Vec) -> Vec:
    return E.coproduct(w)


def extended_counit(E: Envelope, w: Vec):
    return E.counit(w)


def extended_antipode(E: Envelope, w: Vec) -> Vec:
    return E.antipode(w)


def extended_Ad(E: Envelope, t: Vec) -> Vec:
    return E.Ad(t)


def extended_module_action(E: Envelope, w: Vec, g: Vec) -> Vec:
    return E.module_action(w, g)


# --- verification ---------------------------------------------------------

def _tolerant(f):
    def run(x):
        try:
            return f(x)
        except TruncationOverflow:
            return True
    return run


def _keys_upto(E: CrossedForms, k: int) -> list:
    out = []
    for j in range(min(k, E.max_degree) + 1):
        out.extend(E.basis(j))
    return out


def verify_forms(E: CrossedForms, keys_by_degree=None) -> CheckList:
    """d² = 0, graded Leibniz, associativity and the graded ∗-structure on basis keys.

    ``keys_by_degree`` restricts the sampled keys (for windowed horizontal algebras).
    """
    top = E.max_degree
    out = CheckList()
    fmt = lambda k: E.format(Vec.unit(k))
    pair_fmt = lambda t: " , ".join(fmt(k) for k in t)
    if keys_by_degree is None:
        keys_by_degree = {k: E.basis(k) for k in range(top + 1)}

    def _keys_upto(_E, k):
        return [x for j in range(min(k, top) + 1) for x in keys_by_degree.get(j, [])]

    out.add(exhaustive("d-squared", "d² = 0", _keys_upto(E, top - 2),
                       _tolerant(lambda k: not E.d(E.d_basis(k))), fmt))

    pairs = [(x, y) for x in _keys_upto(E, top - 1) for y in _keys_upto(E, top - 1)
             if E.degree_of(x) + E.degree_of(y) <= top - 1]

    def leibniz(t):
        x, y = t
        lhs = E.d(E.mul_basis(x, y))
        rhs = E.mul(E.d_basis(x), Vec.unit(y)) + E.mul(Vec.unit(x), E.d_basis(y)) * _sign(E.degree_of(x))
        return lhs == rhs

    out.add(exhaustive("graded-leibniz", "d(xy) = (dx)y + (−1)^{|x|} x dy", pairs, _tolerant(leibniz), pair_fmt))

    def assoc(t):
        x, y, z = t
        return E.mul(E.mul_basis(x, y), Vec.unit(z)) == E.mul(Vec.unit(x), E.mul_basis(y, z))

    low = _keys_upto(E, 1)
    triples = [(x, y, z) for x in low for y in low for z in _keys_upto(E, top)
               if E.degree_of(x) + E.degree_of(y) + E.degree_of(z) <= top]
    out.add(exhaustive("associative", "(xy)z = x(yz)", triples, _tolerant(assoc), pair_fmt))

    allk = _keys_upto(E, top)
    out.add(exhaustive("star-involution", "x** = x", allk, _tolerant(lambda k: E.star(E.star_basis(k)) == Vec.unit(k)), fmt))
    out.add(exhaustive("star-antimultiplicative", "(xy)* = (−1)^{|x||y|} y* x*", pairs + [
        (x, y) for x in low for y in allk if E.degree_of(x) + E.degree_of(y) == top],
        _tolerant(lambda t: E.star(E.mul_basis(*t))
                  == E.mul(E.star_basis(t[1]), E.star_basis(t[0])) * _sign(E.degree_of(t[0]) * E.degree_of(t[1]))),
        pair_fmt))
    out.add(exhaustive("d-star", "d(x*) = (dx)*", _keys_upto(E, top - 1),
                       _tolerant(lambda k: E.d(E.star_basis(k)) == E.star(E.d_basis(k))), fmt))

    return out


def verify_envelope(E: Envelope, structure: bool = True) -> CheckList:
    """Exhaustive basis checks of the differential ∗-Hopf structure of Γ^∧."""
    H = E.hopf
    F = E.fodc
    G = E.germs
    top = E.max_degree
    out = CheckList()
    fmt = lambda k: E.format(Vec.unit(k))

    out.add(exhaustive("degree-0-is-H", "Γ^∧0 = H", [(a, b) for a in H.basis for b in H.basis],
                       _tolerant(lambda t: E.mul(E.h(Vec.unit(t[0])), E.h(Vec.unit(t[1]))) == E.h(H.mul_basis(*t))),
                       repr))

    def as_gamma(x: Vec) -> Vec:
        return Vec._raw({(a, w[0]): c for (a, w), c in x.items()})

    deg1 = E.basis(1)
    out.add(exhaustive("degree-1-d", "d on H agrees with the first-order calculus", list(H.basis),
                       _tolerant(lambda a: as_gamma(E.d(E.h(Vec.unit(a)))) == F.d_basis(a)), H.label_str))
    out.add(exhaustive("degree-1-bimodule", "Γ^∧1 = Γ as a bimodule", [(k, b) for k in deg1 for b in H.basis],
                       _tolerant(lambda t: as_gamma(E.mul(Vec.unit(t[0]), E.h(Vec.unit(t[1]))))
                                 == F.right(Vec.unit((t[0][0], t[0][1][0])), Vec.unit(t[1]))),
                       lambda t: f"{fmt(t[0])} · {H.label_str(t[1])}"))
    out.add(exhaustive("degree-1-star", "Γ^∧1 = Γ as a ∗-bimodule", deg1,
                       _tolerant(lambda k: as_gamma(E.star(Vec.unit(k))) == F.star(Vec.unit((k[0], k[1][0])))),
                       fmt))

    out.extend(verify_forms(E))

    rel_keys = _relation_elements(E)
    out.add(exhaustive("ideal-d", "d(ideal) ⊆ ideal", rel_keys,
                       _tolerant(lambda r: not E.d(r)) if top >= 3 else (lambda r: True), E.format))
    out.add(exhaustive("ideal-action", "ideal ∘ H ⊆ ideal",
                       [(r, b) for r in G.relations for b in H.basis],
                       _tolerant(lambda t: G.in_ideal(_raw_act(G, t[0], t[1]))), repr))
    out.add(exhaustive("ideal-star", "ideal* ⊆ ideal", G.relations,
                       _tolerant(lambda r: G.in_ideal(_raw_star(G, r))), repr))

    out.add(exhaustive("maurer-cartan", "dπ(g) = −π(g(1))π(g(2))", list(H.basis),
                       _tolerant(lambda a: _mc_ok(E, Vec.unit(a))), H.label_str))

    if structure:
        out.extend(verify_hopf_structure(E))
    return out


def _relation_elements(E: CrossedForms) -> list:
    return [E.embed_words(r) for r in E.germs.relations]


def _raw_act(G: GermAlgebra, r: Vec, b) -> Vec:
    """Act on an unprojected two-letter combination."""
    H = G.hopf
    acc = Accumulator()
    for w, c in r.items():
        for (h1, h2), k in H.coproduct_basis(b).items():
            x = G.fodc.act_basis(w[0], h1)
            y = G.fodc.act_basis(w[1], h2)
            for s, u in x.items():
                for t, v in y.items():
                    acc.add((s, t), c * k * u * v)
    return acc.vec()


def _raw_star(G: GermAlgebra, r: Vec) -> Vec:
    acc = Accumulator()
    for (s, t), c in r.items():
        x = G.fodc.germ_star(Vec.unit(t))
        y = G.fodc.germ_star(Vec.unit(s))
        for p, u in x.items():
            for q, v in y.items():
                acc.add((p, q), -c.conj() * u * v)
    return acc.vec()


def _mc_ok(E: Envelope, g: Vec) -> bool:
    try:
        maurer_cartan(E, g)
        return True
    except AssertionError:
        return False


def verify_hopf_structure(E: Envelope) -> CheckList:
    """Δ, ε, S, Ad against each other, the product, d and the degree-0/1 data."""
    H = E.hopf
    F = E.fodc
    G = E.germs
    top = E.max_degree
    out = CheckList()
    fmt = lambda k: E.format(Vec.unit(k))
    allk = _keys_upto(E, top)
    low = _keys_upto(E, 1)

    def germ_cop(t):
        acc = Accumulator()
        for k, c in E.unit().items():
            for m, d in E.germ(Vec.unit(t)).items():
                acc.add((k, m), c * d)
        for (s, y), c in F.ad(Vec.unit(t)).items():
            for m, d in E.germ(Vec.unit(s)).items():
                acc.add((m, (y, ())), c * d)
        return E.coproduct(E.germ(Vec.unit(t))) == acc.vec()

    out.add(exhaustive("coproduct-on-germs", "Δ(θ) = 1⊗θ + ad(θ)", list(F.germs.basis), _tolerant(germ_cop), repr))

    def mult(t):
        x, y = t
        return E.coproduct(E.mul_basis(x, y)) == tensor_mul(E, E, E.coproduct_basis(x), E.coproduct_basis(y))

    pairs = [(x, y) for x in low for y in allk if E.degree_of(x) + E.degree_of(y) <= top]
    out.add(exhaustive("coproduct-multiplicative", "Δ(xy) = Δ(x)Δ(y)", pairs, _tolerant(mult),
                       lambda t: f"{fmt(t[0])} , {fmt(t[1])}"))

    def coassoc(k):
        left = Accumulator()
        right = Accumulator()
        for (a, b), c in E.coproduct_basis(k).items():
            for (a1, a2), d in E.coproduct_basis(a).items():
                left.add((a1, a2, b), c * d)
            for (b1, b2), d in E.coproduct_basis(b).items():
                right.add((a, b1, b2), c * d)
        return left.vec() == right.vec()

    out.add(exhaustive("coassociative", "(Δ⊗id)Δ = (id⊗Δ)Δ", allk, _tolerant(coassoc), fmt))

    def counit_law(k):
        lhs = Accumulator()
        rhs = Accumulator()
        for (a, b), c in E.coproduct_basis(k).items():
            lhs.add_vec(Vec.unit(b), c * E.counit(Vec.unit(a)))
            rhs.add_vec(Vec.unit(a), c * E.counit(Vec.unit(b)))
        return lhs.vec() == Vec.unit(k) == rhs.vec()

    out.add(exhaustive("counit", "(ε⊗id)Δ = id = (id⊗ε)Δ", allk, _tolerant(counit_law), fmt))

    def antipode_law(k):
        unit = E.unit() * E.counit(Vec.unit(k))
        left = Vec()
        right = Vec()
        for (a, b), c in E.coproduct_basis(k).items():
            left = left + E.mul(E.antipode_basis(a), Vec.unit(b)) * c
            right = right + E.mul(Vec.unit(a), E.antipode_basis(b)) * c
        return left == unit == right

    out.add(exhaustive("antipode", "S(x(1))x(2) = ε(x)1 = x(1)S(x(2))", allk, _tolerant(antipode_law), fmt))

    out.add(exhaustive("coproduct-d", "Δd = (d⊗id + (−1)^{|·|} id⊗d)Δ", _keys_upto(E, top - 1),
                       _tolerant(lambda k: E.coproduct(E.d_basis(k)) == tensor_d(E, E, E.coproduct_basis(k))), fmt))
    out.add(exhaustive("antipode-d", "Sd = dS", _keys_upto(E, top - 1),
                       _tolerant(lambda k: E.antipode(E.d_basis(k)) == E.d(E.antipode_basis(k))), fmt))

    def anti(t):
        x, y = t
        return E.antipode(E.mul_basis(x, y)) == E.mul(E.antipode_basis(y), E.antipode_basis(x)) * _sign(
            E.degree_of(x) * E.degree_of(y))

    out.add(exhaustive("antipode-antimultiplicative", "S(xy) = (−1)^{|x||y|} S(y)S(x)", pairs, _tolerant(anti),
                       lambda t: f"{fmt(t[0])} , {fmt(t[1])}"))

    def star_cop(k):
        lhs = Accumulator()
        for (a, b), c in E.coproduct_basis(k).items():
            sa = E.star_basis(a)
            sb = E.star_basis(b)
            for m, u in sa.items():
                for n, v in sb.items():
                    lhs.add((m, n), c.conj() * u * v)
        return E.coproduct(E.star_basis(k)) == lhs.vec()

    out.add(exhaustive("coproduct-star", "Δ(x*) = Δ(x)*", allk, _tolerant(star_cop), fmt))

    def ad0(a):
        want = Vec._raw({((x, ()), (y, ())): c for (x, y), c in H.adjoint(Vec.unit(a)).items()})
        return E.Ad(E.h(Vec.unit(a))) == want

    out.add(exhaustive("Ad-degree-0", "Ad|H = adjoint coaction of H", list(H.basis), _tolerant(ad0), H.label_str))

    def ad1(t):
        want = Accumulator()
        for (s, y), c in F.ad(Vec.unit(t)).items():
            for m, d in E.germ(Vec.unit(s)).items():
                want.add((m, (y, ())), c * d)
        full = E.Ad(E.germ(Vec.unit(t)))
        # for non-cocommutative H, Ad(θ) also carries a Γ^0 ⊗ Γ^1 part
        return bidegree_part(E, full, 1, 0) == want.vec()

    out.add(exhaustive("Ad-germs", "Ad(θ) has Γ^1⊗Γ^0 part ad(θ)", list(F.germs.basis), _tolerant(ad1), repr))

    def rel_cop(r):
        out_ = Vec()
        for (s, t), c in r.items():
            out_ = out_ + tensor_mul(E, E, E._delta_letter(s), E._delta_letter(t)) * c
        return not out_

    out.add(exhaustive("ideal-coproduct", "Δ(ideal) = 0", G.relations, _tolerant(rel_cop), repr))

    def rel_s(r):
        acc = Vec()
        for (s, t), c in r.items():
            acc = acc - E.mul(E._antipode_letter(t), E._antipode_letter(s)) * c
        return not acc

    out.add(exhaustive("ideal-antipode", "S(ideal) = 0", G.relations, _tolerant(rel_s), repr))

    def action_mult(t):
        w, b = t
        if len(w) < 2:
            return True
        acc = Accumulator()
        for (h1, h2), c in H.coproduct_basis(b).items():
            x = G.act_word(w[:1], h1)
            y = G.act_word(w[1:], h2)
            acc.add_vec(G.mul(x, y), c)
        return acc.vec() == G.act_word(w, b)

    words = [w for k in range(top + 1) for w in G.basis[k]]
    out.add(exhaustive("action-multiplicative", "(θ1θ2)∘g = (θ1∘g(1))(θ2∘g(2))",
                       [(w, b) for w in words for b in H.basis], _tolerant(action_mult), repr))
    return out
