"""Function Hopf algebras of finite groups, the Laurent algebra of U(1),
adjoint coaction, and corepresentations given by matrix coefficients."""
from __future__ import annotations

from itertools import product
from typing import Callable, Hashable, Iterable, Sequence

from .checks import CheckList, exhaustive
from .linalg import ONE, ZERO, Accumulator, Scalar, Vec, VectorSpace, tensor, tensor_apply


class TruncationOverflow(ArithmeticError):
    """A Laurent product left the monomial window."""


class InvalidGroup(ValueError):
    pass


class FiniteGroup:
    """A finite group given by an exhaustively checked multiplication table."""

    def __init__(self, elements: Sequence[Hashable], table: dict, name: str = "G"):
        self.elements = tuple(elements)
        self.name = name
        if len(set(self.elements)) != len(self.elements):
            raise InvalidGroup("duplicate group elements")
        el = set(self.elements)
        for a in self.elements:
            for b in self.elements:
                if (a, b) not in table:
                    raise InvalidGroup(f"table missing product {a}*{b}")
                if table[(a, b)] not in el:
                    raise InvalidGroup(f"{a}*{b} is not an element")
        self._mul = dict(table)
        ids = [e for e in self.elements if all(self._mul[(e, a)] == a == self._mul[(a, e)] for a in self.elements)]
        if len(ids) != 1:
            raise InvalidGroup("no two-sided identity")
        self.identity = ids[0]
        for a, b, c in product(self.elements, repeat=3):
            if self._mul[(self._mul[(a, b)], c)] != self._mul[(a, self._mul[(b, c)])]:
                raise InvalidGroup(f"not associative at ({a},{b},{c})")
        self._inv = {}
        for a in self.elements:
            inv = [b for b in self.elements if self._mul[(a, b)] == self.identity]
            if len(inv) != 1 or self._mul[(inv[0], a)] != self.identity:
                raise InvalidGroup(f"{a} has no inverse")
            self._inv[a] = inv[0]

    @classmethod
    def generated(cls, generators: Sequence, multiply: Callable, identity, label: Callable = str, name: str = "G"):
        """Enumerate the group generated by concrete objects (matrices, permutations)."""
        objs = [identity]
        seen = {identity}
        frontier = [identity]
        while frontier:
            nxt = []
            for x in frontier:
                for g in generators:
                    y = multiply(x, g)
                    if y not in seen:
                        seen.add(y)
                        objs.append(y)
                        nxt.append(y)
            frontier = nxt
        labels = [label(o) for o in objs]
        index = {o: lab for o, lab in zip(objs, labels)}
        table = {(index[a], index[b]): index[multiply(a, b)] for a in objs for b in objs}
        g = cls(labels, table, name=name)
        g.realization = dict(zip(labels, objs))
        return g

    @property
    def order(self) -> int:
        return len(self.elements)

    def mul(self, a, b):
        return self._mul[(a, b)]

    def inv(self, a):
        return self._inv[a]

    def conj(self, g, a):
        """g a g^-1."""
        return self.mul(self.mul(g, a), self.inv(g))

    def conjugacy_class(self, a) -> frozenset:
        return frozenset(self.conj(g, a) for g in self.elements)

    def is_conjugation_closed(self, subset: Iterable) -> bool:
        s = set(subset)
        return all(self.conj(g, a) in s for g in self.elements for a in s)

    def element_order(self, a) -> int:
        n, x = 1, a
        while x != self.identity:
            x = self.mul(x, a)
            n += 1
        return n

    def is_abelian(self) -> bool:
        return all(self.mul(a, b) == self.mul(b, a) for a in self.elements for b in self.elements)

    def __repr__(self):
        return f"FiniteGroup({self.name}, order={self.order})"


class HopfAlgebra:
    """Structure maps on a labelled basis; subclasses supply the basis rules."""

    name = "H"
    commutative = True

    def __init__(self, basis: Sequence[Hashable]):
        self.basis = tuple(basis)
        self.space = VectorSpace(self.basis)
        self._cop: dict = {}

    # basis-level rules ---------------------------------------------------
    def mul_basis(self, a, b) -> Vec:
        raise NotImplementedError

    def unit(self) -> Vec:
        raise NotImplementedError

    def coproduct_basis(self, a) -> Vec:
        raise NotImplementedError

    def counit_basis(self, a) -> Scalar:
        raise NotImplementedError

    def antipode_basis(self, a) -> Vec:
        raise NotImplementedError

    def star_basis(self, a) -> Vec:
        raise NotImplementedError

    # linear extensions ---------------------------------------------------
    def basis_vec(self, a) -> Vec:
        self.space.index(a)
        return Vec.unit(a)

    def one(self) -> Vec:
        return self.unit()

    def mul(self, x: Vec, y: Vec) -> Vec:
        acc = Accumulator()
        for a, c in x.items():
            for b, d in y.items():
                acc.add_vec(self.mul_basis(a, b), c * d)
        return acc.vec()

    def coproduct(self, x: Vec) -> Vec:
        acc = Accumulator()
        for a, c in x.items():
            v = self._cop.get(a)
            if v is None:
                v = self._cop[a] = self.coproduct_basis(a)
            acc.add_vec(v, c)
        return acc.vec()

    def counit(self, x: Vec) -> Scalar:
        s = ZERO
        for a, c in x.items():
            e = self.counit_basis(a)
            if e:
                s = s + c * e
        return s

    def antipode(self, x: Vec) -> Vec:
        return x.apply(self.antipode_basis)

    def star(self, x: Vec) -> Vec:
        """Antilinear involution."""
        acc = Accumulator()
        for a, c in x.items():
            acc.add_vec(self.star_basis(a), c.conj())
        return acc.vec()

    def coproduct2(self, x: Vec) -> Vec:
        """(Δ⊗id)Δ(x) with flat triple labels."""
        acc = Accumulator()
        for (a, b), c in self.coproduct(x).items():
            for (a1, a2), d in self.coproduct_basis(a).items():
                acc.add((a1, a2, b), c * d)
        return acc.vec()

    def adjoint(self, x: Vec) -> Vec:
        """Right adjoint coaction x ↦ x(2) ⊗ S(x(1)) x(3)."""
        acc = Accumulator()
        for (a, b, c), k in self.coproduct2(x).items():
            for m, u in self.mul(self.antipode_basis(a), Vec.unit(c)).items():
                acc.add((b, m), k * u)
        return acc.vec()

    def element(self, token) -> Vec:
        """Basis element from a label (subclasses accept friendlier names)."""
        return self.basis_vec(token)

    def label_str(self, a) -> str:
        return str(a)

    def format(self, x: Vec) -> str:
        if not x:
            return "0"
        idx = {b: i for i, b in enumerate(self.basis)}
        parts = []
        for a, c in sorted(x.items(), key=lambda kv: idx.get(kv[0], 0)):
            parts.append(f"({c})*{self.label_str(a)}")
        return " + ".join(parts)


class FunctionAlgebra(HopfAlgebra):
    """Fun(G) on the delta basis {δ_g}, labels = group elements."""

    def __init__(self, group: FiniteGroup):
        self.group = group
        self.name = f"Fun({group.name})"
        super().__init__(group.elements)
        self._unit = Vec({g: ONE for g in group.elements})
        self._cop_table = {g: Accumulator() for g in group.elements}
        for a in group.elements:
            for b in group.elements:
                self._cop_table[group.mul(a, b)].add((a, b), ONE)
        self._cop_table = {g: acc.vec() for g, acc in self._cop_table.items()}
        self.check_axioms_or_raise()

    def mul_basis(self, a, b) -> Vec:
        return Vec.unit(a) if a == b else Vec()

    def mul(self, x: Vec, y: Vec) -> Vec:
        if len(x) > len(y):
            x, y = y, x
        return Vec._raw({a: c * y[a] for a, c in x.items() if a in y})

    def unit(self) -> Vec:
        return self._unit

    def coproduct_basis(self, a) -> Vec:
        return self._cop_table[a]

    def counit_basis(self, a) -> Scalar:
        return ONE if a == self.group.identity else ZERO

    def antipode_basis(self, a) -> Vec:
        return Vec.unit(self.group.inv(a))

    def star_basis(self, a) -> Vec:
        return Vec.unit(a)

    def delta(self, g) -> Vec:
        return self.basis_vec(g)

    def label_str(self, a) -> str:
        return f"δ[{a}]"

    def evaluate(self, f: Vec, g) -> Scalar:
        return f[g]

    def check_axioms_or_raise(self):
        bad = [c for c in hopf_axiom_checks(self) if not c.passed]
        if bad:
            raise InvalidGroup(f"Hopf axiom failure: {bad[0].name} at {bad[0].witness}")


class LaurentAlgebra(HopfAlgebra):
    """Laurent polynomials C[z, z*] (z* = z^-1) on a symmetric monomial window.

    Labels are the exponents n; products leaving the window raise
    TruncationOverflow instead of wrapping.
    """

    name = "Laurent"

    def __init__(self, window=(-5, 5)):
        lo, hi = window
        if lo > 0 or hi < 0 or lo != -hi:
            raise ValueError("window must be symmetric and contain 0")
        self.lo, self.hi = lo, hi
        self.name = f"Laurent[{lo},{hi}]"
        super().__init__(range(lo, hi + 1))

    def _check(self, n: int) -> int:
        if n < self.lo or n > self.hi:
            raise TruncationOverflow(f"z^{n} outside window [{self.lo},{self.hi}]")
        return n

    def mul_basis(self, a, b) -> Vec:
        return Vec.unit(self._check(a + b))

    def unit(self) -> Vec:
        return Vec.unit(0)

    def coproduct_basis(self, a) -> Vec:
        return Vec.unit((a, a))

    def counit_basis(self, a) -> Scalar:
        return ONE

    def antipode_basis(self, a) -> Vec:
        return Vec.unit(-a)

    def star_basis(self, a) -> Vec:
        return Vec.unit(-a)

    def z(self, n: int = 1) -> Vec:
        return Vec.unit(self._check(n))

    def label_str(self, a) -> str:
        return f"z^{a}"


def adjoint_coaction_H(H: HopfAlgebra, g: Vec) -> Vec:
    return H.adjoint(g)


def _pairs_within(H: HopfAlgebra):
    for a in H.basis:
        for b in H.basis:
            try:
                H.mul_basis(a, b)
            except TruncationOverflow:
                continue
            yield a, b


def _safe(f, *args):
    try:
        return f(*args)
    except TruncationOverflow:
        return None


def hopf_axiom_checks(H: HopfAlgebra) -> list:
    """Exhaustive evaluation of every Hopf *-algebra axiom on basis elements."""
    B = H.basis
    one = H.unit()
    out = []

    def assoc(t):
        a, b, c = t
        l = _safe(lambda: H.mul(H.mul_basis(a, b), Vec.unit(c)))
        r = _safe(lambda: H.mul(Vec.unit(a), H.mul_basis(b, c)))
        return l is None or r is None or l == r

    out.append(exhaustive("associativity", "(ab)c = a(bc)", product(B, repeat=3), assoc))
    out.append(exhaustive("unit", "1a = a = a1", B,
                          lambda a: H.mul(one, Vec.unit(a)) == Vec.unit(a) == H.mul(Vec.unit(a), one)))

    def coassoc(a):
        d = H.coproduct_basis(a)
        left = Accumulator()
        right = Accumulator()
        for (x, y), c in d.items():
            for (x1, x2), e in H.coproduct_basis(x).items():
                left.add((x1, x2, y), c * e)
            for (y1, y2), e in H.coproduct_basis(y).items():
                right.add((x, y1, y2), c * e)
        return left.vec() == right.vec()

    out.append(exhaustive("coassociativity", "(Δ⊗id)Δ = (id⊗Δ)Δ", B, coassoc))

    def counit_law(a):
        d = H.coproduct_basis(a)
        l = Accumulator()
        r = Accumulator()
        for (x, y), c in d.items():
            l.add(x, c * H.counit_basis(y))
            r.add(y, c * H.counit_basis(x))
        return l.vec() == Vec.unit(a) == r.vec()

    out.append(exhaustive("counit", "(id⊗ε)Δ = id = (ε⊗id)Δ", B, counit_law))

    def antipode_law(a):
        d = H.coproduct_basis(a)
        l = Accumulator()
        r = Accumulator()
        for (x, y), c in d.items():
            l.add_vec(H.mul(H.antipode_basis(x), Vec.unit(y)), c)
            r.add_vec(H.mul(Vec.unit(x), H.antipode_basis(y)), c)
        target = one * H.counit_basis(a)
        return l.vec() == target == r.vec()

    out.append(exhaustive("antipode", "m(S⊗id)Δ = 1ε = m(id⊗S)Δ", B, antipode_law))

    def delta_mult(t):
        a, b = t
        prod_ = H.mul_basis(a, b)
        lhs = H.coproduct(prod_)
        da, db = H.coproduct_basis(a), H.coproduct_basis(b)
        acc = Accumulator()
        for (x1, x2), c in da.items():
            for (y1, y2), e in db.items():
                p = _safe(H.mul_basis, x1, y1)
                q = _safe(H.mul_basis, x2, y2)
                if p is None or q is None:
                    return True
                for u, f in p.items():
                    for v, g in q.items():
                        acc.add((u, v), c * e * f * g)
        return lhs == acc.vec()

    out.append(exhaustive("coproduct-multiplicative", "Δ(ab) = Δ(a)Δ(b)", _pairs_within(H), delta_mult))
    out.append(exhaustive("counit-multiplicative", "ε(ab) = ε(a)ε(b)", _pairs_within(H),
                          lambda t: H.counit(H.mul_basis(*t)) == H.counit_basis(t[0]) * H.counit_basis(t[1])))
    out.append(exhaustive("antipode-squared", "S² = id", B,
                          lambda a: H.antipode(H.antipode_basis(a)) == Vec.unit(a)))
    out.append(exhaustive("star-involutive", "(a*)* = a", B, lambda a: H.star(H.star_basis(a)) == Vec.unit(a)))
    out.append(exhaustive("star-antimultiplicative", "(ab)* = b*a*", _pairs_within(H),
                          lambda t: H.star(H.mul_basis(*t)) == H.mul(H.star_basis(t[1]), H.star_basis(t[0]))))
    out.append(exhaustive("star-coproduct", "Δ(a*) = (*⊗*)Δ(a)", B,
                          lambda a: H.coproduct(H.star_basis(a))
                          == tensor_apply(H.coproduct_basis(a), H.star_basis, H.star_basis).conj()))
    out.append(exhaustive("antipode-star", "S(S(a*)*) = a", B,
                          lambda a: H.antipode(H.star(H.antipode(H.star_basis(a)))) == Vec.unit(a)))
    return out


class Corepresentation:
    """δ(e_i) = Σ_j e_j ⊗ g_ji for an orthonormal basis e_1..e_n."""

    def __init__(self, hopf: HopfAlgebra, coefficients: Sequence[Sequence[Vec]], name: str = "V"):
        n = len(coefficients)
        if any(len(row) != n for row in coefficients):
            raise ValueError("shape mismatch: coefficient matrix must be square")
        self.hopf = hopf
        self.g = [list(row) for row in coefficients]
        self.name = name
        self.absolutely_irreducible = True

    @property
    def dim(self) -> int:
        return len(self.g)

    def coaction(self, i: int) -> Vec:
        """δ(e_i) as a Vec over (j, H-label)."""
        acc = Accumulator()
        for j in range(self.dim):
            for a, c in self.g[j][i].items():
                acc.add((j, a), c)
        return acc.vec()

    def coefficients(self) -> list:
        return [self.g[i][j] for i in range(self.dim) for j in range(self.dim)]

    @classmethod
    def from_matrices(cls, H: FunctionAlgebra, rho: dict, name: str):
        """Corepresentation of Fun(G) from a representation g ↦ rho[g]."""
        some = next(iter(rho.values()))
        n = len(some)
        g = [[Vec({x: rho[x][i][j] for x in H.group.elements}) for j in range(n)] for i in range(n)]
        return cls(H, g, name)

    def matrix_at(self, x) -> list:
        """For Fun(G): the representing matrix (g_ij(x))."""
        return [[self.g[i][j][x] for j in range(self.dim)] for i in range(self.dim)]

    def __repr__(self):
        return f"Corepresentation({self.name}, dim={self.dim})"


def trivial_corep(H: HopfAlgebra) -> Corepresentation:
    return Corepresentation(H, [[H.unit()]], "triv")


def check_corepresentation(H: HopfAlgebra, corep: Corepresentation) -> CheckList:
    g = corep.g
    n = corep.dim
    if any(len(row) != n for row in g):
        raise ValueError("shape mismatch")
    idx = [(i, j) for i in range(n) for j in range(n)]
    one = H.unit()
    out = CheckList()

    def kron(i, j):
        return ONE if i == j else ZERO

    out.add(exhaustive("corep-counit", "(id⊗ε)δ = id", idx,
                       lambda t: H.counit(g[t[0]][t[1]]) == kron(*t),
                       lambda t: f"g[{t[0]}][{t[1]}]"))

    def coassoc(t):
        i, j = t
        rhs = Accumulator()
        for k in range(n):
            rhs.add_vec(tensor(g[i][k], g[k][j]))
        return _safe(H.coproduct, g[i][j]) == rhs.vec()

    out.add(exhaustive("corep-coassociativity", "(id⊗Δ)δ = (δ⊗id)δ", idx, coassoc,
                       lambda t: f"g[{t[0]}][{t[1]}]"))

    def unitary_rows(t):
        i, j = t
        acc = Vec()
        for k in range(n):
            p = _safe(H.mul, g[i][k], H.star(g[j][k]))
            if p is None:
                return False
            acc = acc + p
        return acc == one * kron(i, j)

    def unitary_cols(t):
        i, j = t
        acc = Vec()
        for k in range(n):
            p = _safe(H.mul, H.star(g[k][i]), g[k][j])
            if p is None:
                return False
            acc = acc + p
        return acc == one * kron(i, j)

    out.add(exhaustive("corep-unitary-rows", "Σ_k g_ik g*_jk = δ_ij 1", idx, unitary_rows,
                       lambda t: f"(i,j)=({t[0]},{t[1]})"))
    out.add(exhaustive("corep-unitary-columns", "Σ_k g*_ki g_kj = δ_ij 1", idx, unitary_cols,
                       lambda t: f"(i,j)=({t[0]},{t[1]})"))
    out.add(exhaustive("corep-antipode", "S(g_ij) = g*_ji", idx,
                       lambda t: H.antipode(g[t[0]][t[1]]) == H.star(g[t[1]][t[0]]),
                       lambda t: f"g[{t[0]}][{t[1]}]"))
    return out


def character_corep(H: LaurentAlgebra, n: int) -> Corepresentation:
    """One-dimensional corepresentation v ↦ v ⊗ z^n."""
    return Corepresentation(H, [[H.z(n)]], f"z^{n}")
