"""Root systems, Dunkl operators and the polynomial bundle with a Coxeter structure group.

Coordinates are row vectors and W acts on the right, x ↦ xM_w; every
catalogue group is realized by signed permutation matrices.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import combinations, combinations_with_replacement
from typing import Callable, Sequence

from .catalogue import decompose_regular
from .checks import Check, CheckList, exhaustive, single
from .envelope import Envelope, HorAlgebra
from .fodc import Fodc, reflection_fodc
from .hopf import FiniteGroup, FunctionAlgebra, TruncationOverflow
from .linalg import I, ONE, ZERO, Accumulator, Scalar, Vec, null_space_rows, S, format_scalar
from .qpb import BalancedTensor, BundleCalculus, Qpb, TranslationMap, qtrs0_by_solving, trivial_connection


class UnsupportedRootSystem(ValueError):
    pass


class DivisibilityFailure(ArithmeticError):
    pass


class MissingFamily(KeyError):
    pass


ROOT_SYSTEM_CATALOGUE = [("A", 1), ("A", 2), ("A", 3), ("B", 1), ("B", 2), ("B", 3), ("D", 2), ("D", 3)]


# --- polynomials ------------------------------------------------------------------

class Poly:
    """Polynomial (or Laurent polynomial) in n variables: exponent tuple -> Scalar."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Vec | dict | None = None):
        self.n = n
        self.terms = terms if isinstance(terms, Vec) else Vec(terms or {})

    @classmethod
    def const(cls, n: int, c=1) -> "Poly":
        return cls(n, Vec.unit((0,) * n, c))

    @classmethod
    def var(cls, n: int, j: int) -> "Poly":
        return cls(n, Vec.unit(tuple(1 if i == j else 0 for i in range(n))))

    @classmethod
    def monomial(cls, exps: Sequence[int], c=1) -> "Poly":
        return cls(len(exps), Vec.unit(tuple(exps), c))

    @classmethod
    def linear(cls, coeffs: Sequence) -> "Poly":
        n = len(coeffs)
        return cls(n, {tuple(1 if i == j else 0 for i in range(n)): c for j, c in enumerate(coeffs)})

    def __add__(self, other: "Poly") -> "Poly":
        return Poly(self.n, self.terms + other.terms)

    def __sub__(self, other: "Poly") -> "Poly":
        return Poly(self.n, self.terms - other.terms)

    def __neg__(self) -> "Poly":
        return Poly(self.n, -self.terms)

    def __mul__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            return Poly(self.n, self.terms * other)
        acc = Accumulator()
        for a, c in self.terms.items():
            for b, d in other.terms.items():
                acc.add(tuple(x + y for x, y in zip(a, b)), c * d)
        return Poly(self.n, acc.vec())

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.terms == other.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    def __hash__(self):
        return hash(self.terms)

    def __bool__(self):
        return bool(self.terms)

    def conj(self) -> "Poly":
        return Poly(self.n, self.terms.conj())

    def degree(self) -> int:
        return max((sum(a) for a in self.terms), default=-1)

    def diff(self, j: int) -> "Poly":
        acc = Accumulator()
        for a, c in self.terms.items():
            if a[j]:
                b = list(a)
                b[j] -= 1
                acc.add(tuple(b), c * a[j])
        return Poly(self.n, acc.vec())

    def gradient(self) -> list:
        return [self.diff(j) for j in range(self.n)]

    def pullback(self, M) -> "Poly":
        """f ↦ f∘M, (f∘M)(x) = f(xM) for a monomial (signed permutation) matrix M."""
        perm = _signed_columns(M)
        acc = Accumulator()
        for a, c in self.terms.items():
            b = [0] * self.n
            s = 1
            for j, e in enumerate(a):
                i, sg = perm[j]
                b[i] += e
                if sg < 0 and e % 2:
                    s = -s
            acc.add(tuple(b), c * s)
        return Poly(self.n, acc.vec())

    def divide_linear(self, r: Sequence) -> "Poly":
        """Exact quotient by ⟨r|x⟩; raises DivisibilityFailure if there is a remainder."""
        j = max(i for i, c in enumerate(r) if c)
        rj = S(r[j])
        ell = Poly.linear(r)
        rem = self
        q = Accumulator()
        while rem:
            top = max(a[j] for a in rem.terms)
            if top == 0 and all(a[j] == 0 for a in rem.terms):
                raise DivisibilityFailure(f"⟨{tuple(r)}|x⟩ does not divide {self.format()}")
            lead = Accumulator()
            for a, c in rem.terms.items():
                if a[j] == top:
                    b = list(a)
                    b[j] -= 1
                    lead.add(tuple(b), c / rj)
            part = Poly(self.n, lead.vec())
            q.add_vec(part.terms)
            rem = rem - part * ell
        return Poly(self.n, q.vec())

    def evaluate_is_zero(self) -> bool:
        return not self.terms

    def format(self, names: Sequence[str] | None = None) -> str:
        if not self.terms:
            return "0"
        names = names or ([f"x{i + 1}" for i in range(self.n)] if self.n > 1 else ["x"])
        parts = []
        for a, c in sorted(self.terms.items(), key=lambda kv: (-sum(kv[0]), tuple(-e for e in kv[0]))):
            mono = "*".join(f"{nm}^{e}" if e != 1 else nm for nm, e in zip(names, a) if e)
            parts.append(f"({format_scalar(c)})" + (f"*{mono}" if mono else ""))
        return " + ".join(parts)

    def __repr__(self):
        return f"Poly({self.format()})"


def _signed_columns(M) -> list:
    """For each column j, the (row i, sign) of its single nonzero entry."""
    n = len(M)
    out = []
    for j in range(n):
        nz = [(i, M[i][j]) for i in range(n) if M[i][j]]
        if len(nz) != 1 or abs(nz[0][1]) != 1:
            raise UnsupportedRootSystem("reflection matrices must be signed permutations")
        out.append((nz[0][0], 1 if nz[0][1] > 0 else -1))
    return out


def monomials(n: int, degree: int) -> list:
    """Exponent tuples of total degree exactly ``degree``."""
    out = []
    for combo in combinations_with_replacement(range(n), degree):
        a = [0] * n
        for i in combo:
            a[i] += 1
        out.append(tuple(a))
    return sorted(out, reverse=True)


def monomials_upto(n: int, cap: int) -> list:
    return [a for d in range(cap + 1) for a in monomials(n, d)]


class LocalizedPoly:
    """N / Π_r ⟨r|x⟩^{e_r} over a fixed list of linear forms, kept in lowest terms."""

    __slots__ = ("forms", "num", "den")

    def __init__(self, forms: Sequence, num: Poly, den: Sequence[int] | None = None):
        self.forms = tuple(tuple(r) for r in forms)
        den = list(den) if den is not None else [0] * len(self.forms)
        for k, r in enumerate(self.forms):
            while den[k] > 0 and num:
                try:
                    num = num.divide_linear(r)
                except DivisibilityFailure:
                    break
                den[k] -= 1
        if not num:
            den = [0] * len(self.forms)
        self.num = num
        self.den = tuple(den)

    def _lift(self, den: Sequence[int]) -> Poly:
        out = self.num
        for r, have, want in zip(self.forms, self.den, den):
            for _ in range(want - have):
                out = out * Poly.linear(r)
        return out

    def __add__(self, other: "LocalizedPoly") -> "LocalizedPoly":
        den = [max(a, b) for a, b in zip(self.den, other.den)]
        return LocalizedPoly(self.forms, self._lift(den) + other._lift(den), den)

    def __neg__(self):
        return LocalizedPoly(self.forms, -self.num, self.den)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other) -> "LocalizedPoly":
        if isinstance(other, LocalizedPoly):
            return LocalizedPoly(self.forms, self.num * other.num, [a + b for a, b in zip(self.den, other.den)])
        if isinstance(other, Poly):
            return LocalizedPoly(self.forms, self.num * other, self.den)
        return LocalizedPoly(self.forms, self.num * S(other), self.den)

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, LocalizedPoly):
            den = [max(a, b) for a, b in zip(self.den, other.den)]
            return self._lift(den) == other._lift(den)
        return NotImplemented

    def __hash__(self):
        return hash((self.num, self.den))

    def is_polynomial(self) -> bool:
        return not any(self.den)

    def pullback(self, M) -> "LocalizedPoly":
        """Substitute x ↦ xM; each ⟨r|xM⟩ = ⟨Mr|x⟩ is ± another listed form."""
        num = self.num.pullback(M)
        den = [0] * len(self.forms)
        index = {r: k for k, r in enumerate(self.forms)}
        for r, e in zip(self.forms, self.den):
            if not e:
                continue
            mr = tuple(sum(M[i][j] * r[j] for j in range(len(r))) for i in range(len(r)))
            if mr in index:
                den[index[mr]] += e
            else:
                neg = tuple(-c for c in mr)
                den[index[neg]] += e
                if e % 2:
                    num = -num
        return LocalizedPoly(self.forms, num, den)

    def format(self) -> str:
        if not any(self.den):
            return self.num.format()
        den = "*".join(f"<{r}|x>^{e}" if e > 1 else f"<{r}|x>" for r, e in zip(self.forms, self.den) if e)
        return f"({self.num.format()})/({den})"

    def __repr__(self):
        return f"LocalizedPoly({self.format()})"


# --- root systems -------------------------------------------------------------------

def _dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def _reflection_matrix(r) -> tuple:
    n = len(r)
    rr = _dot(r, r)
    return tuple(tuple(Fraction(int(i == j)) - Fraction(2 * r[i] * r[j], rr) for j in range(n)) for i in range(n))


def _mat_mul(a, b):
    n = len(a)
    return tuple(tuple(sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n)) for i in range(n))


def _mat_vec(M, v):
    return tuple(sum(M[i][j] * v[j] for j in range(len(v))) for i in range(len(M)))


def _positive(r) -> bool:
    for c in r:
        if c:
            return c > 0
    return False


def _canon(r) -> tuple:
    return tuple(r) if _positive(r) else tuple(-c for c in r)


class RootSystem:
    def __init__(self, kind: str, rank: int, roots: Sequence):
        self.kind = kind
        self.rank = rank
        self.roots = [tuple(Fraction(c) for c in r) for r in roots]
        self.dim = len(self.roots[0])
        self.positive = [r for r in self.roots if _positive(r)]
        self.reflection = {r: _reflection_matrix(r) for r in self.positive}
        self.orbits = self._orbits()

    @property
    def name(self) -> str:
        return f"{self.kind}{self.rank}"

    def reflect(self, r, x) -> tuple:
        """σ_r(x) = x − 2⟨r,x⟩/⟨r,r⟩ r."""
        c = Fraction(2) * _dot(r, x) / _dot(r, r)
        return tuple(a - c * b for a, b in zip(x, r))

    def _orbits(self) -> list:
        seen = set()
        out = []
        for r in self.positive:
            if r in seen:
                continue
            orb = {r}
            frontier = [r]
            while frontier:
                nxt = []
                for a in frontier:
                    for s in self.positive:
                        b = _canon(self.reflect(s, a))
                        if b not in orb:
                            orb.add(b)
                            nxt.append(b)
                frontier = nxt
            seen |= orb
            out.append([p for p in self.positive if p in orb])
        return out

    def orbit_of(self, r) -> int:
        r = _canon(r)
        for k, orb in enumerate(self.orbits):
            if r in orb:
                return k
        raise KeyError(r)

    def __repr__(self):
        return f"RootSystem({self.name}, |R+|={len(self.positive)})"


def build_root_system(kind: str, rank: int) -> RootSystem:
    kind = kind.upper()
    if (kind, rank) not in ROOT_SYSTEM_CATALOGUE:
        raise UnsupportedRootSystem(f"{kind}{rank} is outside the catalogue {ROOT_SYSTEM_CATALOGUE}")

    def e(i, n):
        return [1 if j == i else 0 for j in range(n)]

    roots = []
    if kind == "A":
        n = rank + 1
        for i in range(n):
            for j in range(n):
                if i != j:
                    roots.append([a - b for a, b in zip(e(i, n), e(j, n))])
    else:
        n = rank
        if kind == "B":
            for i in range(n):
                roots.append(e(i, n))
                roots.append([-c for c in e(i, n)])
        for i, j in combinations(range(n), 2):
            for si in (1, -1):
                for sj in (1, -1):
                    roots.append([si * a + sj * b for a, b in zip(e(i, n), e(j, n))])
    return RootSystem(kind, rank, roots)


def root_system_checks(RS: RootSystem) -> CheckList:
    out = CheckList()
    rset = set(RS.roots)
    out.add(exhaustive("roots-closed", "σ_r(s) ∈ R", [(r, s) for r in RS.positive for s in RS.roots],
                       lambda t: RS.reflect(*t) in rset, repr))
    ident = tuple(tuple(Fraction(int(i == j)) for j in range(RS.dim)) for i in range(RS.dim))
    out.add(exhaustive("reflection-involutive", "σ_r² = id", RS.positive,
                       lambda r: _mat_mul(RS.reflection[r], RS.reflection[r]) == ident, repr))
    out.add(exhaustive("reflection-negates-root", "σ_r(r) = −r", RS.positive,
                       lambda r: RS.reflect(r, r) == tuple(-c for c in r), repr))
    return out


def _matrix_label(M) -> str:
    n = len(M)
    if all(M[i][j] == (1 if i == j else 0) for i in range(n) for j in range(n)):
        return "e"
    parts = []
    for i, s in _signed_columns(M):
        parts.append(f"{'-' if s < 0 else ''}{i + 1}")
    return "[" + ",".join(parts) + "]"


def coxeter_group(RS: RootSystem) -> FiniteGroup:
    """The matrix group generated by the reflections; ``reflections`` maps roots to labels."""
    n = RS.dim
    ident = tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))
    gens = [RS.reflection[r] for r in RS.positive]
    W = FiniteGroup.generated(gens, _mat_mul, ident, _matrix_label, name=f"W({RS.name})")
    W.root_of = {}
    W.reflections = []
    for r in RS.positive:
        lab = _matrix_label(RS.reflection[r])
        W.root_of[lab] = r
        W.reflections.append(lab)
    return W


# --- multiplicities and the Dunkl operator ---------------------------------------------

class Multiplicity:
    """κ constant on W-orbits of roots; values listed in the order of ``RS.orbits``."""

    def __init__(self, RS: RootSystem, values):
        if not isinstance(values, (list, tuple)):
            values = [values] * len(RS.orbits)
        if len(values) != len(RS.orbits):
            raise ValueError(f"{RS.name} has {len(RS.orbits)} root orbits, got {len(values)} values")
        self.RS = RS
        self.values = [S(Fraction(v) if isinstance(v, (int, str)) else v) for v in values]

    def __call__(self, r) -> Scalar:
        return self.values[self.RS.orbit_of(r)]

    def is_zero(self) -> bool:
        return not any(self.values)


def multiplicity_checks(kappa: Multiplicity, W: FiniteGroup) -> Check:
    RS = kappa.RS
    items = [(r, W.realization[w]) for r in RS.positive for w in W.elements]
    return exhaustive("kappa-invariant", "κ(wr) = κ(r)", items,
                      lambda t: kappa(_mat_vec(t[1], t[0])) == kappa(t[0]), repr)


def dunkl_derivative(RS: RootSystem, kappa: Multiplicity, f: Poly, factor=ONE) -> list:
    """Df = ∇f + factor·Σ_{r>0} κ(r) (f − f∘σ_r)/⟨r|x⟩ r, as a list of components."""
    out = f.gradient()
    factor = S(factor)
    for r in RS.positive:
        k = kappa(r)
        if not k:
            continue
        diff = f - f.pullback(RS.reflection[r])
        if not diff:
            continue
        q = diff.divide_linear(r) * (k * factor)
        out = [o + q * S(c) for o, c in zip(out, r)]
    return out


def directional(RS: RootSystem, kappa: Multiplicity, xi: Sequence, f: Poly, factor=ONE) -> Poly:
    comps = dunkl_derivative(RS, kappa, f, factor)
    acc = Poly(f.n)
    for c, p in zip(xi, comps):
        if c:
            acc = acc + p * S(c)
    return acc


def dunkl_commutator(RS: RootSystem, kappa: Multiplicity, xi: Sequence, eta: Sequence, degree_cap: int) -> Check:
    """D_ξ D_η f = D_η D_ξ f on every monomial up to ``degree_cap``."""
    n = RS.dim

    def commute(a):
        f = Poly.monomial(a)
        return directional(RS, kappa, xi, directional(RS, kappa, eta, f)) == \
            directional(RS, kappa, eta, directional(RS, kappa, xi, f))

    return exhaustive(f"commute-{tuple(xi)}-{tuple(eta)}", "D_ξ D_η = D_η D_ξ", monomials_upto(n, degree_cap),
                      commute, lambda a: Poly.monomial(a).format())


def commutator_suite(RS: RootSystem, kappa: Multiplicity, degree_cap: int) -> CheckList:
    n = RS.dim
    axes = [tuple(1 if i == j else 0 for i in range(n)) for j in range(n)]
    out = CheckList()
    for a, b in combinations(axes, 2):
        out.add(dunkl_commutator(RS, kappa, a, b, degree_cap))
    return out


def dunkl_property_checks(RS: RootSystem, kappa: Multiplicity, W: FiniteGroup, cap: int) -> CheckList:
    """Divisibility, κ = 0 degeneration and W-equivariance on monomials up to ``cap``."""
    n = RS.dim
    monos = monomials_upto(n, cap)
    out = CheckList()

    def divisible(t):
        a, r = t
        f = Poly.monomial(a)
        try:
            (f - f.pullback(RS.reflection[r])).divide_linear(r)
        except DivisibilityFailure:
            return False
        return True

    out.add(exhaustive("divisibility", "⟨r|x⟩ divides f − f∘σ_r", [(a, r) for a in monos for r in RS.positive],
                       divisible, repr))
    zero = Multiplicity(RS, [0] * len(RS.orbits))
    out.add(exhaustive("kappa-zero-gradient", "κ = 0 gives D = ∇", monos,
                       lambda a: dunkl_derivative(RS, zero, Poly.monomial(a)) == Poly.monomial(a).gradient(), repr))

    def equivariant(t):
        a, w = t
        M = W.realization[w]
        f = Poly.monomial(a)
        lhs = dunkl_derivative(RS, kappa, f.pullback(M))
        pulled = [p.pullback(M) for p in dunkl_derivative(RS, kappa, f)]
        rhs = [sum((pulled[j] * S(M[i][j]) for j in range(n) if M[i][j]), Poly(n)) for i in range(n)]
        return lhs == rhs

    out.add(exhaustive("equivariance", "D(f∘w) = M_w (Df)∘w", [(a, w) for a in monos for w in W.elements],
                       equivariant, repr))
    return out


# --- displacements -------------------------------------------------------------------

def displacement_family(RS: RootSystem, kappa: Multiplicity, factor=ONE) -> dict:
    """r ↦ ϱ_r r^# = factor·κ(r)/⟨r|x⟩ Σ_j r_j dx_j, components as LocalizedPoly."""
    n = RS.dim
    out = {}
    for k, r in enumerate(RS.positive):
        den = [0] * len(RS.positive)
        den[k] = 1
        coeff = kappa(r) * S(factor)
        out[r] = [LocalizedPoly(RS.positive, Poly.const(n, coeff * S(c)), den) for c in r]
    return out


def pullback_one_form(comps: list, M) -> list:
    """(Σ_j φ_j dx_j)∘M = Σ_i (Σ_j M_ij φ_j∘M) dx_i."""
    n = len(comps)
    pulled = [c.pullback(M) for c in comps]
    out = []
    for i in range(n):
        acc = None
        for j in range(n):
            if M[i][j]:
                term = pulled[j] * S(M[i][j])
                acc = term if acc is None else acc + term
        out.append(acc)
    return out


def displacement_covariance(RS: RootSystem, kappa: Multiplicity, W: FiniteGroup, F: Fodc) -> Check:
    """Δ_Hor λ(θ) = (λ⊗id) ad(θ) on the germs π(δ_σ)."""
    fam = displacement_family(RS, kappa)
    lam = {lab: fam[W.root_of[lab]] for lab in W.reflections}
    zero = [LocalizedPoly(RS.positive, Poly(RS.dim))] * RS.dim

    def covariant(sigma):
        ad = F.ad(Vec.unit(sigma))
        for w in W.elements:
            lhs = pullback_one_form(lam[sigma], W.realization[w])
            rhs = list(zero)
            for (t, h), c in ad.items():
                if h == w:
                    rhs = [a + b * c for a, b in zip(rhs, lam[t])]
            if lhs != rhs:
                return False
        return True

    return exhaustive("displacement-covariant", "λ(θ)∘w matches (λ⊗id)ad(θ)", list(F.germs.basis), covariant, repr)


# --- the bundle ---------------------------------------------------------------------------

class DunklHor(HorAlgebra):
    """Polynomial differential forms x^a dx_I (Laurent in x when rank 1 and ``localized``)."""

    def __init__(self, RS: RootSystem, W: FiniteGroup, H: FunctionAlgebra, cap: int, localized: bool = False):
        if localized and RS.dim != 1:
            raise UnsupportedRootSystem("localized forms are only available in one variable")
        self.RS = RS
        self.W = W
        self.hopf = H
        self.n = RS.dim
        self.cap = cap
        self.localized = localized
        if localized:
            self._exps = [(a,) for a in range(-cap, cap + 1)]
        else:
            self._exps = monomials_upto(self.n, cap)
        self._expset = set(self._exps)
        self._coact: dict = {}

    def degree(self, a) -> int:
        return len(a[1])

    def basis(self, k: int) -> list:
        return [(e, I_) for I_ in combinations(range(self.n), k) for e in self._exps]

    def unit(self) -> Vec:
        return Vec.unit(((0,) * self.n, ()))

    def _exp_ok(self, e) -> tuple:
        if e not in self._expset:
            raise TruncationOverflow(f"x^{e} leaves the polynomial window")
        return e

    def mul_basis(self, a, b) -> Vec:
        (ea, Ia), (eb, Ib) = a, b
        if set(Ia) & set(Ib):
            return Vec()
        e = self._exp_ok(tuple(x + y for x, y in zip(ea, eb)))
        merged, s = _merge_sign(Ia, Ib)
        return Vec.unit((e, merged), s)

    def pull(self, a, M) -> Vec:
        e, I_ = a
        perm = _signed_columns(M)
        b = [0] * self.n
        s = 1
        for j, x in enumerate(e):
            i, sg = perm[j]
            b[i] += x
            if sg < 0 and x % 2:
                s = -s
        idx = []
        for j in I_:
            i, sg = perm[j]
            idx.append(i)
            s *= sg
        s *= _perm_sign(idx)
        return Vec.unit((tuple(b), tuple(sorted(idx))), s)

    def coaction_basis(self, a) -> Vec:
        v = self._coact.get(a)
        if v is None:
            acc = Accumulator()
            for w in self.W.elements:
                for b, c in self.pull(a, self.W.realization[w]).items():
                    acc.add((b, w), c)
            v = self._coact[a] = acc.vec()
        return v

    def d_basis(self, a) -> Vec:
        e, I_ = a
        acc = Accumulator()
        for j in range(self.n):
            if not e[j] or j in I_:
                continue
            f = list(e)
            f[j] -= 1
            merged, s = _merge_sign((j,), I_)
            acc.add((self._exp_ok(tuple(f)), merged), S(e[j]) * s)
        return acc.vec()

    def star_basis(self, a) -> Vec:
        return Vec.unit(a)

    def label_str(self, a) -> str:
        e, I_ = a
        names = [f"x{i + 1}" for i in range(self.n)] if self.n > 1 else ["x"]
        mono = "*".join(f"{nm}^{x}" if x != 1 else nm for nm, x in zip(names, e) if x) or "1"
        forms = "".join(f"d{names[i]}" for i in I_)
        return mono + (f"*{forms}" if forms else "")

    def from_poly(self, p: Poly, forms: tuple = ()) -> Vec:
        return Vec._raw({(self._exp_ok(a), forms): c for a, c in p.terms.items()})

    def to_components(self, x: Vec) -> list:
        """A degree-1 horizontal Vec as its dx_j coefficients."""
        comps = [Accumulator() for _ in range(self.n)]
        for (e, I_), c in x.items():
            if len(I_) != 1:
                raise ValueError("not a 1-form")
            comps[I_[0]].add(e, c)
        return [Poly(self.n, a.vec()) for a in comps]


def _perm_sign(idx: Sequence[int]) -> int:
    s = 1
    idx = list(idx)
    for i in range(len(idx)):
        for j in range(i + 1, len(idx)):
            if idx[i] > idx[j]:
                s = -s
    return s


def _merge_sign(I1: Sequence[int], I2: Sequence[int]) -> tuple:
    idx = list(I1) + list(I2)
    return tuple(sorted(idx)), _perm_sign(idx)


class DunklConnection:
    """ω = ω^c + λ (or λ̃ = iλ when ``real``); ``omega`` is available when λ lives in Hor."""

    def __init__(self, bundle: "DunklBundle", kappa: Multiplicity, real: bool = False):
        self.bundle = bundle
        self.kappa = kappa
        self.real = real
        self.factor = I if real else ONE
        self.regular = kappa.is_zero()
        self.multiplicative = True

    def displacement(self, sigma) -> Vec:
        """λ(π(δ_σ)) as an Ω(P) element (rank 1 only)."""
        B = self.bundle
        if not B.hor.localized:
            raise UnsupportedRootSystem("ϱ_r needs the localized rank-1 bundle")
        # κ(r) r dx / (r x) = κ(r) x⁻¹ dx
        r = B.W.root_of[sigma]
        return Vec.unit((((-1,), (0,)), ()), self.kappa(r) * self.factor)

    def lam(self, t) -> Vec:
        return self.displacement(t)

    def omega(self, t) -> Vec:
        C = self.bundle.calc
        out = C.germ(Vec.unit(t))
        if self.kappa.is_zero():
            return out
        return out + self.displacement(t)


class DunklBundle:
    def __init__(self, RS: RootSystem, W: FiniteGroup, qpb: Qpb, calc: BundleCalculus):
        self.RS = RS
        self.W = W
        self.qpb = qpb
        self.calc = calc
        self.hor = qpb.hor


def build_dunkl_bundle(RS: RootSystem, kappa: Multiplicity | None = None, poly_cap: int = 4,
                       max_degree: int = 2, real: bool = False):
    """(bundle, ω^c, ω) with P = polynomials (Laurent at rank 1) and Γ the reflection calculus."""
    W = coxeter_group(RS)
    H = FunctionAlgebra(W)
    localized = RS.dim == 1
    hor = DunklHor(RS, W, H, poly_cap, localized)
    Q = Qpb(hor, name=f"dunkl-{RS.name}")
    Q.group = W
    try:
        Q.coreps = decompose_regular(W, H)
    except Exception:
        Q.coreps = []
    F = reflection_fodc(W, W.reflections, H)
    C = BundleCalculus(Q, Envelope(F, max_degree), name=f"Ω(dunkl-{RS.name})")
    bundle = DunklBundle(RS, W, Q, C)
    kappa = kappa or Multiplicity(RS, [0] * len(RS.orbits))
    canonical = DunklConnection(bundle, Multiplicity(RS, [0] * len(RS.orbits)), real=True)
    dunkl = DunklConnection(bundle, kappa, real=real)
    return bundle, canonical, dunkl


def covariant_derivative(bundle: DunklBundle, omega: Callable, f: Vec) -> Vec:
    """D^ω f = df − f(0) ω(π(f(1))) for f ∈ P."""
    C = bundle.calc
    pi = C.fodc.germs.pi_basis
    acc = Accumulator()
    acc.add_vec(C.d(f))
    for (a, _), c in f.items():
        for (b, w), u in bundle.hor.coaction_basis(a).items():
            for t, v in pi(w).items():
                acc.add_vec(C.mul(Vec.unit((b, ())), omega(t)), -c * u * v)
    return acc.vec()


def bundle_checks(bundle: DunklBundle, cap: int | None = None) -> CheckList:
    """Δ_P multiplicative, B = invariants, D^{ω^c} = d on monomials."""
    from .qpb import verify_qpb
    hor = bundle.hor
    C = bundle.calc
    out = CheckList()
    inner = None
    if hor.localized:
        half = hor.cap // 2
        inner = lambda x, h: abs(x[0][0]) <= half
    qc = verify_qpb(bundle.qpb, inner) if hor.localized else _unlocalized_qpb_checks(bundle.qpb)
    out.extend(qc)
    top = hor.cap - 1 if hor.localized else hor.cap
    keys = [k for k in hor.basis(0) if (abs(k[0][0]) <= top if hor.localized else sum(k[0]) <= top)]
    omega_c = trivial_connection(C)

    def de_rham(k):
        f = Vec.unit((k, ()))
        got = covariant_derivative(bundle, omega_c, f)
        want = Vec._raw({(m, ()): c for m, c in hor.d_basis(k).items()})
        return got == want

    out.add(exhaustive("canonical-derivative-is-d", "D^{ω^c} f = df", keys, de_rham, hor.label_str))
    return out


def _unlocalized_qpb_checks(Q: Qpb) -> CheckList:
    from .qpb import verify_qpb
    out = CheckList()
    for c in verify_qpb(Q):
        if c.name != "beta-surjective":
            out.add(c)
    return out


# --- intertwiners ----------------------------------------------------------------------------

def dunkl_intertwiners(bundle: DunklBundle, corep, degree: int) -> list:
    """All T with T(e_i)∘w = Σ_j g_ji(w) T(e_j), T(e_i) homogeneous of ``degree`` (a kernel basis)."""
    W = bundle.W
    n = bundle.RS.dim
    monos = monomials(n, degree)
    dV = corep.dim
    variables = [(i, a) for i in range(dV) for a in monos]
    index = {v: j for j, v in enumerate(variables)}
    rows = []
    for w in W.elements:
        M = W.realization[w]
        for i in range(dV):
            eq: dict = {}
            for a in monos:
                for b, c in Poly.monomial(a).pullback(M).terms.items():
                    eq.setdefault(b, {})
                    j = index[(i, a)]
                    eq[b][j] = eq[b].get(j, ZERO) + c
                for jj in range(dV):
                    g = corep.g[jj][i][w]
                    if g:
                        eq.setdefault(a, {})
                        j = index[(jj, a)]
                        eq[a][j] = eq[a].get(j, ZERO) - g
            rows.extend(eq.values())
    out = []
    for v in null_space_rows(rows, len(variables)):
        comps = [Accumulator() for _ in range(dV)]
        for j, c in v.items():
            i, a = variables[j]
            comps[i].add(a, c)
        out.append([Poly(n, acc.vec()) for acc in comps])
    return out


def intertwiner_mor_check(bundle: DunklBundle, corep, T: list) -> bool:
    W = bundle.W
    for w in W.elements:
        M = W.realization[w]
        for i in range(corep.dim):
            rhs = Poly(bundle.RS.dim)
            for j in range(corep.dim):
                g = corep.g[j][i][w]
                if g:
                    rhs = rhs + T[j] * g
            if T[i].pullback(M) != rhs:
                return False
    return True


def nabla_on_intertwiners(RS: RootSystem, kappa: Multiplicity, T: list, family: list,
                          variant: str = "nabla", factor=ONE) -> list:
    """∇T = Σ_k μ_k ⊗_B T_k (or T_k ⊗_B μ_k), μ_k = Σ_i D T(e_i) f*_{ki}, f_{ki} = T_k(e_i)."""
    if not family:
        raise MissingFamily("no intertwiner family supplied")
    DT = [dunkl_derivative(RS, kappa, t, factor) for t in T]
    out = []
    for Tk in family:
        mu = [Poly(RS.dim) for _ in range(RS.dim)]
        for i, comps in enumerate(DT):
            fstar = Tk[i].conj()
            mu = [m + c * fstar for m, c in zip(mu, comps)]
        out.append((mu, Tk) if variant == "nabla" else (Tk, mu))
    return out


def hermitian_compatibility(RS: RootSystem, kappa: Multiplicity, T1: list, T2: list, real: bool = True) -> CheckList:
    """⟨∇T1,T2⟩ + ⟨T1,∇T2⟩ = d⟨T1,T2⟩ for the left and right structures, as polynomial 1-forms."""
    factor = I if real else ONE
    n = RS.dim
    D1 = [dunkl_derivative(RS, kappa, t, factor) for t in T1]
    D2 = [dunkl_derivative(RS, kappa, t, factor) for t in T2]
    zero = [Poly(n) for _ in range(n)]
    out = CheckList()

    def side(left: bool):
        lhs = list(zero)
        pairing = Poly(n)
        for k in range(len(T1)):
            a, b = T1[k], T2[k]
            if left:
                pairing = pairing + a * b.conj()
                lhs = [x + p * b.conj() + a * q.conj() for x, p, q in zip(lhs, D1[k], D2[k])]
            else:
                pairing = pairing + a.conj() * b
                lhs = [x + p.conj() * b + a.conj() * q for x, p, q in zip(lhs, D1[k], D2[k])]
        return lhs, pairing.gradient()

    for tag, left in (("L", True), ("R", False)):
        lhs, rhs = side(left)
        bad = [j for j in range(n) if lhs[j] != rhs[j]]
        out.add(single(f"hermitian-{tag}", f"⟨∇T1,T2⟩_{tag} + ⟨T1,∇T2⟩_{tag} = d⟨T1,T2⟩_{tag}", not bad,
                       f"dx{bad[0] + 1 if bad else 0}: {lhs[bad[0]].format() if bad else ''} ≠ "
                       f"{rhs[bad[0]].format() if bad else ''}"))

    def q_invariant(r):
        M = RS.reflection[r]
        q = Poly(n)
        for k in range(len(T1)):
            q = q + T1[k] * T2[k].pullback(M).conj()
        return q.pullback(M) == q

    out.add(exhaustive("q-invariant", "q(xσ_r) = q(x) for q = Σ_k T1(e_k)(σ_r·T2(e_k))*", RS.positive, q_invariant, repr))
    return out


# --- canonical gauge ---------------------------------------------------------------------------

class CanonicalGauge:
    """𝔉(α ⊗ θ1…θk) = α (θ1 + λ(θ1)) ⋯ (θk + λ(θk)); in degree 1, μ + x⊗θ ↦ μ + xλ(θ) + x⊗θ."""

    def __init__(self, bundle: DunklBundle, conn: DunklConnection, sign: int = 1):
        self.bundle = bundle
        self.conn = conn
        self.sign = sign
        self._cache: dict = {}

    def _lifted(self, t) -> Vec:
        C = self.bundle.calc
        lam = self.conn.displacement(t) if not self.conn.kappa.is_zero() else Vec()
        return C.germ(Vec.unit(t)) + lam * self.sign

    def on_key(self, key) -> Vec:
        v = self._cache.get(key)
        if v is None:
            C = self.bundle.calc
            a, w = key
            v = Vec.unit((a, ()))
            for t in w:
                v = C.mul(v, self._lifted(t))
            self._cache[key] = v
        return v

    def __call__(self, x: Vec) -> Vec:
        acc = Accumulator()
        for k, c in x.items():
            acc.add_vec(self.on_key(k), c)
        return acc.vec()

    def table(self, keys) -> dict:
        return {k: self.on_key(k) for k in keys}


def canonical_gauge(bundle: DunklBundle, conn: DunklConnection) -> tuple:
    """(𝔉, 𝔉∘ω^c); the action on connections is taken to be ω ↦ 𝔉∘ω."""
    F = CanonicalGauge(bundle, conn)
    C = bundle.calc
    return F, (lambda t: F(C.germ(Vec.unit(t))))


def canonical_gauge_checks(bundle: DunklBundle, conn: DunklConnection, keys: Sequence) -> CheckList:
    """𝔉∘ω^c = ω^c + λ, covariance, F(1) = 1, left Ω(B)-linearity and the inverse 𝔉_{−λ}."""
    C = bundle.calc
    F, transformed = canonical_gauge(bundle, conn)
    Finv = CanonicalGauge(bundle, conn, sign=-1)
    out = CheckList()
    germs = list(C.fodc.germs.basis)
    out.add(exhaustive("gauge-moves-connection", "𝔉(ω^c(θ)) = ω^c(θ) + λ(θ)", germs,
                       lambda t: transformed(t) == conn.omega(t), repr))
    out.add(single("gauge-unit", "𝔉(1) = 1", F(C.unit()) == C.unit()))

    def covariant(k):
        try:
            lhs = Accumulator()
            for (w, t), c in C.coaction_basis(k).items():
                for m, u in F.on_key(w).items():
                    lhs.add((m, t), c * u)
            return lhs.vec() == C.coaction(F.on_key(k))
        except TruncationOverflow:
            return True

    out.add(exhaustive("gauge-covariant", "(𝔉⊗id)Δ_Ω = Δ_Ω 𝔉", keys, covariant, repr))

    base = [b for d in range(C.max_degree + 1) for b in C.base_forms(d)]

    def linear(t):
        mu, k = t
        try:
            return F(C.mul(mu, Vec.unit(k))) == C.mul(mu, F.on_key(k))
        except TruncationOverflow:
            return True

    out.add(exhaustive("gauge-left-linear", "𝔉(μw) = μ𝔉(w)", [(mu, k) for mu in base for k in keys], linear, repr))

    def inverse(k):
        try:
            return Finv(F.on_key(k)) == Vec.unit(k) and F(Finv.on_key(k)) == Vec.unit(k)
        except TruncationOverflow:
            return True

    out.add(exhaustive("gauge-invertible", "𝔉_{−λ} 𝔉_λ = id", keys, inverse, repr))
    return out


# --- translation map on the rank-1 bundle ----------------------------------------------------------

def dunkl_translation_map(bundle: DunklBundle, omega: Callable, window: int) -> TranslationMap:
    """qtrs with qtrs0 found by solving β̃ = 1⊗g over |exponent| ≤ ``window``."""
    C = bundle.calc
    keys0 = sorted((k for k in C.basis(0) if abs(k[0][0][0]) <= window), key=lambda k: abs(k[0][0][0]))
    cache: dict = {}

    def q0(g: Vec) -> Vec:
        key = tuple(sorted(g.items(), key=repr))
        if key not in cache:
            sol = qtrs0_by_solving(C, g, keys0)
            if sol is None:
                raise MissingFamily(f"no preimage of 1⊗{g!r} in the window")
            cache[key] = sol
        return cache[key]

    return TranslationMap(C, omega, q0)


def choice_independence(bundle: DunklBundle, T1: TranslationMap, T2: TranslationMap, keys: Sequence,
                        bal: BalancedTensor) -> CheckList:
    """qtrs built from two real connections agrees in P⊗_{Ω(B)}P and under β̃."""
    C = bundle.calc
    out = CheckList()
    out.add(exhaustive("qtrs-choice-quotient", "qtrs_ω1(ϑ) = qtrs_ω2(ϑ) in Ω(P)⊗_{Ω(B)}Ω(P)", keys,
                       lambda k: bal.equal(T1.on_key(k), T2.on_key(k)), repr))
    out.add(exhaustive("qtrs-choice-beta", "β̃ qtrs_ω1(ϑ) = β̃ qtrs_ω2(ϑ) = 1⊗ϑ", keys,
                       lambda k: C.beta_vec(T1.on_key(k)) == C.beta_vec(T2.on_key(k)) ==
                       Vec._raw({(u, k): c for u, c in C.unit().items()}), repr))
    return out


def canonical_gauge_roundtrip(bundle: DunklBundle, conn: DunklConnection, T: TranslationMap,
                              ekeys: Sequence, ckeys: Sequence) -> CheckList:
    """𝔉 as a module automorphism: f_𝔉 is a valid gauge map and F_{f_𝔉} = 𝔉 on ``ckeys``."""
    from .gauge import F_from_f, ModuleAutomorphism, convolution_map_checks, f_from_F, module_map_checks
    C = bundle.calc
    gauge = CanonicalGauge(bundle, conn)
    F = ModuleAutomorphism(C, {k: gauge.on_key(k) for k in ckeys})
    out = CheckList()
    out.extend(module_map_checks(F).checks)
    f = f_from_F(T, ModuleAutomorphism(C, _closure_table(gauge, T, ekeys)), ekeys)
    out.extend(convolution_map_checks(f).checks)
    out.add(single("canonical-gauge-roundtrip", "F_{f_𝔉} = 𝔉", F_from_f(f, ckeys) == F))
    return out


def _closure_table(gauge: CanonicalGauge, T: TranslationMap, ekeys: Sequence) -> dict:
    """𝔉 on every right leg [ϑ]2 of qtrs(ϑ), ϑ ∈ ``ekeys``."""
    return {y: gauge.on_key(y) for k in ekeys for (_, y) in T.on_key(k)}


def weight_window(C: BundleCalculus, weight: int) -> list:
    """Rank-1 form keys x^a dx^e ⊗ w with |a + e| ≤ ``weight``; 𝔉 preserves a + e."""
    return [k for d in range(C.max_degree + 1) for k in C.basis(d)
            if abs(k[0][0][0] + len(k[0][1])) <= weight]
