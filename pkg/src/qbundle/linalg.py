"""Exact scalars in Q(i, sqrt3) and finite-dimensional linear algebra.

Everything downstream is built on two representations:

* ``Vec``: a sparse vector, a mapping from opaque basis labels to ``Scalar``.
  Tensors are ``Vec`` objects whose labels are tuples of labels.
* dense/sparse matrices over a ``VectorSpace`` (an ordered list of labels),
  reduced with an incremental row-echelon engine (``Echelon``).

Pivots are always the first nonzero entry in label order, so every reduced
form is the canonical reduced row echelon form of the row space.
"""
from __future__ import annotations

import re
from fractions import Fraction
from typing import Callable, Hashable, Iterable, Iterator, Sequence

try:  # gmpy2 is only a speed-up; Fraction gives identical results
    from gmpy2 import mpq as _rat
except ImportError:  # pragma: no cover
    _rat = Fraction

_RAT_TYPES = (int, Fraction, type(_rat(0)))


class DimensionMismatch(ValueError):
    """Vectors of different lengths, or a label outside the space."""


def _q(x) -> object:
    if isinstance(x, str):
        return _rat(Fraction(x))
    return _rat(x)


class Scalar:
    """An exact element (a + b*sqrt(3)) with a, b in Q(i).

    ``re``/``im`` hold the Gaussian part a, ``r3re``/``r3im`` the coefficient
    of sqrt(3).  Almost every value met in practice has b = 0, and every
    operation has a fast path for that case.
    """

    __slots__ = ("re", "im", "r3re", "r3im")

    def __init__(self, re=0, im=0, r3re=0, r3im=0):
        t = type(_ZQ)
        self.re = re if type(re) is t else _q(re)
        self.im = im if type(im) is t else _q(im)
        self.r3re = r3re if type(r3re) is t else _q(r3re)
        self.r3im = r3im if type(r3im) is t else _q(r3im)

    @staticmethod
    def coerce(x) -> "Scalar":
        if isinstance(x, Scalar):
            return x
        if isinstance(x, _RAT_TYPES):
            return Scalar(x)
        if isinstance(x, complex):
            raise TypeError("floating complex numbers are not exact scalars")
        if isinstance(x, str):
            return parse_scalar(x)
        raise TypeError(f"cannot make a Scalar from {x!r}")

    def _surd(self) -> bool:
        return bool(self.r3re) or bool(self.r3im)

    def __add__(self, other):
        if not isinstance(other, Scalar):
            if isinstance(other, _RAT_TYPES):
                return Scalar(self.re + other, self.im, self.r3re, self.r3im)
            return NotImplemented
        return Scalar(self.re + other.re, self.im + other.im,
                      self.r3re + other.r3re, self.r3im + other.r3im)

    __radd__ = __add__

    def __neg__(self):
        return Scalar(-self.re, -self.im, -self.r3re, -self.r3im)

    def __sub__(self, other):
        if not isinstance(other, Scalar):
            if isinstance(other, _RAT_TYPES):
                return Scalar(self.re - other, self.im, self.r3re, self.r3im)
            return NotImplemented
        return Scalar(self.re - other.re, self.im - other.im,
                      self.r3re - other.r3re, self.r3im - other.r3im)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Scalar):
            if isinstance(other, _RAT_TYPES):
                return Scalar(self.re * other, self.im * other, self.r3re * other, self.r3im * other)
            return NotImplemented
        a, b, c, d = self.re, self.im, other.re, other.im
        if not (self.r3re or self.r3im or other.r3re or other.r3im):
            if not b and not d:
                return Scalar(a * c, _ZQ, _ZQ, _ZQ)
            return Scalar(a * c - b * d, a * d + b * c, _ZQ, _ZQ)
        e, f, g, h = self.r3re, self.r3im, other.r3re, other.r3im
        # (x + y s)(u + v s) = (xu + 3yv) + (xv + yu) s,  s = sqrt(3)
        xu_r, xu_i = a * c - b * d, a * d + b * c
        yv_r, yv_i = e * g - f * h, e * h + f * g
        xv_r, xv_i = a * g - b * h, a * h + b * g
        yu_r, yu_i = e * c - f * d, e * d + f * c
        return Scalar(xu_r + 3 * yv_r, xu_i + 3 * yv_i, xv_r + yu_r, xv_i + yu_i)

    __rmul__ = __mul__

    def norm2(self):
        """s * conj(s); rational when s is Gaussian."""
        p = self * self.conj()
        return p.re if not (p.im or p._surd()) else p

    def inverse(self) -> "Scalar":
        if not self:
            raise ZeroDivisionError("inverse of zero scalar")
        if not self._surd():
            if not self.im:
                return Scalar(1 / self.re, _ZQ)
            n = self.re * self.re + self.im * self.im
            return Scalar(self.re / n, -self.im / n)
        # 1/(x + y s) = (x - y s) / (x^2 - 3 y^2) with the denominator in Q(i)
        x = Scalar(self.re, self.im)
        y = Scalar(self.r3re, self.r3im)
        den = (x * x - 3 * (y * y)).inverse()
        xm = x * den
        ym = -(y * den)
        return Scalar(xm.re, xm.im, ym.re, ym.im)

    def __truediv__(self, other):
        return self * Scalar.coerce(other).inverse()

    def __rtruediv__(self, other):
        return Scalar.coerce(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out, base = ONE, self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def conj(self) -> "Scalar":
        return Scalar(self.re, -self.im, self.r3re, -self.r3im)

    def __bool__(self):
        return bool(self.re) or bool(self.im) or bool(self.r3re) or bool(self.r3im)

    def __eq__(self, other):
        if isinstance(other, Scalar):
            return (self.re == other.re and self.im == other.im
                    and self.r3re == other.r3re and self.r3im == other.r3im)
        if isinstance(other, _RAT_TYPES):
            return not self.im and not self._surd() and self.re == other
        return NotImplemented

    def __hash__(self):
        if not self.im and not self._surd():
            return hash(self.re)
        return hash((self.re, self.im, self.r3re, self.r3im))

    def is_real(self) -> bool:
        return not self.im and not self.r3im

    def is_gaussian(self) -> bool:
        return not self._surd()

    def __repr__(self):
        return f"Scalar({self})"

    def __str__(self):
        return format_scalar(self)


_ZQ = _q(0)
ZERO = Scalar(0)
ONE = Scalar(1)
I = Scalar(0, 1)
SQRT3 = Scalar(0, 0, 1)


def _fmt_rat(q) -> str:
    q = Fraction(int(q.numerator), int(q.denominator))
    return str(q)


def _fmt_gauss(re, im) -> str:
    if not im:
        return _fmt_rat(re)
    if im == 1:
        s = "i"
    elif im == -1:
        s = "-i"
    else:
        s = _fmt_rat(im) + "i"
    if not re:
        return s
    if not s.startswith("-"):
        s = "+" + s
    return _fmt_rat(re) + s


def format_scalar(s: Scalar) -> str:
    if not s._surd():
        return _fmt_gauss(s.re, s.im)
    surd = f"({_fmt_gauss(s.r3re, s.r3im)})*sqrt3"
    if not s.re and not s.im:
        return surd
    return f"{_fmt_gauss(s.re, s.im)}+{surd}"


_RAT = r"[0-9]+(?:/[0-9]+)?"
_GAUSS_RE = re.compile(
    rf"^(?P<re>[+-]?{_RAT})?(?:(?P<isign>[+-])?(?P<im>{_RAT})?i)?$"
)


def _parse_gauss(t: str):
    m = _GAUSS_RE.match(t)
    if not t or not m or (m.group("re") is None and "i" not in t):
        raise ValueError(f"not a Gaussian rational: {t!r}")
    re_part = Fraction(m.group("re")) if m.group("re") else Fraction(0)
    im_part = Fraction(0)
    if t.endswith("i"):
        im_part = Fraction(m.group("im")) if m.group("im") else Fraction(1)
        if m.group("isign") == "-":
            im_part = -im_part
        elif m.group("isign") is None and m.group("re") is not None:
            # "2i" parsed greedily as re="2"; re-read as a pure imaginary
            im_part, re_part = Fraction(m.group("re")), Fraction(0)
    return re_part, im_part


def parse_scalar(text: str) -> Scalar:
    """Parse '3', '-1/2', 'i', '2/3i', '1-2i', '(1/2)*sqrt3', '-1/2+(1/2i)*sqrt3'."""
    t = text.replace(" ", "")
    if "sqrt3" in t:
        m = re.match(r"^(?P<a>.*?)(?P<sign>[+-]?)\((?P<b>[^()]*)\)\*sqrt3$", t)
        if not m:
            if t in ("sqrt3", "+sqrt3", "-sqrt3"):
                return SQRT3 if not t.startswith("-") else -SQRT3
            raise ValueError(f"not a scalar: {text!r}")
        a = _parse_gauss(m.group("a")) if m.group("a") else (Fraction(0), Fraction(0))
        b = _parse_gauss(m.group("b"))
        sgn = -1 if m.group("sign") == "-" else 1
        return Scalar(a[0], a[1], sgn * b[0], sgn * b[1])
    re_part, im_part = _parse_gauss(t)
    return Scalar(re_part, im_part)


def S(x) -> Scalar:
    """Shorthand coercion used throughout the package."""
    return Scalar.coerce(x)


class Vec:
    """Sparse vector: basis label -> nonzero Scalar.  Treated as immutable."""

    __slots__ = ("_d",)

    def __init__(self, data=None):
        d = {}
        if data:
            items = data.items() if isinstance(data, dict) else data
            for k, v in items:
                v = Scalar.coerce(v)
                if v:
                    if k in d:
                        v = d[k] + v
                        if v:
                            d[k] = v
                        else:
                            del d[k]
                    else:
                        d[k] = v
        self._d = d

    @classmethod
    def _raw(cls, d: dict) -> "Vec":
        v = cls.__new__(cls)
        v._d = d
        return v

    @classmethod
    def unit(cls, label, coeff=ONE) -> "Vec":
        c = Scalar.coerce(coeff)
        return cls._raw({label: c} if c else {})

    def items(self):
        return self._d.items()

    def labels(self):
        return self._d.keys()

    def __iter__(self) -> Iterator:
        return iter(self._d)

    def __len__(self):
        return len(self._d)

    def __getitem__(self, label) -> Scalar:
        return self._d.get(label, ZERO)

    def __contains__(self, label):
        return label in self._d

    def __bool__(self):
        return bool(self._d)

    def __eq__(self, other):
        if isinstance(other, Vec):
            return self._d == other._d
        if other == 0:
            return not self._d
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self._d.items()))

    def __add__(self, other: "Vec") -> "Vec":
        if not other._d:
            return self
        d = dict(self._d)
        for k, v in other._d.items():
            if k in d:
                s = d[k] + v
                if s:
                    d[k] = s
                else:
                    del d[k]
            else:
                d[k] = v
        return Vec._raw(d)

    def __neg__(self):
        return Vec._raw({k: -v for k, v in self._d.items()})

    def __sub__(self, other: "Vec") -> "Vec":
        return self + (-other)

    def __mul__(self, c) -> "Vec":
        c = Scalar.coerce(c)
        if not c:
            return Vec()
        if c == 1:
            return self
        return Vec._raw({k: v * c for k, v in self._d.items()})

    __rmul__ = __mul__

    def conj(self) -> "Vec":
        return Vec._raw({k: v.conj() for k, v in self._d.items()})

    def map_labels(self, f: Callable) -> "Vec":
        acc = Accumulator()
        for k, v in self._d.items():
            acc.add(f(k), v)
        return acc.vec()

    def apply(self, f: Callable[[Hashable], "Vec"]) -> "Vec":
        """Linear extension of a map defined on basis labels."""
        acc = Accumulator()
        for k, v in self._d.items():
            acc.add_vec(f(k), v)
        return acc.vec()

    def sorted_items(self, key=None):
        return sorted(self._d.items(), key=(lambda kv: key(kv[0])) if key else (lambda kv: repr(kv[0])))

    def __repr__(self):
        if not self._d:
            return "Vec(0)"
        return "Vec(" + " + ".join(f"({v})*{k!r}" for k, v in self.sorted_items()) + ")"


class Accumulator:
    """Mutable builder for ``Vec``; the only mutable helper in this module."""

    __slots__ = ("d",)

    def __init__(self):
        self.d = {}

    def add(self, label, coeff):
        if not coeff:
            return
        d = self.d
        if label in d:
            s = d[label] + coeff
            if s:
                d[label] = s
            else:
                del d[label]
        else:
            d[label] = coeff if isinstance(coeff, Scalar) else Scalar.coerce(coeff)

    def add_vec(self, v: Vec, coeff=ONE):
        if coeff == 1:
            for k, c in v._d.items():
                self.add(k, c)
        else:
            for k, c in v._d.items():
                self.add(k, c * coeff)

    def vec(self) -> Vec:
        return Vec._raw(self.d)


def tensor(a: Vec, b: Vec) -> Vec:
    """a ⊗ b with pair labels."""
    return Vec._raw({(x, y): u * v for x, u in a.items() for y, v in b.items()})


def tensor_apply(v: Vec, f: Callable, g: Callable) -> Vec:
    """(f ⊗ g)(v) for a Vec with pair labels; f, g map labels to Vec."""
    acc = Accumulator()
    for (x, y), c in v.items():
        fx = f(x)
        if not fx:
            continue
        gy = g(y)
        for a, u in fx.items():
            uc = u * c
            for b, w in gy.items():
                acc.add((a, b), uc * w)
    return acc.vec()


def vec_total(v: Vec, f: Callable[[Hashable], Scalar]) -> Scalar:
    """Linear functional given on labels."""
    out = ZERO
    for k, c in v.items():
        x = f(k)
        if x:
            out = out + c * x
    return out


class VectorSpace:
    """An ordered basis of opaque, pairwise distinct labels."""

    __slots__ = ("labels", "_index")

    def __init__(self, labels: Iterable):
        self.labels = tuple(labels)
        self._index = {lab: i for i, lab in enumerate(self.labels)}
        if len(self._index) != len(self.labels):
            raise ValueError("basis labels must be pairwise distinct")

    @property
    def dim(self) -> int:
        return len(self.labels)

    def index(self, label) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise DimensionMismatch(f"label {label!r} is not in the space") from None

    def __contains__(self, label):
        return label in self._index

    def to_row(self, v: Vec) -> dict:
        """Sparse row {column index: Scalar}."""
        return {self.index(k): c for k, c in v.items()}

    def to_dense(self, v: Vec) -> tuple:
        out = [ZERO] * self.dim
        for k, c in v.items():
            out[self.index(k)] = c
        return tuple(out)

    def from_row(self, row) -> Vec:
        if isinstance(row, dict):
            return Vec._raw({self.labels[j]: c for j, c in row.items() if c})
        if len(row) != self.dim:
            raise DimensionMismatch("dense vector has the wrong length")
        return Vec._raw({self.labels[j]: Scalar.coerce(c) for j, c in enumerate(row) if c})

    def __eq__(self, other):
        return isinstance(other, VectorSpace) and self.labels == other.labels

    def __hash__(self):
        return hash(self.labels)

    def __repr__(self):
        return f"VectorSpace(dim={self.dim})"


def _as_row(v) -> dict:
    if isinstance(v, dict):
        return {j: Scalar.coerce(c) for j, c in v.items() if c}
    return {j: Scalar.coerce(c) for j, c in enumerate(v) if c}


class Echelon:
    """Incrementally maintained reduced row echelon form (sparse rows).

    Rows are dicts column -> Scalar.  Because the reduced form of a row space
    is unique, the result is independent of insertion order; pivots are the
    first nonzero column of each reduced row.
    """

    def __init__(self, rows: Iterable = ()):
        self.pivots: dict[int, dict] = {}
        for r in rows:
            self.add(r)

    def reduce(self, row) -> dict:
        r = dict(_as_row(row))
        pivots = self.pivots
        for c in [c for c in r if c in pivots]:
            f = r.get(c)
            if not f:
                continue
            for j, x in pivots[c].items():
                s = r.get(j, ZERO) - f * x
                if s:
                    r[j] = s
                else:
                    r.pop(j, None)
        return r

    def add(self, row) -> bool:
        """Insert a row; return True iff it was independent."""
        r = self.reduce(row)
        if not r:
            return False
        p = min(r)
        inv = r[p].inverse()
        if inv != 1:
            r = {j: x * inv for j, x in r.items()}
        for prow in self.pivots.values():
            f = prow.get(p)
            if f:
                for j, x in r.items():
                    s = prow.get(j, ZERO) - f * x
                    if s:
                        prow[j] = s
                    else:
                        prow.pop(j, None)
        self.pivots[p] = r
        return True

    def contains(self, row) -> bool:
        return not self.reduce(row)

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def pivot_columns(self) -> list:
        return sorted(self.pivots)

    def rows(self) -> list:
        return [dict(self.pivots[p]) for p in sorted(self.pivots)]

    def coordinates(self, row) -> list:
        """Coefficients of ``row`` on ``rows()``; raises if outside the span."""
        r = _as_row(row)
        if not self.contains(r):
            raise ValueError("vector is not in the span")
        return [r.get(p, ZERO) for p in sorted(self.pivots)]


def span_and_reduce(vectors: Sequence[Sequence]):
    """Echelon basis of span(vectors) and a coordinate function on that span.

    Vectors are dense coefficient tuples of a common length.
    """
    vectors = list(vectors)
    if vectors:
        n = len(vectors[0])
        if any(len(v) != n for v in vectors):
            raise DimensionMismatch("vectors have different lengths")
    else:
        n = 0
    ech = Echelon(vectors)
    basis = [tuple(row.get(j, ZERO) for j in range(n)) for row in ech.rows()]

    def coordinates(v) -> tuple:
        if len(v) != n:
            raise DimensionMismatch("vector has the wrong length")
        return tuple(ech.coordinates(v))

    return basis, coordinates


class LinearMap:
    """Matrix (codomain.dim x domain.dim) stored as sparse rows."""

    def __init__(self, domain: VectorSpace, codomain: VectorSpace, matrix):
        self.domain = domain
        self.codomain = codomain
        rows = [_as_row(r) for r in matrix]
        if len(rows) != codomain.dim:
            raise DimensionMismatch("matrix row count differs from codomain dimension")
        for r in rows:
            if r and max(r) >= domain.dim:
                raise DimensionMismatch("matrix column outside the domain")
        self.rows = rows

    @classmethod
    def from_function(cls, domain: VectorSpace, codomain: VectorSpace, f: Callable[[Hashable], Vec]):
        cols = [codomain.to_row(f(lab)) for lab in domain.labels]
        rows = [dict() for _ in range(codomain.dim)]
        for j, col in enumerate(cols):
            for i, c in col.items():
                rows[i][j] = c
        return cls(domain, codomain, rows)

    @classmethod
    def identity(cls, space: VectorSpace):
        return cls(space, space, [{i: ONE} for i in range(space.dim)])

    @classmethod
    def zero(cls, domain: VectorSpace, codomain: VectorSpace):
        return cls(domain, codomain, [{} for _ in range(codomain.dim)])

    def dense(self) -> list:
        return [[r.get(j, ZERO) for j in range(self.domain.dim)] for r in self.rows]

    def __call__(self, v):
        if isinstance(v, Vec):
            return self.codomain.from_row(self.apply_row(self.domain.to_row(v)))
        if len(v) != self.domain.dim:
            raise DimensionMismatch("vector has the wrong length")
        res = self.apply_row(_as_row(v))
        return tuple(res.get(i, ZERO) for i in range(self.codomain.dim))

    def apply_row(self, x: dict) -> dict:
        out = {}
        for i, r in enumerate(self.rows):
            s = ZERO
            for j, c in r.items():
                xj = x.get(j)
                if xj:
                    s = s + c * xj
            if s:
                out[i] = s
        return out

    def __matmul__(self, other: "LinearMap") -> "LinearMap":
        """self ∘ other."""
        if other.codomain != self.domain:
            raise DimensionMismatch("composition of incompatible maps")
        cols = {}
        for i, r in enumerate(other.rows):
            for j, c in r.items():
                cols.setdefault(j, {})[i] = c
        rows = []
        for r in self.rows:
            out = {}
            for k, a in r.items():
                for j, b in other._col_cache(k).items():
                    s = out.get(j, ZERO) + a * b
                    if s:
                        out[j] = s
                    else:
                        out.pop(j, None)
            rows.append(out)
        return LinearMap(other.domain, self.codomain, rows)

    def _col_cache(self, k: int) -> dict:
        # row k of self, i.e. the k-th coordinate functional
        return self.rows[k]

    def rank(self) -> int:
        return Echelon(self.rows).rank

    def transpose_rows(self) -> list:
        cols = [dict() for _ in range(self.domain.dim)]
        for i, r in enumerate(self.rows):
            for j, c in r.items():
                cols[j][i] = c
        return cols

    def __eq__(self, other):
        return (
            isinstance(other, LinearMap)
            and self.domain == other.domain
            and self.codomain == other.codomain
            and self.rows == other.rows
        )

    def __repr__(self):
        return f"LinearMap({self.domain.dim} -> {self.codomain.dim})"


def null_space_rows(rows: Sequence[dict], ncols: int) -> list:
    """Basis (sparse dicts) of {x : A x = 0} for A given by sparse rows."""
    ech = Echelon(rows)
    piv = ech.pivots
    free = [j for j in range(ncols) if j not in piv]
    out = []
    for f in free:
        x = {f: ONE}
        for p, r in piv.items():
            c = r.get(f)
            if c:
                x[p] = -c
        out.append(x)
    return out


def kernel(f: LinearMap) -> list:
    """Basis of Ker f as dense tuples over f.domain."""
    n = f.domain.dim
    return [tuple(x.get(j, ZERO) for j in range(n)) for x in null_space_rows(f.rows, n)]


class Quotient:
    """V / span(sub) with coset representatives given by non-pivot labels."""

    def __init__(self, space: VectorSpace, sub: Iterable):
        self.space = space
        self.echelon = Echelon()
        for v in sub:
            row = space.to_row(v) if isinstance(v, Vec) else _as_row(_check_len(v, space.dim))
            self.echelon.add(row)
        piv = self.echelon.pivots
        self.free = [j for j in range(space.dim) if j not in piv]
        self.target = VectorSpace(space.labels[j] for j in self.free)
        self._free_pos = {j: k for k, j in enumerate(self.free)}

    @property
    def dim(self) -> int:
        return len(self.free)

    def project_row(self, row: dict) -> dict:
        r = self.echelon.reduce(row)
        return {self._free_pos[j]: c for j, c in r.items()}

    def project(self, v: Vec) -> Vec:
        """Coset of v, expressed on the representative labels."""
        r = self.echelon.reduce(self.space.to_row(v))
        labels = self.space.labels
        return Vec._raw({labels[j]: c for j, c in r.items()})

    def contains(self, v: Vec) -> bool:
        return not self.echelon.reduce(self.space.to_row(v))

    def lift(self, label) -> Vec:
        return Vec.unit(label)

    def matrix(self) -> LinearMap:
        return LinearMap.from_function(self.space, self.target, lambda lab: self.project(Vec.unit(lab)))


def _check_len(v, n):
    if len(v) != n:
        raise DimensionMismatch("vector outside the space")
    return v


def quotient(space: VectorSpace, sub: Sequence):
    """Return (coset representatives, projection) for space / span(sub)."""
    q = Quotient(space, sub)
    reps = [tuple(ONE if j == f else ZERO for j in range(space.dim)) for f in q.free]
    return reps, q.matrix()


def solve_rows(rows: Sequence[dict], rhs: Sequence, ncols: int):
    """One solution x of A x = rhs (sparse rows), or None if inconsistent."""
    aug = []
    for r, b in zip(rows, rhs):
        row = dict(_as_row(r))
        b = Scalar.coerce(b)
        if b:
            row[ncols] = b
        aug.append(row)
    ech = Echelon(aug)
    if ncols in ech.pivots:
        return None
    x = {}
    for p, r in ech.pivots.items():
        c = r.get(ncols)
        if c:
            x[p] = c
    return x


def inverse_matrix(m: Sequence[Sequence]) -> list:
    """Exact inverse of a square dense matrix; raises ZeroDivisionError if singular."""
    n = len(m)
    rows = []
    for i, r in enumerate(m):
        row = _as_row(r)
        row[n + i] = ONE
        rows.append(row)
    ech = Echelon(rows)
    if any(p not in ech.pivots for p in range(n)):
        raise ZeroDivisionError("singular matrix")
    return [[ech.pivots[i].get(n + j, ZERO) for j in range(n)] for i in range(n)]


def mat_mul(a, b):
    n, k, m = len(a), len(b), len(b[0]) if b else 0
    return [[sum((a[i][t] * b[t][j] for t in range(k)), ZERO) for j in range(m)] for i in range(n)]


def conj_transpose(a):
    return [[a[i][j].conj() for i in range(len(a))] for j in range(len(a[0]))]


def identity_matrix(n):
    return [[ONE if i == j else ZERO for j in range(n)] for i in range(n)]


def matrix(rows) -> list:
    """Coerce nested sequences (ints, strings, Fractions) to Scalar matrices."""
    return [[Scalar.coerce(x) for x in r] for r in rows]
