"""Built-in small groups with hard-coded unitary corepresentations.

Characters and matrices live in Q(i, sqrt3): cube and sixth roots of unity
need sqrt3, and the two-dimensional irreducible representation of S3 has no
orthonormal realization over Q(i) alone.
"""
from __future__ import annotations

from itertools import product

from .hopf import Corepresentation, FiniteGroup, FunctionAlgebra, InvalidGroup, check_corepresentation
from .linalg import I, ONE, SQRT3, ZERO, Echelon, S, identity_matrix, mat_mul, matrix


class UnsupportedGroup(ValueError):
    pass


def _mat_key(m):
    return tuple(tuple(row) for row in m)


def _mat_mul_int(a, b):
    n = len(a)
    return tuple(tuple(sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n)) for i in range(n))


def cyclic_group(n: int) -> FiniteGroup:
    labels = ["e"] + (["g"] + [f"g{k}" for k in range(2, n)] if n > 1 else [])
    table = {(labels[a], labels[b]): labels[(a + b) % n] for a in range(n) for b in range(n)}
    return FiniteGroup(labels, table, name=f"Z{n}")


_S3_NAMES = {
    (0, 1, 2): "e",
    (1, 0, 2): "(12)",
    (2, 1, 0): "(13)",
    (0, 2, 1): "(23)",
    (1, 2, 0): "(123)",
    (2, 0, 1): "(132)",
}


def symmetric_group_3() -> FiniteGroup:
    """S3 acting on {1,2,3}; (στ)(x) = σ(τ(x))."""
    perms = list(_S3_NAMES)
    table = {}
    for s in perms:
        for t in perms:
            st = tuple(s[t[x]] for x in range(3))
            table[(_S3_NAMES[s], _S3_NAMES[t])] = _S3_NAMES[st]
    return FiniteGroup([_S3_NAMES[p] for p in perms], table, name="S3")


_D4_R = ((0, -1), (1, 0))
_D4_S = ((1, 0), (0, -1))


def dihedral_group_4() -> FiniteGroup:
    """Symmetries of the square: r = quarter turn, s = reflection."""
    rot_names = ["", "r", "r2", "r3"]
    objs = {}
    x = ((1, 0), (0, 1))
    rots = []
    for k in range(4):
        rots.append(x)
        objs[rot_names[k] or "e"] = x
        x = _mat_mul_int(x, _D4_R)
    for k in range(4):
        objs["s" + rot_names[k]] = _mat_mul_int(_D4_S, rots[k])
    names = {v: k for k, v in objs.items()}
    table = {(a, b): names[_mat_mul_int(objs[a], objs[b])] for a in objs for b in objs}
    g = FiniteGroup(list(objs), table, name="D4")
    g.realization = objs
    return g


GROUP_BUILDERS = {
    **{f"Z{n}": (lambda n=n: cyclic_group(n)) for n in range(1, 7)},
    "S3": symmetric_group_3,
    "D4": dihedral_group_4,
}


def catalogue_group(name: str) -> FiniteGroup:
    try:
        return GROUP_BUILDERS[name]()
    except KeyError:
        raise UnsupportedGroup(f"group {name!r} is not in the catalogue") from None


def representation_from_generators(G: FiniteGroup, images: dict) -> dict:
    """Extend generator images to a homomorphism G -> matrices; verified exhaustively."""
    n = len(next(iter(images.values())))
    rho = {G.identity: identity_matrix(n)}
    frontier = [G.identity]
    while frontier:
        nxt = []
        for x in frontier:
            for g, m in images.items():
                y = G.mul(x, g)
                if y not in rho:
                    rho[y] = mat_mul(rho[x], m)
                    nxt.append(y)
        frontier = nxt
    if len(rho) != G.order:
        raise InvalidGroup("generator images do not generate the group")
    for a, b in product(G.elements, repeat=2):
        if mat_mul(rho[a], rho[b]) != rho[G.mul(a, b)]:
            raise InvalidGroup(f"images do not define a homomorphism at ({a},{b})")
    return rho


def _root_of_unity(n: int, k: int):
    k %= n
    table = {
        1: [ONE],
        2: [ONE, -ONE],
        3: [ONE, S(-1) / 2 + SQRT3 * I / 2, S(-1) / 2 - SQRT3 * I / 2],
        4: [ONE, I, -ONE, -I],
        6: [ONE, S(1) / 2 + SQRT3 * I / 2, S(-1) / 2 + SQRT3 * I / 2, -ONE,
            S(-1) / 2 - SQRT3 * I / 2, S(1) / 2 - SQRT3 * I / 2],
    }
    return table[n][k]


def _z5_hyperplane_rep():
    """Z5 on the sum-zero hyperplane of C^5 in an orthonormal Q(i)-basis."""
    a = S("1/2+1/2i")
    b = S("1/10+1/5i")
    cols = [
        [a, -a, ZERO, ZERO, ZERO],
        [ZERO, ZERO, a, -a, ZERO],
        [S("1/2"), S("1/2"), S("-1/2"), S("-1/2"), ZERO],
        [b, b, b, b, -4 * b],
    ]
    shift = [[ONE if i == (j + 1) % 5 else ZERO for j in range(5)] for i in range(5)]
    U = [[cols[j][i] for j in range(4)] for i in range(5)]
    Uh = [[U[i][j].conj() for i in range(5)] for j in range(4)]
    return mat_mul(mat_mul(Uh, shift), U)


def _catalogue_reps(G: FiniteGroup) -> list:
    """(name, generator images) pairs defining the irreducible representations."""
    name = G.name
    if name.startswith("Z"):
        n = int(name[1:])
        gen = "g" if n > 1 else None
        if n == 1:
            return [("triv", {})]
        if n == 5:
            return [("triv", {gen: matrix([[1]])}), ("std4", {gen: _z5_hyperplane_rep()})]
        return [("triv" if k == 0 else f"chi{k}", {gen: [[_root_of_unity(n, k)]]}) for k in range(n)]
    if name == "S3":
        h = S(1) / 2
        rot = [[-h, -SQRT3 * h], [SQRT3 * h, -h]]
        refl = matrix([[1, 0], [0, -1]])
        return [
            ("triv", {"(12)": matrix([[1]]), "(123)": matrix([[1]])}),
            ("sign", {"(12)": matrix([[-1]]), "(123)": matrix([[1]])}),
            ("std2", {"(12)": refl, "(123)": rot}),
        ]
    if name == "D4":
        out = []
        for er, es, nm in ((1, 1, "triv"), (1, -1, "chi_r"), (-1, 1, "chi_s"), (-1, -1, "chi_rs")):
            out.append((nm, {"r": matrix([[er]]), "s": matrix([[es]])}))
        out.append(("std2", {"r": matrix([[0, -1], [1, 0]]), "s": matrix([[1, 0], [0, -1]])}))
        return out
    raise UnsupportedGroup(f"no corepresentations catalogued for {name}")


def _same_group(G: FiniteGroup, ref: FiniteGroup) -> bool:
    if G.elements != ref.elements:
        return False
    return all(G.mul(a, b) == ref.mul(a, b) for a in G.elements for b in G.elements)


def decompose_regular(G: FiniteGroup, H: FunctionAlgebra | None = None) -> list:
    """Irreducible unitary corepresentations of Fun(G) for catalogue groups.

    For groups isomorphic (not equal) to a catalogue group the catalogue
    corepresentations are transported along an isomorphism.
    """
    H = H or FunctionAlgebra(G)
    ref = None
    if G.name in GROUP_BUILDERS:
        cand = GROUP_BUILDERS[G.name]()
        if _same_group(G, cand):
            ref = cand
    iso = None
    if ref is None:
        for cname, build in GROUP_BUILDERS.items():
            cand = build()
            if cand.order != G.order:
                continue
            iso = find_isomorphism(cand, G)
            if iso is not None:
                ref = cand
                break
        if ref is None:
            raise UnsupportedGroup(f"{G.name} is not isomorphic to a catalogue group")
    coreps = []
    for nm, images in _catalogue_reps(ref):
        if images:
            rho = representation_from_generators(ref, images)
        else:
            rho = {ref.identity: identity_matrix(1)}
        if iso is not None:
            rho = {iso[x]: m for x, m in rho.items()}
        c = Corepresentation.from_matrices(H, rho, f"{ref.name}:{nm}")
        coreps.append(c)
    _verify_decomposition(H, coreps)
    return coreps


def _verify_decomposition(H: FunctionAlgebra, coreps: list):
    for c in coreps:
        bad = [x for x in check_corepresentation(H, c) if not x.passed]
        if bad:
            raise InvalidGroup(f"catalogue corepresentation {c.name} fails {bad[0].name}")
    count, rank = coefficient_rank(H, coreps)
    if rank != H.space.dim:
        raise InvalidGroup("matrix coefficients do not span the algebra")
    for c in coreps:
        # a corepresentation whose coefficients are dependent splits over a larger field
        _, r = coefficient_rank(H, [c])
        c.absolutely_irreducible = r == c.dim ** 2


def coefficient_rank(H: FunctionAlgebra, coreps: list) -> tuple:
    """(number of coefficients, rank of their span)."""
    ech = Echelon()
    count = 0
    for c in coreps:
        for g in c.coefficients():
            ech.add(H.space.to_row(g))
            count += 1
    return count, ech.rank


def find_isomorphism(A: FiniteGroup, B: FiniteGroup) -> dict | None:
    """Brute-force isomorphism A -> B for small groups (generator images)."""
    if A.order != B.order:
        return None
    gens = []
    span = {A.identity}

    def closure(gs):
        out = {A.identity}
        frontier = [A.identity]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gs:
                    y = A.mul(x, g)
                    if y not in out:
                        out.add(y)
                        nxt.append(y)
            frontier = nxt
        return out

    for a in A.elements:
        if a not in span:
            gens.append(a)
            span = closure(gens)
        if len(span) == A.order:
            break
    orders_b = {b: B.element_order(b) for b in B.elements}
    choices = [[b for b in B.elements if orders_b[b] == A.element_order(g)] for g in gens]
    for imgs in product(*choices):
        phi = {A.identity: B.identity}
        frontier = [A.identity]
        ok = True
        while frontier and ok:
            nxt = []
            for x in frontier:
                for g, gb in zip(gens, imgs):
                    y = A.mul(x, g)
                    yb = B.mul(phi[x], gb)
                    if y in phi:
                        if phi[y] != yb:
                            ok = False
                            break
                    else:
                        phi[y] = yb
                        nxt.append(y)
                if not ok:
                    break
            frontier = nxt
        if not ok or len(set(phi.values())) != A.order:
            continue
        if all(phi[A.mul(x, y)] == B.mul(phi[x], phi[y]) for x in A.elements for y in A.elements):
            return phi
    return None


def parse_group_spec(text: str, name: str = "G") -> FiniteGroup:
    """Group file: an ``elements:`` line, then a ``table:`` block of rows.

    Row i, column j of the table is elements[i] * elements[j].  The delta basis
    of Fun(G) follows the file order.
    """
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    elements = None
    rows = []
    in_table = False
    for ln in lines:
        low = ln.lower()
        if low.startswith("name:"):
            name = ln.split(":", 1)[1].strip()
        elif low.startswith("elements:"):
            elements = ln.split(":", 1)[1].split()
        elif low.startswith("table:"):
            in_table = True
            rest = ln.split(":", 1)[1].split()
            if rest:
                rows.append(rest)
        elif in_table:
            rows.append(ln.split())
        else:
            raise InvalidGroup(f"unexpected line in group spec: {ln!r}")
    if not elements:
        raise InvalidGroup("group spec lists no elements")
    if len(rows) != len(elements) or any(len(r) != len(elements) for r in rows):
        raise InvalidGroup("multiplication table has the wrong shape")
    table = {(a, b): rows[i][j] for i, a in enumerate(elements) for j, b in enumerate(elements)}
    return FiniteGroup(elements, table, name=name)


def list_catalogue() -> list:
    """Stable listing of groups, corepresentations and root systems."""
    from .dunkl import ROOT_SYSTEM_CATALOGUE

    out = []
    for gname in GROUP_BUILDERS:
        G = GROUP_BUILDERS[gname]()
        out.append(f"group {gname} order={G.order}")
        H = FunctionAlgebra(G)
        for c in decompose_regular(G, H):
            out.append(f"corep {c.name} dim={c.dim}")
    for kind, rank in ROOT_SYSTEM_CATALOGUE:
        out.append(f"root-system {kind}{rank}")
    return out
