"""Cech cochain engine on a nerve.

Degree 0/1/2 cochains valued in a sheaf of groups; nonabelian H^1 by
full coboundary-orbit enumeration with canonical (lexicographically
minimal) representatives; abelian H^0/H^1/H^2 by exact integer linear
algebra; connecting maps delta^1/delta^2 and the star action of global
sections on torsor classes.

Cocycle convention: on a triangle (i, j, k) with all vertex tuples
ascending, g_ij * g_jk = g_ik after restriction to the triangle; the
coboundary action is g_ij -> h_i * g_ij * h_j^-1.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .abelian import (AbelianStructure, CohomologyGroup, abelian_structure,
                      hom_matrix)
from .errors import ResourceLimitError, StructureError
from .groups import FiniteGroup, GroupHom
from .sites import Face, GroupSheaf, SheafMorphism

DEFAULT_BUDGET = 10_000_000


def _check_budget(estimate: int, budget: int | None, what: str) -> None:
    limit = DEFAULT_BUDGET if budget is None else budget
    if estimate > limit:
        raise ResourceLimitError(f"{what} too large", estimate, limit)


@dataclass(frozen=True)
class Cochain:
    """An n-cochain: one group element per n-face, aligned with the
    sorted face list of the nerve."""

    sheaf: GroupSheaf
    degree: int
    values: tuple[int, ...]

    def __post_init__(self):
        faces = self.sheaf.nerve.faces(self.degree)
        if len(self.values) != len(faces):
            raise StructureError(
                f"degree-{self.degree} cochain needs {len(faces)} values, got {len(self.values)}")

    def value_at(self, face: Face) -> int:
        idx = self.sheaf.nerve.faces(self.degree).index(face)
        return self.values[idx]

    def is_cocycle(self) -> bool:
        """Degree-1 cocycle condition over every triangle."""
        if self.degree != 1:
            raise StructureError("cocycle condition implemented for degree 1")
        sheaf = self.sheaf
        edges = sheaf.nerve.faces(1)
        pos = {e: i for i, e in enumerate(edges)}
        for tri in sheaf.nerve.faces(2):
            i, j, k = tri
            g = sheaf.groups[tri]
            a = sheaf.res((i, j), tri)(self.values[pos[(i, j)]])
            b = sheaf.res((j, k), tri)(self.values[pos[(j, k)]])
            c = sheaf.res((i, k), tri)(self.values[pos[(i, k)]])
            if g.mul(a, b) != c:
                return False
        return True


def identity_cochain(sheaf: GroupSheaf, degree: int) -> Cochain:
    values = tuple(sheaf.groups[f].identity for f in sheaf.nerve.faces(degree))
    return Cochain(sheaf, degree, values)


class TorsorTable:
    """Full orbit decomposition of the degree-1 cocycles of a sheaf.

    Cochains are encoded as mixed-radix codes over the sorted edge list;
    the kernel backend labels every cocycle with the minimal code in its
    coboundary orbit.  Canonicalization is then a table lookup.
    """

    def __init__(self, sheaf: GroupSheaf, budget: int | None = None):
        self.sheaf = sheaf
        nerve = sheaf.nerve
        self.edges = nerve.faces(1)
        self.sizes = np.array([sheaf.groups[e].order for e in self.edges], dtype=np.int64)
        total = 1
        for s in self.sizes:
            total *= int(s)
        _check_budget(total, budget, f"H^1 enumeration over {sheaf.name}")
        self.total = total
        weights = np.ones(len(self.edges), dtype=np.int64)
        for i in range(len(self.edges) - 2, -1, -1):
            weights[i] = weights[i + 1] * self.sizes[i + 1]
        self.weights = weights
        self._edge_pos = {e: i for i, e in enumerate(self.edges)}

        flags = kernels.filter_cocycles(self.sizes, self.weights, *self._triangle_tables())
        move_eidx, move_perm = self._moves()
        self.labels = kernels.orbit_labels(flags, self.sizes, self.weights,
                                           move_eidx, move_perm)
        codes = np.unique(self.labels[self.labels >= 0])
        base = int(self.labels[self.encode_values(
            tuple(sheaf.groups[e].identity for e in self.edges))])
        ordered = [base] + [int(c) for c in codes if int(c) != base]
        self.class_codes = ordered
        self.base_code = base
        self._class_pos = {c: i for i, c in enumerate(ordered)}

    # -- preparation -------------------------------------------------------

    def _triangle_tables(self):
        sheaf, nerve = self.sheaf, self.sheaf.nerve
        tris = nerve.faces(2)
        ntri = len(tris)
        maxe = int(self.sizes.max()) if self.sizes.size else 1
        maxg = max((sheaf.groups[t].order for t in tris), default=1)
        tri_edges = np.zeros((ntri, 3), dtype=np.int64)
        map1 = np.zeros((ntri, maxe), dtype=np.int64)
        map2 = np.zeros((ntri, maxe), dtype=np.int64)
        map3 = np.zeros((ntri, maxe), dtype=np.int64)
        tri_mul = np.zeros((ntri, maxg, maxg), dtype=np.int64)
        for t, tri in enumerate(tris):
            i, j, k = tri
            e1, e2, e3 = (i, j), (j, k), (i, k)
            tri_edges[t] = (self._edge_pos[e1], self._edge_pos[e2], self._edge_pos[e3])
            for m, e in ((map1, e1), (map2, e2), (map3, e3)):
                img = sheaf.res(e, tri).image
                m[t, :img.size] = img
            g = sheaf.groups[tri]
            tri_mul[t, :g.order, :g.order] = g.table
        return tri_edges, map1, map2, map3, tri_mul

    def _moves(self):
        sheaf, nerve = self.sheaf, self.sheaf.nerve
        moves = []
        for v in nerve.vertices:
            gv = sheaf.groups[(v,)]
            incident = [(pos, e) for e, pos in self._edge_pos.items() if v in e]
            if not incident:
                continue
            for gen in gv.generating_set():
                move = []
                for pos, e in incident:
                    ge = sheaf.groups[e]
                    r = sheaf.res((v,), e)(gen)
                    if e[0] == v:
                        perm = ge.table[r, :]
                    else:
                        perm = ge.table[:, ge.inv(r)]
                    move.append((pos, perm.astype(np.int64)))
                moves.append(move)
        nmoves = len(moves)
        maxdeg = max((len(m) for m in moves), default=1)
        maxe = int(self.sizes.max()) if self.sizes.size else 1
        move_eidx = np.full((nmoves, maxdeg), -1, dtype=np.int64)
        move_perm = np.zeros((nmoves, maxdeg, maxe), dtype=np.int64)
        move_perm[:, :, :] = np.arange(maxe, dtype=np.int64)[None, None, :]
        for m, move in enumerate(moves):
            for k, (pos, perm) in enumerate(move):
                move_eidx[m, k] = pos
                move_perm[m, k, :perm.size] = perm
        return move_eidx, move_perm

    # -- encoding ----------------------------------------------------------

    def encode_values(self, values) -> int:
        return int(sum(int(v) * int(w) for v, w in zip(values, self.weights)))

    def decode(self, code: int) -> tuple[int, ...]:
        return tuple(int((code // int(w)) % int(s))
                     for w, s in zip(self.weights, self.sizes))

    def canonical_code(self, values) -> int:
        code = self.encode_values(values)
        label = int(self.labels[code])
        if label < 0:
            raise StructureError("cochain is not a cocycle")
        return label

    def class_of_values(self, values) -> "TorsorClass":
        code = self.canonical_code(values)
        return TorsorClass(self.sheaf, Cochain(self.sheaf, 1, self.decode(code)), code)

    def class_by_position(self, pos: int) -> "TorsorClass":
        code = self.class_codes[pos]
        return TorsorClass(self.sheaf, Cochain(self.sheaf, 1, self.decode(code)), code)

    def classes(self) -> list["TorsorClass"]:
        return [self.class_by_position(i) for i in range(len(self.class_codes))]

    def position(self, cls: "TorsorClass") -> int:
        return self._class_pos[cls.code]

    def __len__(self):
        return len(self.class_codes)


@dataclass(frozen=True)
class TorsorClass:
    """A degree-1 cohomology class with its canonical representative."""

    sheaf: GroupSheaf
    rep: Cochain
    code: int
    canonical: bool = True

    @property
    def is_basepoint(self) -> bool:
        ident = tuple(self.sheaf.groups[e].identity for e in self.sheaf.nerve.faces(1))
        return self.rep.values == ident

    def __eq__(self, other):
        return (isinstance(other, TorsorClass)
                and self.sheaf is other.sheaf and self.code == other.code)

    def __hash__(self):
        return hash((id(self.sheaf), self.code))


def torsor_table(sheaf: GroupSheaf, budget: int | None = None) -> TorsorTable:
    # cached on the sheaf itself so identity outlives any id() reuse
    table = getattr(sheaf, "_torsor_table", None)
    if table is None:
        table = TorsorTable(sheaf, budget)
        sheaf._torsor_table = table
    return table


def h1_nonabelian(sheaf: GroupSheaf, budget: int | None = None) -> list[TorsorClass]:
    """All degree-1 classes; the base-point class comes first, the rest
    follow in increasing canonical-code order."""
    return torsor_table(sheaf, budget).classes()


# -- global sections ---------------------------------------------------------


@dataclass
class H0Result:
    sheaf: GroupSheaf
    sections: list[tuple[int, ...]]       # per-vertex element tuples
    group: FiniteGroup                    # componentwise product structure
    inclusions: dict[int, GroupHom]       # section group -> vertex group

    @property
    def order(self) -> int:
        return len(self.sections)

    def index(self, section) -> int:
        return self.sections.index(tuple(section))


def h0(sheaf: GroupSheaf, budget: int | None = None) -> H0Result:
    """Global sections: vertex tuples agreeing under both restrictions
    on every edge, with the componentwise group structure."""
    nerve = sheaf.nerve
    verts = nerve.vertices
    edges = nerve.faces(1)
    limit = DEFAULT_BUDGET if budget is None else budget
    # constraints indexed by the later vertex of each edge
    by_later: dict[int, list[tuple[int, np.ndarray, np.ndarray]]] = {v: [] for v in verts}
    for (a, b) in edges:
        ra = sheaf.res((a,), (a, b)).image
        rb = sheaf.res((b,), (a, b)).image
        by_later[b].append((a, ra, rb))
    sections: list[tuple[int, ...]] = []
    order = {v: i for i, v in enumerate(verts)}
    visited = 0

    def extend(partial: list[int], vi: int):
        nonlocal visited
        if vi == len(verts):
            sections.append(tuple(partial))
            return
        v = verts[vi]
        gv = sheaf.groups[(v,)]
        for x in range(gv.order):
            ok = True
            for (a, ra, rb) in by_later[v]:
                if ra[partial[order[a]]] != rb[x]:
                    ok = False
                    break
            if ok:
                visited += 1
                if visited > limit:
                    raise ResourceLimitError("H^0 search too large", visited, limit)
                partial.append(x)
                extend(partial, vi + 1)
                partial.pop()

    extend([], 0)
    lookup = {s: i for i, s in enumerate(sections)}
    n = len(sections)
    table = np.zeros((n, n), dtype=np.int32)
    for i, s in enumerate(sections):
        for j, t in enumerate(sections):
            prod = tuple(sheaf.groups[(v,)].mul(s[k], t[k]) for k, v in enumerate(verts))
            table[i, j] = lookup[prod]
    group = FiniteGroup(table, name=f"H0[{sheaf.name}]", labels=sections, check=False)
    inclusions = {
        v: GroupHom(group, sheaf.groups[(v,)],
                    np.array([s[i] for s in sections], dtype=np.int32), check=False)
        for i, v in enumerate(verts)
    }
    return H0Result(sheaf, sections, group, inclusions)


# -- abelian coordinates ------------------------------------------------------


class AbelianCech:
    """Exact cohomology of an abelian sheaf via integer linear algebra.

    Every face group gets cyclic-factor coordinates; the Cech
    differentials become integer block matrices and H^0/H^1/H^2 are
    Smith-form quotients with explicit generator cochains.
    """

    def __init__(self, sheaf: GroupSheaf):
        if not sheaf.is_abelian():
            bad = next(f for f in sheaf.nerve.all_faces() if not sheaf.groups[f].is_abelian)
            raise StructureError(f"sheaf is not abelian at face {bad}")
        self.sheaf = sheaf
        self.structures: dict[Face, AbelianStructure] = {
            f: abelian_structure(sheaf.groups[f]) for f in sheaf.nerve.all_faces()
        }
        self._offsets: dict[int, dict[Face, int]] = {}
        self._moduli: dict[int, list[int]] = {}
        for d in range(4):
            off, mod = {}, []
            for f in sheaf.nerve.faces(d):
                off[f] = len(mod)
                mod.extend(self.structures[f].orders)
            self._offsets[d] = off
            self._moduli[d] = mod
        self._delta: dict[int, list[list[int]]] = {}
        self._h: dict[int, CohomologyGroup] = {}

    def moduli(self, degree: int) -> list[int]:
        return self._moduli[degree]

    def delta_matrix(self, degree: int) -> list[list[int]]:
        """Integer matrix of the Cech differential C^degree -> C^degree+1."""
        if degree in self._delta:
            return self._delta[degree]
        nerve = self.sheaf.nerve
        rows, cols = len(self._moduli[degree + 1]), len(self._moduli[degree])
        mat = [[0] * cols for _ in range(rows)]
        for tau in nerve.faces(degree + 1):
            roff = self._offsets[degree + 1][tau]
            tstruct = self.structures[tau]
            for drop in range(degree + 2):
                sigma = tau[:drop] + tau[drop + 1:]
                sign = 1 if drop % 2 == 0 else -1
                # omitting the vertex at position `drop` carries sign (-1)^drop
                coff = self._offsets[degree][sigma]
                block = hom_matrix(self.sheaf.res(sigma, tau),
                                   self.structures[sigma], tstruct)
                for i in range(len(tstruct.orders)):
                    for j in range(len(self.structures[sigma].orders)):
                        mat[roff + i][coff + j] += sign * block[i][j]
        self._delta[degree] = mat
        return mat

    def h(self, n: int) -> CohomologyGroup:
        if n not in self._h:
            if n > 2:
                raise StructureError("cohomology supported in degrees 0..2")
            d_out = self.delta_matrix(n)
            out_mod = self._moduli[n + 1]
            d_in = self.delta_matrix(n - 1) if n > 0 else None
            in_rank = len(self._moduli[n - 1]) if n > 0 else 0
            self._h[n] = CohomologyGroup(self._moduli[n], d_out, out_mod, d_in, in_rank)
        return self._h[n]

    # -- conversions -------------------------------------------------------

    def cochain_to_vec(self, cochain: Cochain) -> list[int]:
        d = cochain.degree
        vec = [0] * len(self._moduli[d])
        for f, val in zip(self.sheaf.nerve.faces(d), cochain.values):
            off = self._offsets[d][f]
            coords = self.structures[f].to_coords[val]
            for i, c in enumerate(coords):
                vec[off + i] = int(c)
        return vec

    def vec_to_cochain(self, degree: int, vec) -> Cochain:
        values = []
        for f in self.sheaf.nerve.faces(degree):
            off = self._offsets[degree][f]
            st = self.structures[f]
            values.append(st.from_coords([vec[off + i] for i in range(st.rank)]))
        return Cochain(self.sheaf, degree, tuple(values))

    def class_coords(self, cochain: Cochain) -> tuple[int, ...]:
        return self.h(cochain.degree).reduce(self.cochain_to_vec(cochain))

    def rep_cochain(self, degree: int, coords) -> Cochain:
        return self.vec_to_cochain(degree, self.h(degree).rep(coords))


def abelian_cech(sheaf: GroupSheaf) -> AbelianCech:
    data = getattr(sheaf, "_abelian_cech", None)
    if data is None:
        data = AbelianCech(sheaf)
        sheaf._abelian_cech = data
    return data


@dataclass(frozen=True)
class H2Class:
    """An H^2 class of an abelian sheaf, held in class coordinates."""

    data: AbelianCech
    coords: tuple[int, ...]

    @property
    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)


def h2_abelian(sheaf: GroupSheaf) -> CohomologyGroup:
    """H^2 of an abelian sheaf as a finite abelian group with explicit
    cocycle generators (errors on a nonabelian face group)."""
    return abelian_cech(sheaf).h(2)


# -- extensions and connecting maps -------------------------------------------


class Extension:
    """A pointwise short exact sequence of sheaves A -> B -> C.

    ``central`` certifies that the image of A lands in the centre of B
    on every face; delta^2 is only defined in that case.
    """

    def __init__(self, incl: SheafMorphism, proj: SheafMorphism, central: bool = False):
        if incl.target is not proj.source:
            raise StructureError("extension maps do not chain (A -> B -> C)")
        self.incl = incl
        self.proj = proj
        self.a = incl.source
        self.b = incl.target
        self.c = proj.target
        self.central = central
        self._validate()
        # least-preimage lift tables per face: proj preimages, incl inverses
        self._proj_lift: dict[Face, np.ndarray] = {}
        self._incl_inv: dict[Face, dict[int, int]] = {}
        for f in self.b.nerve.all_faces():
            pimg = proj.at(f).image
            lift = np.full(self.c.groups[f].order, -1, dtype=np.int64)
            for bidx in range(pimg.size - 1, -1, -1):
                lift[pimg[bidx]] = bidx
            self._proj_lift[f] = lift
            self._incl_inv[f] = {int(v): i for i, v in enumerate(incl.at(f).image)}

    def _validate(self):
        for f in self.b.nerve.all_faces():
            ih, ph = self.incl.at(f), self.proj.at(f)
            if not ih.is_injective:
                raise StructureError(f"extension kernel map not injective at {f}")
            if not ph.is_surjective:
                raise StructureError(f"extension projection not surjective at {f}")
            ker = set(int(x) for x in ph.kernel_members())
            img = set(int(x) for x in ih.image_members())
            if ker != img:
                raise StructureError(f"extension not exact at {f}")
            if self.central:
                bg = self.b.groups[f]
                centre = set(int(x) for x in bg.center_members())
                if not img <= centre:
                    raise StructureError(f"extension flagged central but is not at {f}")

    def lift_section(self, section, choose=None) -> list[int]:
        """Per-vertex lifts of a C-section into B (least preimages by
        default; ``choose`` overrides with explicit B elements)."""
        verts = self.b.nerve.vertices
        if choose is not None:
            return [int(x) for x in choose]
        return [int(self._proj_lift[(v,)][int(c)]) for v, c in zip(verts, section)]

    def pull_to_a(self, face: Face, belem: int) -> int:
        inv = self._incl_inv[face].get(int(belem))
        if inv is None:
            raise StructureError(f"element does not come from the kernel sheaf at {face}")
        return inv


def extension_from_subsheaf(sheaf: GroupSheaf, sub, central: bool | None = None) -> Extension:
    """The short exact sequence A -> F -> F/A attached to a pointwise
    normal sub-sheaf A.  ``central=None`` detects centrality per face."""
    from .sites import quotient_sheaf
    a_sheaf, incl = sub.as_sheaf()
    _, proj = quotient_sheaf(sheaf, sub)
    if central is None:
        central = True
        for f in sheaf.nerve.all_faces():
            centre = set(int(x) for x in sheaf.groups[f].center_members())
            if not set(int(x) for x in sub.members[f]) <= centre:
                central = False
                break
    return Extension(incl, proj, central=central)


def connecting_delta1(ext: Extension, section, budget: int | None = None,
                      lifts=None) -> TorsorClass:
    """delta^1: a global section of C maps to the class of (g_i g_j^-1) in A."""
    nerve = ext.b.nerve
    g = ext.lift_section(section, choose=lifts)
    vpos = {v: i for i, v in enumerate(nerve.vertices)}
    values = []
    for (a, b) in nerve.faces(1):
        gb = ext.b.groups[(a, b)]
        ga = ext.b.res((a,), (a, b))(g[vpos[a]])
        hb = ext.b.res((b,), (a, b))(g[vpos[b]])
        values.append(ext.pull_to_a((a, b), gb.mul(ga, gb.inv(hb))))
    return torsor_table(ext.a, budget).class_of_values(values)


def star_action(ext: Extension, section, acls: TorsorClass,
                budget: int | None = None) -> TorsorClass:
    """(c * a)_ij = g_i a_ij g_j^-1 with g lifting the section c."""
    nerve = ext.b.nerve
    g = ext.lift_section(section)
    vpos = {v: i for i, v in enumerate(nerve.vertices)}
    edges = nerve.faces(1)
    values = []
    for pos, (a, b) in enumerate(edges):
        gb = ext.b.groups[(a, b)]
        left = ext.b.res((a,), (a, b))(g[vpos[a]])
        right = ext.b.res((b,), (a, b))(g[vpos[b]])
        mid = ext.incl.at((a, b))(acls.rep.values[pos])
        val = gb.mul(gb.mul(left, mid), gb.inv(right))
        values.append(ext.pull_to_a((a, b), val))
    return torsor_table(ext.a, budget).class_of_values(values)


def connecting_delta2(ext: Extension, ccls: TorsorClass,
                      lifts=None) -> H2Class:
    """delta^2 of a central extension: lift the C-cocycle edge-wise into B
    and measure the triangle failure in A."""
    if not ext.central:
        raise StructureError("delta^2 requires a central extension")
    nerve = ext.b.nerve
    edges = nerve.faces(1)
    if lifts is None:
        blift = [int(ext._proj_lift[e][v]) for e, v in zip(edges, ccls.rep.values)]
    else:
        blift = [int(x) for x in lifts]
    epos = {e: i for i, e in enumerate(edges)}
    values = []
    for tri in nerve.faces(2):
        i, j, k = tri
        gb = ext.b.groups[tri]
        bij = ext.b.res((i, j), tri)(blift[epos[(i, j)]])
        bjk = ext.b.res((j, k), tri)(blift[epos[(j, k)]])
        bik = ext.b.res((i, k), tri)(blift[epos[(i, k)]])
        fail = gb.mul(gb.mul(bij, bjk), gb.inv(bik))
        values.append(ext.pull_to_a(tri, fail))
    data = abelian_cech(ext.a)
    two = Cochain(ext.a, 2, tuple(values))
    return H2Class(data, data.class_coords(two))


def induced_h1(morphism: SheafMorphism, cls: TorsorClass,
               budget: int | None = None) -> TorsorClass:
    """Push a torsor class through a sheaf morphism, face-wise, and
    canonicalize in the target sheaf."""
    if cls.sheaf is not morphism.source:
        raise StructureError("class does not live in the morphism's source")
    edges = morphism.source.nerve.faces(1)
    values = [morphism.at(e)(v) for e, v in zip(edges, cls.rep.values)]
    return torsor_table(morphism.target, budget).class_of_values(values)


# -- lift-independence audits --------------------------------------------------


def delta1_lift_audit(ext: Extension, section, budget: int | None = None) -> bool:
    """Recompute delta^1 over every choice of vertex lifts; True iff all
    choices land in one class (budgeted product enumeration)."""
    nerve = ext.b.nerve
    verts = nerve.vertices
    cands = []
    for v, c in zip(verts, section):
        pimg = ext.proj.at((v,)).image
        cands.append([i for i in range(len(pimg)) if pimg[i] == int(c)])
    count = 1
    for cs in cands:
        count *= len(cs)
    _check_budget(count, budget, "delta^1 lift audit")
    ref = None
    for combo in itertools.product(*cands):
        cls = connecting_delta1(ext, section, budget, lifts=combo)
        if ref is None:
            ref = cls
        elif cls != ref:
            return False
    return True


def delta2_lift_audit(ext: Extension, ccls: TorsorClass,
                      budget: int | None = None) -> bool:
    """delta^2 independence of the edge-wise lift choices."""
    edges = ext.b.nerve.faces(1)
    cands = []
    for e, c in zip(edges, ccls.rep.values):
        pimg = ext.proj.at(e).image
        cands.append([i for i in range(len(pimg)) if pimg[i] == int(c)])
    count = 1
    for cs in cands:
        count *= len(cs)
    _check_budget(count, budget, "delta^2 lift audit")
    ref = None
    for combo in itertools.product(*cands):
        h2 = connecting_delta2(ext, ccls, lifts=combo)
        if ref is None:
            ref = h2.coords
        elif h2.coords != ref:
            return False
    return True
