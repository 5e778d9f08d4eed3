"""Finite covers as simplicial nerves, and sheaves of groups on them.

A nerve keeps all faces up to dimension 3 (vertices, edges, triangles,
tetrahedra), enough to carry Cech cochains in degrees 0..2 plus the
cocycle condition in degree 2.  A sheaf of groups assigns a Cayley-table
group to every face and a homomorphism to every codimension-1 face
inclusion; longer restrictions are composed, which functoriality makes
well defined.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import StructureError
from .groups import (FiniteGroup, GroupHom, NormalSeries, Subgroup,
                     _normal_in, aq_degree, quotient)

Face = tuple[int, ...]


class Nerve:
    """A finite simplicial complex, downward closed, faces in ascending order."""

    def __init__(self, vertices, faces):
        self.vertices = tuple(sorted(int(v) for v in vertices))
        if len(set(self.vertices)) != len(self.vertices):
            raise StructureError("duplicate vertices")
        by_dim: dict[int, list[Face]] = {0: [(v,) for v in self.vertices], 1: [], 2: [], 3: []}
        seen = set(by_dim[0])
        for f in faces:
            ft = tuple(int(v) for v in f)
            if tuple(sorted(ft)) != ft:
                raise StructureError(f"face {ft} not in ascending vertex order")
            if len(set(ft)) != len(ft):
                raise StructureError(f"face {ft} has repeated vertices")
            if len(ft) - 1 > 3:
                raise StructureError(f"face {ft} exceeds dimension 3")
            if any(v not in self.vertices for v in ft):
                raise StructureError(f"face {ft} uses unknown vertices")
            if ft in seen:
                continue
            seen.add(ft)
            if len(ft) >= 2:
                by_dim[len(ft) - 1].append(ft)
        for d in (1, 2, 3):
            by_dim[d].sort()
        self.faces_by_dim = by_dim
        self._face_index = {
            f: i for d in range(4) for i, f in enumerate(by_dim[d])
        }
        self._check_downward_closed()

    def _check_downward_closed(self):
        for d in (1, 2, 3):
            for f in self.faces_by_dim[d]:
                for sub in itertools.combinations(f, d):
                    if sub not in self._face_index:
                        raise StructureError(f"face {f} is missing its subface {sub}")

    def faces(self, dim: int) -> list[Face]:
        return self.faces_by_dim[dim]

    @property
    def dim(self) -> int:
        return max(d for d in range(4) if self.faces_by_dim[d])

    def face_index(self, face: Face) -> int:
        return self._face_index[face]

    def all_faces(self):
        for d in range(4):
            yield from self.faces_by_dim[d]

    def codim1_pairs(self):
        """All inclusions (sigma, tau) with dim tau = dim sigma + 1."""
        for d in (1, 2, 3):
            for tau in self.faces_by_dim[d]:
                for sub in itertools.combinations(tau, d):
                    yield sub, tau

    def __repr__(self):
        counts = [len(self.faces_by_dim[d]) for d in range(4)]
        return f"Nerve(v={counts[0]}, e={counts[1]}, t={counts[2]}, tet={counts[3]})"

    def __eq__(self, other):
        return (isinstance(other, Nerve)
                and self.vertices == other.vertices
                and self.faces_by_dim == other.faces_by_dim)

    def __hash__(self):
        return hash((self.vertices, tuple(tuple(self.faces_by_dim[d]) for d in range(4))))


def cycle_nerve(n: int) -> Nerve:
    """n vertices, n edges, no triangles (n >= 3)."""
    if n < 3:
        raise StructureError("cycle(n) needs n >= 3")
    edges = sorted(tuple(sorted((i, (i + 1) % n))) for i in range(n))
    return Nerve(range(n), edges)


def simplex_nerve(n: int, solid: bool = True) -> Nerve:
    """The full n-simplex (solid) or its boundary, capped at dimension 3."""
    if n < 1 or n > 4:
        raise StructureError("simplex(n) supported for 1 <= n <= 4")
    faces = []
    maxdim = n if solid else n - 1
    for d in range(1, min(maxdim, 3) + 1):
        faces.extend(itertools.combinations(range(n + 1), d + 1))
    return Nerve(range(n + 1), faces)


# Minimal 6-vertex triangulation of the projective plane (hemi-icosahedron):
# 10 triangles, each of the 15 edges shared by exactly two of them.
_RP2_TRIANGLES = [
    (0, 1, 2), (0, 1, 3), (0, 2, 4), (0, 3, 5), (0, 4, 5),
    (1, 2, 5), (1, 3, 4), (1, 4, 5), (2, 3, 4), (2, 3, 5),
]


def rp2_nerve() -> Nerve:
    faces = list(_RP2_TRIANGLES)
    for t in _RP2_TRIANGLES:
        faces.extend(itertools.combinations(t, 2))
    return Nerve(range(6), sorted(set(faces)))


def point_nerve() -> Nerve:
    return Nerve([0], [])


class GroupSheaf:
    """A sheaf of groups on a nerve.

    ``groups[face]`` is a FiniteGroup; ``restrictions[(sigma, tau)]`` a
    GroupHom groups(sigma) -> groups(tau) for every codimension-1
    inclusion.  Longer restrictions insert the missing vertices one at a
    time in ascending order; validation certifies that the result is
    path independent.
    """

    def __init__(self, nerve: Nerve, groups: dict[Face, FiniteGroup],
                 restrictions: dict[tuple[Face, Face], GroupHom], name: str = "F"):
        self.nerve = nerve
        self.groups = dict(groups)
        self.restrictions = dict(restrictions)
        self.name = name
        for f in nerve.all_faces():
            if f not in self.groups:
                raise StructureError(f"no group attached to face {f}")
        for sigma, tau in nerve.codim1_pairs():
            hom = self.restrictions.get((sigma, tau))
            if hom is None:
                raise StructureError(f"missing restriction {sigma} -> {tau}")
            if hom.source is not self.groups[sigma] or hom.target is not self.groups[tau]:
                raise StructureError(f"restriction {sigma} -> {tau} has wrong endpoints")
        self._res_cache: dict[tuple[Face, Face], GroupHom] = {}

    def group(self, face: Face) -> FiniteGroup:
        return self.groups[face]

    def res(self, sigma: Face, tau: Face) -> GroupHom:
        """Composed restriction along sigma c= tau."""
        if sigma == tau:
            return GroupHom.identity_hom(self.groups[sigma])
        key = (sigma, tau)
        hom = self._res_cache.get(key)
        if hom is not None:
            return hom
        if not set(sigma) <= set(tau):
            raise StructureError(f"{sigma} is not a subface of {tau}")
        missing = sorted(set(tau) - set(sigma))
        mid = tuple(sorted(sigma + (missing[0],)))
        first = self.restrictions[(sigma, mid)] if len(mid) - len(sigma) == 1 else None
        assert first is not None
        hom = self.res(mid, tau).compose(first)
        self._res_cache[key] = hom
        return hom

    def validate(self) -> list[str]:
        """Functoriality report; empty when every composition square commutes."""
        report = []
        for d in (2, 3):
            for tau in self.nerve.faces(d):
                paths = {}
                for sigma in itertools.combinations(tau, d - 1):
                    for v in sorted(set(tau) - set(sigma)):
                        mid = tuple(sorted(sigma + (v,)))
                        hom = self.restrictions[(mid, tau)].compose(
                            self.restrictions[(sigma, mid)])
                        paths.setdefault(sigma, []).append((mid, hom))
                for sigma, homs in paths.items():
                    base = homs[0][1]
                    for mid, hom in homs[1:]:
                        if not np.array_equal(base.image, hom.image):
                            report.append(
                                f"restriction square {sigma} -> {tau} differs via {homs[0][0]} vs {mid}"
                            )
        return report

    def is_abelian(self) -> bool:
        return all(g.is_abelian for g in self.groups.values())

    @staticmethod
    def constant(nerve: Nerve, group: FiniteGroup, name: str | None = None) -> "GroupSheaf":
        ident = GroupHom.identity_hom(group)
        groups = {f: group for f in nerve.all_faces()}
        restrictions = {(s, t): ident for s, t in nerve.codim1_pairs()}
        return GroupSheaf(nerve, groups, restrictions,
                          name=name or f"const[{group.name}]")

    @staticmethod
    def twisted(nerve: Nerve, group: FiniteGroup,
                edge_twists: dict[Face, GroupHom], name: str | None = None) -> "GroupSheaf":
        """One copy of ``group`` per face, twisted restriction maps.

        ``edge_twists[(i, j)]`` is an automorphism T of the group; the
        restriction from vertex j into any face with minimal vertex i
        applies T (composing along edges from the face's minimal vertex).
        Twists must satisfy T_ik = T_ij T_jk on triangles; vertices
        without an explicit twist use the identity.
        """
        edge_set = set(nerve.faces(1))
        auts: dict[tuple[int, int], np.ndarray] = {}
        for (i, j), hom in edge_twists.items():
            if (i, j) not in edge_set:
                raise StructureError(f"twist key ({i}, {j}) is not an edge of the nerve")
            if not (hom.source is group and hom.target is group and hom.is_injective):
                raise StructureError(f"edge twist {i},{j} is not an automorphism")
            auts[(i, j)] = hom.image
        ident = np.arange(group.order, dtype=np.int32)

        def transport(i: int, j: int) -> np.ndarray:
            # chart change from vertex j into vertex i frame (i < j);
            # unlisted edges carry the identity
            if i == j:
                return ident
            return auts.get((i, j), ident)

        groups = {f: group for f in nerve.all_faces()}
        restrictions = {}
        for sigma, tau in nerve.codim1_pairs():
            m_tau, m_sigma = tau[0], sigma[0]
            if m_tau == m_sigma:
                restrictions[(sigma, tau)] = GroupHom.identity_hom(group)
            else:
                restrictions[(sigma, tau)] = GroupHom(
                    group, group, transport(m_tau, m_sigma), check=False)
        sheaf = GroupSheaf(nerve, groups, restrictions, name=name or f"tw[{group.name}]")
        bad = sheaf.validate()
        if bad:
            raise StructureError("edge twists are not functorial: " + "; ".join(bad))
        return sheaf


class SheafMorphism:
    """Per-face homomorphisms commuting with all restrictions."""

    def __init__(self, source: GroupSheaf, target: GroupSheaf,
                 maps: dict[Face, GroupHom], check: bool = True):
        if source.nerve != target.nerve:
            raise StructureError("morphism endpoints live on different nerves")
        self.source = source
        self.target = target
        self.maps = dict(maps)
        if check:
            self.check()

    def check(self):
        for f in self.source.nerve.all_faces():
            hom = self.maps.get(f)
            if hom is None:
                raise StructureError(f"morphism missing component at {f}")
            if hom.source is not self.source.groups[f] or hom.target is not self.target.groups[f]:
                raise StructureError(f"morphism component at {f} has wrong endpoints")
        for sigma, tau in self.source.nerve.codim1_pairs():
            lhs = self.maps[tau].image[self.source.restrictions[(sigma, tau)].image]
            rhs = self.target.restrictions[(sigma, tau)].image[self.maps[sigma].image]
            if not np.array_equal(lhs, rhs):
                raise StructureError(f"morphism does not commute with restriction {sigma} -> {tau}")

    def at(self, face: Face) -> GroupHom:
        return self.maps[face]

    def compose(self, other: "SheafMorphism") -> "SheafMorphism":
        """self after other."""
        maps = {f: self.maps[f].compose(other.maps[f]) for f in self.maps}
        return SheafMorphism(other.source, self.target, maps, check=False)

    @staticmethod
    def identity(sheaf: GroupSheaf) -> "SheafMorphism":
        maps = {f: GroupHom.identity_hom(sheaf.groups[f]) for f in sheaf.nerve.all_faces()}
        return SheafMorphism(sheaf, sheaf, maps, check=False)


class SubSheaf:
    """A sub-sheaf of groups: member subsets per face, ambient restrictions."""

    def __init__(self, ambient: GroupSheaf, members: dict[Face, np.ndarray], check: bool = True):
        self.ambient = ambient
        self.members = {f: np.unique(np.asarray(m, dtype=np.int32))
                        for f, m in members.items()}
        if check:
            self.check()
        self._materialized: tuple[GroupSheaf, SheafMorphism] | None = None

    def check(self):
        for f in self.ambient.nerve.all_faces():
            if f not in self.members:
                raise StructureError(f"sub-sheaf missing member set at {f}")
            Subgroup(self.ambient.groups[f], self.members[f])
        for sigma, tau in self.ambient.nerve.codim1_pairs():
            img = self.ambient.restrictions[(sigma, tau)].image[self.members[sigma]]
            if not np.isin(img, self.members[tau]).all():
                raise StructureError(
                    f"sub-sheaf not stable under restriction {sigma} -> {tau}")

    def subgroup_at(self, face: Face) -> Subgroup:
        return Subgroup(self.ambient.groups[face], self.members[face], check=False)

    def order_at(self, face: Face) -> int:
        return int(self.members[face].size)

    def is_pointwise_trivial(self) -> bool:
        return all(m.size == 1 for m in self.members.values())

    def contains(self, other: "SubSheaf") -> bool:
        return all(
            np.isin(other.members[f], self.members[f]).all()
            for f in self.ambient.nerve.all_faces()
        )

    def as_sheaf(self) -> tuple[GroupSheaf, SheafMorphism]:
        """Materialize the sub-sheaf with its inclusion morphism."""
        if self._materialized is not None:
            return self._materialized
        amb = self.ambient
        groups, incl = {}, {}
        for f in amb.nerve.all_faces():
            sub, hom = Subgroup(amb.groups[f], self.members[f], check=False).as_group()
            groups[f] = sub
            incl[f] = hom
        restrictions = {}
        for sigma, tau in amb.nerve.codim1_pairs():
            amb_res = amb.restrictions[(sigma, tau)]
            src, tgt = groups[sigma], groups[tau]
            pos = np.full(amb.groups[tau].order, -1, dtype=np.int32)
            pos[self.members[tau]] = np.arange(tgt.order, dtype=np.int32)
            image = pos[amb_res.image[self.members[sigma]]]
            restrictions[(sigma, tau)] = GroupHom(src, tgt, image, check=False)
        sheaf = GroupSheaf(amb.nerve, groups, restrictions, name=f"{amb.name}|sub")
        morphism = SheafMorphism(sheaf, amb,
                                 {f: incl[f] for f in amb.nerve.all_faces()}, check=False)
        self._materialized = (sheaf, morphism)
        return self._materialized

    @staticmethod
    def full(sheaf: GroupSheaf) -> "SubSheaf":
        return SubSheaf(sheaf, {
            f: np.arange(sheaf.groups[f].order, dtype=np.int32)
            for f in sheaf.nerve.all_faces()
        }, check=False)

    @staticmethod
    def trivial(sheaf: GroupSheaf) -> "SubSheaf":
        return SubSheaf(sheaf, {
            f: np.array([sheaf.groups[f].identity], dtype=np.int32)
            for f in sheaf.nerve.all_faces()
        }, check=False)


def validate_sheaf(sheaf: GroupSheaf) -> list[str]:
    """Spec-level validation entry point: functoriality violation report."""
    return sheaf.validate()


def quotient_sheaf(sheaf: GroupSheaf, sub: SubSheaf) -> tuple[GroupSheaf, SheafMorphism]:
    """Pointwise quotient sheaf with its projection morphism.

    Requires the sub-sheaf pointwise normal and restriction stable; the
    induced restrictions are checked to be well defined (independent of
    coset representative, which restriction stability guarantees).
    """
    if sub.ambient is not sheaf:
        raise StructureError("sub-sheaf belongs to a different sheaf")
    groups, projs = {}, {}
    for f in sheaf.nerve.all_faces():
        n = Subgroup(sheaf.groups[f], sub.members[f], check=False)
        try:
            q, proj = quotient(sheaf.groups[f], n)
        except StructureError as exc:
            raise StructureError(f"quotient fails at face {f}: {exc}") from exc
        groups[f] = q
        projs[f] = proj
    restrictions = {}
    for sigma, tau in sheaf.nerve.codim1_pairs():
        amb_res = sheaf.restrictions[(sigma, tau)]
        qs, qt = groups[sigma], groups[tau]
        image = np.empty(qs.order, dtype=np.int32)
        for c in range(qs.order):
            rep = int(np.nonzero(projs[sigma].image == c)[0][0])
            image[c] = projs[tau](amb_res(rep))
        # well-definedness: all representatives must agree
        check = projs[tau].image[amb_res.image]
        if not np.array_equal(check, image[projs[sigma].image]):
            raise StructureError(f"induced restriction ill defined at {sigma} -> {tau}")
        restrictions[(sigma, tau)] = GroupHom(qs, qt, image, check=False)
    qsheaf = GroupSheaf(sheaf.nerve, groups, restrictions, name=f"{sheaf.name}/sub")
    return qsheaf, SheafMorphism(sheaf, qsheaf, projs, check=False)


class SheafSeries:
    """A descending chain of sub-sheaves H_0 >= H_1 >= ... >= H_N.

    H_0 is the full ambient sheaf and H_N is pointwise trivial; on every
    face the member chain is a normal series of the ambient group, and
    every term is pointwise normal in the ambient sheaf.  ``grade_offset``
    names the external grading (position j carries grade j + offset);
    exterior-algebra filtrations start their numbering at 2.
    """

    def __init__(self, ambient: GroupSheaf, terms: list[SubSheaf],
                 grade_offset: int = 0, green_type: bool = False, check: bool = True):
        self.ambient = ambient
        self.terms = list(terms)
        self.grade_offset = grade_offset
        self.green_type = green_type
        if check:
            self._validate()

    def _validate(self):
        if not self.terms:
            raise StructureError("series needs at least one term")
        if not all(t.ambient is self.ambient for t in self.terms):
            raise StructureError("series terms must share the ambient sheaf")
        first, last = self.terms[0], self.terms[-1]
        for f in self.ambient.nerve.all_faces():
            if first.order_at(f) != self.ambient.groups[f].order:
                raise StructureError("series must start at the full sheaf")
        if not last.is_pointwise_trivial():
            raise StructureError("series must end at the pointwise trivial sheaf")
        for f in self.ambient.nerve.all_faces():
            g = self.ambient.groups[f]
            chain = [t.subgroup_at(f) for t in self.terms]
            NormalSeries(g, chain)   # validates inclusions + normality in predecessor
            for sub in chain:
                if not _normal_in(g, sub, g.full_subgroup()):
                    raise StructureError(f"series term not normal in the ambient group at {f}")

    @property
    def length(self) -> int:
        return len(self.terms) - 1

    def term(self, j: int) -> SubSheaf:
        if j >= len(self.terms):
            return self.terms[-1]
        return self.terms[j]

    def grade(self, j: int) -> int:
        return j + self.grade_offset

    def pointwise_series(self, face: Face) -> NormalSeries:
        cache = getattr(self, "_pw_cache", None)
        if cache is None:
            cache = self._pw_cache = {}
        if face not in cache:
            g = self.ambient.groups[face]
            cache[face] = NormalSeries(g, [t.subgroup_at(face) for t in self.terms], check=False)
        return cache[face]

    def quotient_pair(self, k: int, j: int) -> tuple[GroupSheaf, SheafMorphism]:
        """The quotient sheaf H_k / H_j (k <= j) with projection from H_k."""
        if not 0 <= k <= j:
            raise StructureError(f"bad quotient indices ({k}, {j})")
        key = (k, j)
        cache = getattr(self, "_qcache", None)
        if cache is None:
            cache = self._qcache = {}
        if key in cache:
            return cache[key]
        hk_sheaf, _ = self.term(k).as_sheaf()
        inner = self.term(j)
        members = {}
        for f in self.ambient.nerve.all_faces():
            outer = self.term(k).members[f]
            pos = np.searchsorted(outer, inner.members[f])
            members[f] = pos.astype(np.int32)
        sub_in_hk = SubSheaf(hk_sheaf, members, check=False)
        cache[key] = quotient_sheaf(hk_sheaf, sub_in_hk)
        return cache[key]


def sheaf_series_checks(series: SheafSeries) -> tuple[int, bool, dict[int, int]]:
    """(AQ degree, centrality, sheaf-wide smallest witness per index).

    The degree is the minimum over faces of the pointwise degree; the
    series is central when for each j > 0 one witness k < j works on
    every face simultaneously.
    """
    from .groups import central_witnesses
    nerve = series.ambient.nerve
    degree = min(
        aq_degree(series.pointwise_series(f)) for f in nerve.all_faces()
    )
    witness: dict[int, int] = {}
    central = True
    for j in range(1, series.length):
        shared: set[int] | None = None
        for f in nerve.all_faces():
            hits = set(central_witnesses(series.pointwise_series(f)).get(j, []))
            shared = hits if shared is None else (shared & hits)
        if shared:
            witness[j] = min(shared)
        else:
            central = False
    return degree, central, witness
