"""Exact finite-group algebra on Cayley tables.

Groups live on element indices 0..order-1 with a dense multiplication
table.  Everything here is exact integer arithmetic; validation is
exhaustive for small tables and generator-based (Light's associativity
test) for larger ones.  A second, substitution-based representation for
very large automorphism groups lives in :mod:`cechseries.superalgebra`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import StructureError

# Above this order the n^3 exhaustive associativity scan is replaced by
# Light's test on a generating set (still a proof, much cheaper).
_EXHAUSTIVE_ASSOC_LIMIT = 512


class FiniteGroup:
    """A finite group given by its Cayley table.

    ``table[a, b]`` is the index of the product a*b.  Element labels are
    optional and only used for display; all computation is on indices.
    """

    def __init__(self, table, name: str = "G", labels=None, check: bool = True):
        table = np.asarray(table, dtype=np.int32)
        if table.ndim != 2 or table.shape[0] != table.shape[1]:
            raise StructureError(f"Cayley table must be square, got {table.shape}")
        self.table = table
        self.order = int(table.shape[0])
        self.name = name
        self.labels = list(labels) if labels is not None else None
        if self.order == 0:
            raise StructureError("empty group")
        if table.min() < 0 or table.max() >= self.order:
            raise StructureError("Cayley table entries out of range")
        self.identity = self._find_identity()
        self.inv_table = self._find_inverses()
        if check:
            self._check_associativity()
        self._abelian = None

    # -- construction-time validation -------------------------------------

    def _find_identity(self) -> int:
        n = self.order
        idx = np.arange(n, dtype=np.int32)
        for e in range(n):
            if np.array_equal(self.table[e], idx) and np.array_equal(self.table[:, e], idx):
                return e
        raise StructureError("no two-sided identity element")

    def _find_inverses(self) -> np.ndarray:
        n, e = self.order, self.identity
        inv = np.full(n, -1, dtype=np.int32)
        rows, cols = np.nonzero(self.table == e)
        for a, b in zip(rows, cols):
            if self.table[b, a] == e:
                inv[a] = b
        if (inv < 0).any():
            missing = int(np.nonzero(inv < 0)[0][0])
            raise StructureError(f"element {missing} has no two-sided inverse")
        return inv

    def _check_associativity(self) -> None:
        t = self.table
        if self.order <= _EXHAUSTIVE_ASSOC_LIMIT:
            # (a*b)*c == a*(b*c) for all triples, fully vectorized
            left = t[t, :]            # left[a,b,c] = (a*b)*c
            right = t[:, t]           # right[a,b,c] = a*(b*c)
            if not np.array_equal(left, right):
                bad = np.argwhere(left != right)[0]
                raise StructureError(f"associativity fails at triple {tuple(int(x) for x in bad)}")
        else:
            gens = self.generating_set()
            for g in gens:
                if not np.array_equal(t[t[:, g], :], t[:, t[g, :]]):
                    raise StructureError(f"associativity fails (Light's test at generator {g})")

    # -- basic operations ---------------------------------------------------

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    def inv(self, a: int) -> int:
        return int(self.inv_table[a])

    def conj(self, g: int, h: int) -> int:
        """g h g^-1."""
        return int(self.table[self.table[g, h], self.inv_table[g]])

    def comm(self, g: int, h: int) -> int:
        """Commutator g h g^-1 h^-1."""
        return int(self.table[self.conj(g, h), self.inv_table[h]])

    def power(self, a: int, k: int) -> int:
        if k < 0:
            return self.power(self.inv(a), -k)
        r, x = self.identity, a
        while k:
            if k & 1:
                r = self.mul(r, x)
            x = self.mul(x, x)
            k >>= 1
        return r

    def element_order(self, a: int) -> int:
        n, x = 1, a
        while x != self.identity:
            x = self.mul(x, a)
            n += 1
        return n

    @property
    def is_abelian(self) -> bool:
        if self._abelian is None:
            self._abelian = bool(np.array_equal(self.table, self.table.T))
        return self._abelian

    def label(self, a: int):
        return self.labels[a] if self.labels is not None else a

    def __repr__(self):
        return f"FiniteGroup({self.name}, order={self.order})"

    # -- subgroup machinery ---------------------------------------------------

    def closure(self, gens) -> np.ndarray:
        """Sorted member array of the subgroup generated by ``gens``."""
        members = {self.identity}
        frontier = [self.identity]
        gens = [int(g) for g in gens]
        while frontier:
            nxt = []
            for a in frontier:
                for g in gens:
                    for b in (self.mul(a, g), self.mul(g, a)):
                        if b not in members:
                            members.add(b)
                            nxt.append(b)
            frontier = nxt
        return np.array(sorted(members), dtype=np.int32)

    def generating_set(self) -> list[int]:
        """A small generating set, found greedily in index order."""
        gens: list[int] = []
        span = {self.identity}
        for a in range(self.order):
            if a not in span:
                gens.append(a)
                span = set(int(x) for x in self.closure(gens))
                if len(span) == self.order:
                    break
        return gens

    def subgroup(self, members) -> "Subgroup":
        return Subgroup(self, members)

    def trivial_subgroup(self) -> "Subgroup":
        return Subgroup(self, [self.identity])

    def full_subgroup(self) -> "Subgroup":
        return Subgroup(self, np.arange(self.order))

    def center_members(self) -> np.ndarray:
        t = self.table
        central = (t == t.T).all(axis=1)
        return np.nonzero(central)[0].astype(np.int32)

    def commutator_members(self, amembers, bmembers) -> np.ndarray:
        """Subgroup generated by commutators [a, b], a in A, b in B."""
        comms = {self.comm(int(a), int(b)) for a in amembers for b in bmembers}
        return self.closure(comms)

    def lower_central_series(self) -> "NormalSeries":
        """G = L0 > L1 > ... with L_{k+1} = [G, L_k], ending at the trivial group.

        Raises if the group is not nilpotent (series stalls above {e}).
        """
        full = np.arange(self.order, dtype=np.int32)
        terms = [Subgroup(self, full)]
        current = full
        while len(current) > 1:
            nxt = self.commutator_members(full, current)
            if len(nxt) == len(current):
                raise StructureError(f"{self.name} is not nilpotent; lower central series stalls")
            terms.append(Subgroup(self, nxt))
            current = nxt
        return NormalSeries(self, terms)


class Subgroup:
    """A subgroup stored as a sorted member list plus a membership bitmap."""

    def __init__(self, parent: FiniteGroup, members, check: bool = True):
        self.parent = parent
        members = np.unique(np.asarray(members, dtype=np.int32))
        if members.size == 0:
            raise StructureError("subgroup cannot be empty")
        if members.min() < 0 or members.max() >= parent.order:
            raise StructureError("subgroup members out of range")
        self.members = members
        self.bitmap = np.zeros(parent.order, dtype=bool)
        self.bitmap[members] = True
        if check:
            self._check_closed()

    def _check_closed(self) -> None:
        g = self.parent
        if not self.bitmap[g.identity]:
            raise StructureError("subgroup must contain the identity")
        sub = g.table[np.ix_(self.members, self.members)]
        if not self.bitmap[sub].all():
            raise StructureError("member set not closed under multiplication")
        if not self.bitmap[g.inv_table[self.members]].all():
            raise StructureError("member set not closed under inversion")

    @property
    def order(self) -> int:
        return int(self.members.size)

    def __contains__(self, a: int) -> bool:
        return bool(self.bitmap[a])

    def contains_set(self, members) -> bool:
        return bool(self.bitmap[np.asarray(members, dtype=np.int32)].all())

    def is_subgroup_of(self, other: "Subgroup") -> bool:
        return other.contains_set(self.members)

    def as_group(self) -> tuple[FiniteGroup, "GroupHom"]:
        """The subgroup as a standalone group, with its inclusion hom."""
        g = self.parent
        pos = np.full(g.order, -1, dtype=np.int32)
        pos[self.members] = np.arange(self.order, dtype=np.int32)
        table = pos[g.table[np.ix_(self.members, self.members)]]
        labels = [g.label(int(a)) for a in self.members]
        sub = FiniteGroup(table, name=f"{g.name}|sub{self.order}", labels=labels, check=False)
        incl = GroupHom(sub, g, self.members.copy())
        return sub, incl

    def __repr__(self):
        return f"Subgroup(order={self.order} of {self.parent.name})"


def is_normal(g: FiniteGroup, h: Subgroup) -> bool:
    """True iff x H x^-1 = H for every x in G (exhaustive conjugation)."""
    if h.parent is not g:
        raise StructureError("subgroup belongs to a different group")
    conj = g.table[g.table[:, h.members], g.inv_table[:, None]]
    # conj[x, i] = x * h_i * x^-1
    return bool(h.bitmap[conj].all())


def normality_witness(g: FiniteGroup, h: Subgroup):
    """A conjugation (x, h, x h x^-1) escaping H, or None if H is normal."""
    for x in range(g.order):
        xi = g.inv(x)
        for m in h.members:
            c = g.mul(g.mul(x, int(m)), xi)
            if c not in h:
                return (x, int(m), c)
    return None


class GroupHom:
    """A homomorphism given by the image of every source element."""

    def __init__(self, source: FiniteGroup, target: FiniteGroup, image, check: bool = True):
        self.source = source
        self.target = target
        self.image = np.asarray(image, dtype=np.int32)
        if self.image.shape != (source.order,):
            raise StructureError("image map has wrong length")
        if check:
            self.check()

    def check(self) -> None:
        src, tgt, img = self.source, self.target, self.image
        if img[src.identity] != tgt.identity:
            raise StructureError("homomorphism does not preserve the identity")
        lhs = img[src.table]                      # f(a*b)
        rhs = tgt.table[img[:, None], img[None, :]]   # f(a)*f(b)
        if not np.array_equal(lhs, rhs):
            bad = np.argwhere(lhs != rhs)[0]
            raise StructureError(f"not multiplicative at pair {tuple(int(x) for x in bad)}")

    def __call__(self, a: int) -> int:
        return int(self.image[a])

    def compose(self, other: "GroupHom") -> "GroupHom":
        """self after other (other first)."""
        if other.target is not self.source:
            raise StructureError("homomorphisms do not compose")
        return GroupHom(other.source, self.target, self.image[other.image], check=False)

    @property
    def is_injective(self) -> bool:
        return len(set(self.image.tolist())) == self.source.order

    @property
    def is_surjective(self) -> bool:
        return len(set(self.image.tolist())) == self.target.order

    def kernel_members(self) -> np.ndarray:
        return np.nonzero(self.image == self.target.identity)[0].astype(np.int32)

    def image_members(self) -> np.ndarray:
        return np.unique(self.image)

    @staticmethod
    def identity_hom(g: FiniteGroup) -> "GroupHom":
        return GroupHom(g, g, np.arange(g.order, dtype=np.int32), check=False)

    def __repr__(self):
        return f"GroupHom({self.source.name} -> {self.target.name})"


class NormalSeries:
    """A descending chain G = H_0 >= H_1 >= ... >= H_N = {e}.

    Each H_{j+1} must be normal in H_j.  When every term is also normal
    in G itself the series is flagged ``normal`` (the default checks
    both; sheaf constructions require the normal variant).
    """

    def __init__(self, group: FiniteGroup, terms: list[Subgroup], check: bool = True):
        self.group = group
        self.terms = list(terms)
        if check:
            self._validate()
        self._normal_variant: bool | None = None

    @property
    def is_normal_variant(self) -> bool:
        if self._normal_variant is None:
            self._normal_variant = all(is_normal(self.group, h) for h in self.terms)
        return self._normal_variant

    def _validate(self) -> None:
        g = self.group
        if not self.terms:
            raise StructureError("series needs at least one term")
        if self.terms[0].order != g.order:
            raise StructureError("series must start at the full group")
        if self.terms[-1].order != 1:
            raise StructureError("series must end at the trivial subgroup")
        for j in range(len(self.terms) - 1):
            big, small = self.terms[j], self.terms[j + 1]
            if not small.is_subgroup_of(big):
                raise StructureError(f"term {j + 1} is not contained in term {j}")
            if not _normal_in(g, small, big):
                raise StructureError(f"term {j + 1} is not normal in term {j}")

    @property
    def length(self) -> int:
        return len(self.terms) - 1

    def term(self, j: int) -> Subgroup:
        """H_j, reading indices beyond the end as the trivial tail."""
        if j >= len(self.terms):
            return self.terms[-1]
        return self.terms[j]

    def __repr__(self):
        orders = [t.order for t in self.terms]
        return f"NormalSeries({self.group.name}: {orders})"


def _normal_in(g: FiniteGroup, small: Subgroup, big: Subgroup) -> bool:
    """small normal in big, both subgroups of g."""
    for x in big.members:
        xi = g.inv(int(x))
        row = g.table[g.table[int(x), small.members], xi]
        if not small.bitmap[row].all():
            return False
    return True


def quotient(g: FiniteGroup, n: Subgroup) -> tuple[FiniteGroup, GroupHom]:
    """The coset group G/N with its canonical projection.

    Coset representatives are the minimal element index in each coset,
    and cosets are numbered in representative order; this fixes a
    deterministic element ordering for every quotient.
    """
    if n.parent is not g:
        raise StructureError("subgroup belongs to a different group")
    witness = normality_witness(g, n)
    if witness is not None:
        x, h, c = witness
        raise StructureError(
            f"subgroup is not normal: {x}*{h}*{x}^-1 = {c} escapes the subgroup"
        )
    coset_min = np.full(g.order, -1, dtype=np.int32)
    for a in range(g.order):
        if coset_min[a] >= 0:
            continue
        coset = g.table[a, n.members]
        coset_min[coset] = min(int(x) for x in coset)
    reps = np.unique(coset_min)
    rep_index = {int(r): i for i, r in enumerate(reps)}
    proj = np.array([rep_index[int(coset_min[a])] for a in range(g.order)], dtype=np.int32)
    table = proj[g.table[np.ix_(reps, reps)]]
    q = FiniteGroup(table, name=f"{g.name}/N{n.order}", labels=[int(r) for r in reps], check=False)
    return q, GroupHom(g, q, proj, check=False)


def kernel_iso(g: FiniteGroup, h: Subgroup, hp: Subgroup) -> GroupHom:
    """The isomorphism H/H' -> ker{G/H' -> G/H} attached to a normal series.

    Requires H' <= H <= G with H' normal in H and in G, and H normal in
    G.  The returned hom has source H/H' and target G/H'; its image is
    exactly the kernel of the induced projection G/H' -> G/H, and it is
    injective.  Use :func:`verify_kernel_iso` for the full diagram audit.
    """
    if not hp.is_subgroup_of(h):
        raise StructureError("inner term must be contained in the middle term")
    if not is_normal(g, h):
        raise StructureError("middle term is not normal in the ambient group")
    if not is_normal(g, hp):
        raise StructureError("inner term is not normal in the ambient group")
    hgroup, hincl = h.as_group()
    hp_in_h = Subgroup(hgroup, np.searchsorted(h.members, hp.members))
    small_q, small_proj = quotient(hgroup, hp_in_h)
    big_q, big_proj = quotient(g, hp)
    # H/H' element -> pick any representative in H, push into G/H'
    image = np.empty(small_q.order, dtype=np.int32)
    for c in range(small_q.order):
        rep_in_h = int(np.nonzero(small_proj.image == c)[0][0])
        image[c] = big_proj(hincl(rep_in_h))
    hom = GroupHom(small_q, big_q, image)
    if not hom.is_injective:
        raise StructureError("induced map H/H' -> G/H' failed to be injective")
    return hom


def verify_kernel_iso(g: FiniteGroup, h: Subgroup, hp: Subgroup) -> GroupHom:
    """kernel_iso plus the exactness audit of the three-term sequence.

    Checks element-by-element that the image of H/H' -> G/H' equals the
    kernel of G/H' -> G/H, and that both triangles against the canonical
    projections commute.
    """
    hom = kernel_iso(g, h, hp)
    big_q, big_proj = quotient(g, hp)
    h_q, h_proj = quotient(g, h)
    induced = GroupHom(big_q, h_q, np.array(
        [h_proj(int(np.nonzero(big_proj.image == c)[0][0])) for c in range(big_q.order)],
        dtype=np.int32,
    ))
    kernel = set(int(x) for x in induced.kernel_members())
    image = set(int(x) for x in hom.image_members())
    if kernel != image:
        raise StructureError("image of H/H' -> G/H' is not the kernel of G/H' -> G/H")
    # commuting square: H -> H/H' -> G/H'  equals  H -> G -> G/H'
    hgroup, hincl = h.as_group()
    hp_in_h = Subgroup(hgroup, np.searchsorted(h.members, hp.members))
    _, small_proj = quotient(hgroup, hp_in_h)
    for a in range(hgroup.order):
        if hom(small_proj(a)) != big_proj(hincl(a)):
            raise StructureError("kernel isomorphism does not commute with the projections")
    return hom


def _quotient_is_abelian(g: FiniteGroup, big: Subgroup, small: Subgroup) -> bool:
    """big/small abelian  <=>  all commutators of big-members land in small."""
    for a in big.members:
        ai = g.inv(int(a))
        for b in big.members:
            c = g.table[g.table[g.table[int(a), int(b)], ai], g.inv(int(b))]
            if c not in small:
                return False
    return True


def aq_degree(series: NormalSeries) -> int:
    """Largest d with every quotient H_j/H_{j+i}, 1 <= i <= d, abelian.

    Indices past the end of the series read as the trivial tail, so the
    degree is capped by the series length.  Returns 0 when some
    single-step quotient is already nonabelian.
    """
    g = series.group
    n = series.length
    if n == 0:
        return 0
    d = 0
    while d < n:
        step = d + 1
        ok = all(
            _quotient_is_abelian(g, series.term(j), series.term(j + step))
            for j in range(n)
        )
        if not ok:
            break
        d = step
    return d


def central_witnesses(series: NormalSeries) -> dict[int, list[int]]:
    """For each j > 0, every k < j with H_j/H_{j+1} central in H_k/H_{j+1}.

    Centrality of the embedded quotient is the commutator condition
    [H_k, H_j] <= H_{j+1}, checked exhaustively.
    """
    g = series.group
    witnesses: dict[int, list[int]] = {}
    for j in range(1, series.length):
        hits = []
        for k in range(j):
            hk, hj, hj1 = series.term(k), series.term(j), series.term(j + 1)
            ok = True
            for x in hk.members:
                xi = g.inv(int(x))
                for y in hj.members:
                    c = g.table[g.table[g.table[int(x), int(y)], xi], g.inv(int(y))]
                    if c not in hj1:
                        ok = False
                        break
                if not ok:
                    break
            if ok:
                hits.append(k)
        witnesses[j] = hits
    return witnesses


@dataclass
class CentralityCertificate:
    central: bool
    witness: dict[int, int]          # smallest successful k per j
    all_witnesses: dict[int, list[int]]


def is_central_series(series: NormalSeries) -> CentralityCertificate:
    """Decide centrality of an AQ normal series and record witnesses.

    Requires the series to be AQ (degree >= 1).  The certificate keeps
    the smallest witness per index plus the full list, so downstream
    boundary maps can be audited for witness independence.
    """
    if aq_degree(series) < 1:
        raise StructureError("series is not AQ (some successive quotient is nonabelian)")
    witnesses = central_witnesses(series)
    smallest = {j: ks[0] for j, ks in witnesses.items() if ks}
    central = all(witnesses[j] for j in witnesses)
    return CentralityCertificate(central, smallest, witnesses)


# -- named constructions ----------------------------------------------------


def trivial_group() -> FiniteGroup:
    return FiniteGroup(np.zeros((1, 1), dtype=np.int32), name="1", check=False)


def cyclic(n: int) -> FiniteGroup:
    if n < 1:
        raise StructureError("cyclic group needs order >= 1")
    idx = np.arange(n)
    table = (idx[:, None] + idx[None, :]) % n
    return FiniteGroup(table, name=f"Z{n}", check=False)


def dihedral(n: int) -> FiniteGroup:
    """Dihedral group of order 2n: indices 0..n-1 rotations, n..2n-1 reflections."""
    if n < 1:
        raise StructureError("dihedral(n) needs n >= 1")
    order = 2 * n

    def mul(a, b):
        ra, fa = a % n, a // n
        rb, fb = b % n, b // n
        # (r^ra f^fa)(r^rb f^fb): f r = r^-1 f
        r = (ra + (rb if fa == 0 else -rb)) % n
        return r + n * ((fa + fb) % 2)

    table = np.array([[mul(a, b) for b in range(order)] for a in range(order)])
    return FiniteGroup(table, name=f"D{n}")


_Q8_LABELS = ["1", "-1", "i", "-i", "j", "-j", "k", "-k"]


def quaternion8() -> FiniteGroup:
    """The quaternion group on labels 1,-1,i,-i,j,-j,k,-k."""

    def mul(a, b):
        sa, ua = (1 if a % 2 == 0 else -1), a // 2
        sb, ub = (1 if b % 2 == 0 else -1), b // 2
        # units 0=1, 1=i, 2=j, 3=k
        prod = {
            (0, 0): (1, 0), (0, 1): (1, 1), (0, 2): (1, 2), (0, 3): (1, 3),
            (1, 0): (1, 1), (1, 1): (-1, 0), (1, 2): (1, 3), (1, 3): (-1, 2),
            (2, 0): (1, 2), (2, 1): (-1, 3), (2, 2): (-1, 0), (2, 3): (1, 1),
            (3, 0): (1, 3), (3, 1): (1, 2), (3, 2): (-1, 1), (3, 3): (-1, 0),
        }
        s, u = prod[(ua, ub)]
        s *= sa * sb
        return 2 * u + (0 if s == 1 else 1)

    table = np.array([[mul(a, b) for b in range(8)] for a in range(8)])
    return FiniteGroup(table, name="Q8", labels=_Q8_LABELS)


def heisenberg(p: int) -> FiniteGroup:
    """Upper unitriangular 3x3 matrices over F_p, order p^3.

    Element (a, b, c) is indexed a*p^2 + b*p + c; the product is
    (a+a', b+b', c+c'+a*b').
    """
    if p < 2:
        raise StructureError("heisenberg(p) needs p >= 2")
    n = p ** 3
    a, b, c = np.meshgrid(np.arange(p), np.arange(p), np.arange(p), indexing="ij")
    a, b, c = a.ravel(), b.ravel(), c.ravel()
    aa = (a[:, None] + a[None, :]) % p
    bb = (b[:, None] + b[None, :]) % p
    cc = (c[:, None] + c[None, :] + a[:, None] * b[None, :]) % p
    table = aa * p * p + bb * p + cc
    return FiniteGroup(table, name=f"Heis{p}")


def symmetric(n: int) -> FiniteGroup:
    """Symmetric group on n letters, permutations in lexicographic order."""
    if n < 1 or n > 6:
        raise StructureError("symmetric(n) supported for 1 <= n <= 6")
    perms = list(itertools.permutations(range(n)))
    index = {p: i for i, p in enumerate(perms)}
    order = len(perms)
    table = np.empty((order, order), dtype=np.int32)
    for i, p in enumerate(perms):
        for j, q in enumerate(perms):
            table[i, j] = index[tuple(p[q[k]] for k in range(n))]
    return FiniteGroup(table, name=f"S{n}", labels=perms, check=False)


def product(*groups: FiniteGroup) -> FiniteGroup:
    """Direct product with mixed-radix element indexing (last factor fastest)."""
    if not groups:
        raise StructureError("product of no groups")
    if len(groups) == 1:
        return groups[0]
    sizes = [g.order for g in groups]
    total = int(np.prod(sizes))
    digits = []
    rem = np.arange(total)
    for s in reversed(sizes):
        digits.append(rem % s)
        rem //= s
    digits.reverse()
    table = np.zeros((total, total), dtype=np.int64)
    weight = 1
    for g, d in zip(reversed(groups), reversed(digits)):
        table += weight * g.table[np.ix_(d, d)].astype(np.int64)
        weight *= g.order
    name = "x".join(g.name for g in groups)
    return FiniteGroup(table.astype(np.int32), name=name, check=False)
