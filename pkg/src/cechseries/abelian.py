"""Exact abelian-group linear algebra.

Finite abelian groups are presented as Z^r / diag(m_1..m_r); maps
between them are integer matrices acting on coordinates.  Smith normal
form over Z (arbitrary-precision Python ints, no overflow) drives the
structure computations: decomposing a Cayley-table group into cyclic
factors, kernels/images of coordinate maps, and the cohomology of a
bounded complex of finite abelian groups.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import StructureError

IntMatrix = list[list[int]]


def _identity(n: int) -> IntMatrix:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def _matmul(a: IntMatrix, b: IntMatrix) -> IntMatrix:
    rows, inner, cols = len(a), len(b), len(b[0]) if b else 0
    out = [[0] * cols for _ in range(rows)]
    for i in range(rows):
        ai = a[i]
        for k in range(inner):
            c = ai[k]
            if c:
                bk = b[k]
                oi = out[i]
                for j in range(cols):
                    oi[j] += c * bk[j]
    return out


def smith_normal_form(mat) -> tuple[IntMatrix, IntMatrix, IntMatrix, IntMatrix, IntMatrix]:
    """Return (d, u, ui, v, vi) with u*mat*v = d diagonal, u*ui = vi*v = I.

    Diagonal entries are nonnegative and satisfy the divisibility chain
    d[0] | d[1] | ... .  All matrices are dense lists of Python ints.
    """
    a = [[int(x) for x in row] for row in mat]
    m = len(a)
    n = len(a[0]) if m else 0
    u, ui = _identity(m), _identity(m)
    v, vi = _identity(n), _identity(n)

    def row_swap(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]
        for r in range(m):
            ui[r][i], ui[r][j] = ui[r][j], ui[r][i]

    def row_add(i, j, c):
        # row_i += c * row_j
        for k in range(n):
            a[i][k] += c * a[j][k]
        for k in range(m):
            u[i][k] += c * u[j][k]
        for r in range(m):
            ui[r][j] -= c * ui[r][i]

    def row_neg(i):
        for k in range(n):
            a[i][k] = -a[i][k]
        for k in range(m):
            u[i][k] = -u[i][k]
        for r in range(m):
            ui[r][i] = -ui[r][i]

    def col_swap(i, j):
        for r in range(m):
            a[r][i], a[r][j] = a[r][j], a[r][i]
        for r in range(n):
            v[r][i], v[r][j] = v[r][j], v[r][i]
        vi[i], vi[j] = vi[j], vi[i]

    def col_add(j, i, c):
        # col_j += c * col_i
        for r in range(m):
            a[r][j] += c * a[r][i]
        for r in range(n):
            v[r][j] += c * v[r][i]
        for k in range(n):
            vi[i][k] -= c * vi[j][k]

    def col_neg(j):
        for r in range(m):
            a[r][j] = -a[r][j]
        for r in range(n):
            v[r][j] = -v[r][j]
        for k in range(n):
            vi[j][k] = -vi[j][k]

    t = 0
    while t < min(m, n):
        # find the minimal-magnitude nonzero entry in the trailing block
        pivot = None
        best = None
        for i in range(t, m):
            for j in range(t, n):
                x = abs(a[i][j])
                if x and (best is None or x < best):
                    best, pivot = x, (i, j)
        if pivot is None:
            break
        pi, pj = pivot
        if pi != t:
            row_swap(t, pi)
        if pj != t:
            col_swap(t, pj)
        if a[t][t] < 0:
            row_neg(t)
        # clear row and column t
        dirty = False
        for i in range(t + 1, m):
            if a[i][t]:
                q = a[i][t] // a[t][t]
                row_add(i, t, -q)
                if a[i][t]:
                    dirty = True
        for j in range(t + 1, n):
            if a[t][j]:
                q = a[t][j] // a[t][t]
                col_add(j, t, -q)
                if a[t][j]:
                    dirty = True
        if dirty:
            continue
        # enforce divisibility: pivot must divide the remaining block
        offender = None
        for i in range(t + 1, m):
            for j in range(t + 1, n):
                if a[i][j] % a[t][t]:
                    offender = i
                    break
            if offender is not None:
                break
        if offender is not None:
            row_add(t, offender, 1)
            continue
        t += 1
    return a, u, ui, v, vi


def _solve_integer(mat: IntMatrix, rhs_cols: IntMatrix) -> IntMatrix:
    """Solve mat * X = rhs over Z; raises if no integral solution exists.

    rhs is given column-wise transposed as a list of columns.
    """
    d, u, _ui, v, _vi = smith_normal_form(mat)
    m = len(mat)
    n = len(mat[0]) if m else 0
    cols_out = []
    for col in rhs_cols:
        b = [sum(u[i][k] * col[k] for k in range(m)) for i in range(m)]
        y = [0] * n
        for i in range(min(m, n)):
            di = d[i][i]
            if di:
                if b[i] % di:
                    raise StructureError("no integral solution")
                y[i] = b[i] // di
            elif b[i]:
                raise StructureError("no integral solution")
        for i in range(n, m):
            if b[i]:
                raise StructureError("no integral solution")
        x = [sum(v[i][k] * y[k] for k in range(n)) for i in range(n)]
        cols_out.append(x)
    return cols_out


def integer_kernel_basis(mat: IntMatrix) -> list[list[int]]:
    """Columns spanning the integer kernel lattice of mat."""
    if not mat or not mat[0]:
        n = len(mat[0]) if mat else 0
        return [[1 if i == j else 0 for i in range(n)] for j in range(n)]
    d, _u, _ui, v, _vi = smith_normal_form(mat)
    m, n = len(mat), len(mat[0])
    rank = sum(1 for i in range(min(m, n)) if d[i][i])
    return [[v[i][j] for i in range(n)] for j in range(rank, n)]


def lattice_canonical_rep(vec, lattice_cols: list[list[int]], moduli) -> list[int]:
    """Canonical representative of vec + span(lattice_cols) modulo diag(moduli).

    Works by column-Hermite reduction of [lattice_cols | diag(moduli)]:
    rows are processed top to bottom, the residue at each pivot row is
    reduced into [0, pivot).  The result is the unique such
    representative; over prime moduli it is the lexicographically
    minimal member of the orbit.
    """
    r = len(moduli)
    gens = [list(c) for c in lattice_cols]
    for i, mod in enumerate(moduli):
        col = [0] * r
        col[i] = int(mod)
        gens.append(col)
    vec = [int(x) % int(m) for x, m in zip(vec, moduli)]
    for row in range(r):
        live = [g for g in gens if any(g[row:])]
        # combine generators until a single one carries the gcd at this row
        pivot_gen = None
        rest = []
        for g in live:
            if g[row] == 0:
                rest.append(g)
            elif pivot_gen is None:
                pivot_gen = g
            else:
                # gcd step: reduce the pair until one entry at `row` is zero
                ga, gb = pivot_gen, g
                while gb[row]:
                    q = ga[row] // gb[row]
                    ga = [x - q * y for x, y in zip(ga, gb)]
                    ga, gb = gb, ga
                pivot_gen = ga
                rest.append(gb)
        if pivot_gen is None:
            continue
        if pivot_gen[row] < 0:
            pivot_gen = [-x for x in pivot_gen]
        q = vec[row] // pivot_gen[row]
        if q:
            vec = [x - q * y for x, y in zip(vec, pivot_gen)]
        gens = rest
    return [int(x % m) for x, m in zip(vec, moduli)]


@dataclass(frozen=True)
class AbelianStructure:
    """Coordinates for a finite abelian group: Z/m_1 x ... x Z/m_k.

    ``to_coords[a]`` is the coordinate vector of element a; ``from_coords``
    inverts it.  ``gen_elems`` are the elements realizing the unit vectors.
    """

    orders: tuple[int, ...]
    to_coords: np.ndarray          # (n, k) int64
    gen_elems: tuple[int, ...]
    _lookup: dict

    def from_coords(self, coords) -> int:
        key = tuple(int(c) % m for c, m in zip(coords, self.orders))
        return self._lookup[key]

    @property
    def rank(self) -> int:
        return len(self.orders)

    @property
    def order(self) -> int:
        n = 1
        for m in self.orders:
            n *= m
        return n

    def all_coords(self):
        """Iterate coordinate tuples in lexicographic order."""
        return np.ndindex(*self.orders) if self.orders else iter([()])


def abelian_structure(group) -> AbelianStructure:
    """Cyclic-factor coordinates for an abelian Cayley-table group."""
    if not group.is_abelian:
        raise StructureError(f"{group.name} is not abelian")
    n = group.order
    gens = group.generating_set()
    if not gens:       # trivial group
        coords = np.zeros((1, 0), dtype=np.int64)
        return AbelianStructure((), coords, (), {(): group.identity})
    r = len(gens)
    # BFS coordinates over the chosen generators
    word = {group.identity: tuple([0] * r)}
    frontier = [group.identity]
    while frontier:
        nxt = []
        for a in frontier:
            wa = word[a]
            for i, g in enumerate(gens):
                b = group.mul(a, g)
                if b not in word:
                    w = list(wa)
                    w[i] += 1
                    word[b] = tuple(w)
                    nxt.append(b)
        frontier = nxt
    if len(word) != n:
        raise StructureError("generating set failed to span the group")
    # relation lattice: order relations plus closure defects
    rels = []
    for i, g in enumerate(gens):
        col = [0] * r
        col[i] = group.element_order(g)
        rels.append(col)
    seen = set()
    for a in range(n):
        wa = word[a]
        for i, g in enumerate(gens):
            b = group.mul(a, g)
            rel = tuple(wa[j] + (1 if j == i else 0) - word[b][j] for j in range(r))
            if any(rel) and rel not in seen:
                seen.add(rel)
                rels.append(list(rel))
    relmat = [[rels[c][i] for c in range(len(rels))] for i in range(r)]
    d, u, ui, _v, _vi = smith_normal_form(relmat)
    diag = [d[i][i] for i in range(r)]
    if any(x == 0 for x in diag):
        raise StructureError("relation lattice is not full rank (infinite quotient?)")
    keep = [i for i in range(r) if diag[i] > 1]
    orders = tuple(diag[i] for i in keep)
    # y = U x are the new coordinates; generator j realises x = Ui e_j
    gen_elems = []
    for j in keep:
        e = group.identity
        for i, g in enumerate(gens):
            e = group.mul(e, group.power(g, ui[i][j]))
        gen_elems.append(e)
    to_coords = np.zeros((n, len(keep)), dtype=np.int64)
    lookup = {}
    for a in range(n):
        x = word[a]
        y = tuple(
            sum(u[i][k] * x[k] for k in range(r)) % diag[i]
            for i in keep
        )
        to_coords[a] = y
        lookup[y] = a
    if len(lookup) != n:
        raise StructureError("coordinate map failed to separate elements")
    expected = 1
    for m in orders:
        expected *= m
    if expected != n:
        raise StructureError("invariant factors do not multiply to the group order")
    return AbelianStructure(orders, to_coords, tuple(gen_elems), lookup)


def hom_matrix(hom, src_struct: AbelianStructure, tgt_struct: AbelianStructure) -> IntMatrix:
    """Integer matrix of a homomorphism in the chosen coordinates."""
    rows = tgt_struct.rank
    cols = src_struct.rank
    mat = [[0] * cols for _ in range(rows)]
    for j, g in enumerate(src_struct.gen_elems):
        img = hom(g)
        for i in range(rows):
            mat[i][j] = int(tgt_struct.to_coords[img][i])
    return mat


class CohomologyGroup:
    """ker(d_out)/im(d_in) for one slot of a complex of finite abelian groups.

    The slot's group is Z^r/diag(moduli); d_out and d_in are integer
    matrices.  Provides coordinates on the quotient, generator
    representatives, class reduction, and canonical (Hermite-reduced)
    cocycle representatives.
    """

    def __init__(self, moduli, d_out: IntMatrix | None, out_moduli,
                 d_in: IntMatrix | None, in_rank: int):
        self.moduli = [int(m) for m in moduli]
        r = len(self.moduli)
        if r == 0:
            self.orders = ()
            self.generators = []
            self._bcols = []
            self._kbasis = []
            self._uh = []
            self._keep = []
            self._full_diag = []
            return
        # cocycle lattice K = {x : d_out x == 0 mod out_moduli}
        if d_out is None or not out_moduli:
            kb_cols = [[1 if i == j else 0 for i in range(r)] for j in range(r)]
        else:
            stacked = [
                [d_out[i][j] for j in range(r)]
                + [int(out_moduli[i]) if k == i else 0 for k in range(len(out_moduli))]
                for i in range(len(out_moduli))
            ]
            kernel = integer_kernel_basis(stacked)
            kb_cols = [[c[i] for i in range(r)] for c in kernel]
            for i, m in enumerate(self.moduli):
                col = [0] * r
                col[i] = m
                kb_cols.append(col)
        # Hermite-like clean basis for K via SNF (full rank r)
        kmat = [[kb_cols[c][i] for c in range(len(kb_cols))] for i in range(r)]
        d, _u, ui, _v, _vi = smith_normal_form(kmat)
        if any(d[i][i] == 0 for i in range(r)):
            raise StructureError("cocycle lattice is not full rank")
        # basis K = Ui * diag(d): columns
        self._kbasis = [[ui[i][j] * d[j][j] for j in range(r)] for i in range(r)]
        # boundary lattice gens: d_in columns plus the slot moduli
        b_cols = []
        if d_in is not None:
            for j in range(in_rank):
                b_cols.append([d_in[i][j] for i in range(r)])
        for i, m in enumerate(self.moduli):
            col = [0] * r
            col[i] = m
            b_cols.append(col)
        self._bcols = b_cols
        # express boundaries in K-coordinates and quotient
        x = _solve_integer(self._kbasis, b_cols)
        xmat = [[x[c][i] for c in range(len(x))] for i in range(r)]
        dh, uh, uih, _vh, _vih = smith_normal_form(xmat)
        diag = [dh[i][i] for i in range(r)]
        if any(v == 0 for v in diag):
            raise StructureError("cohomology quotient is not finite")
        self._uh = uh
        keep = [i for i in range(r) if diag[i] > 1]
        self._keep = keep
        self.orders = tuple(diag[i] for i in keep)
        self._full_diag = diag
        # generator representatives: K-coords Uih e_j -> cochain vectors
        self.generators = []
        for j in keep:
            vec = [sum(self._kbasis[i][k] * uih[k][j] for k in range(r)) % self.moduli[i]
                   for i in range(r)]
            self.generators.append(vec)

    @property
    def rank(self) -> int:
        return len(self.orders)

    @property
    def order(self) -> int:
        n = 1
        for m in self.orders:
            n *= m
        return n

    def reduce(self, vec) -> tuple[int, ...]:
        """Class coordinates of a cocycle vector (errors if not a cocycle)."""
        if not self.moduli:
            return ()
        cols = _solve_integer(self._kbasis, [[int(x) for x in vec]])
        y = cols[0]
        r = len(self.moduli)
        full = [sum(self._uh[i][k] * y[k] for k in range(r)) % self._full_diag[i]
                for i in range(r)]
        return tuple(full[i] for i in self._keep)

    def rep(self, coords) -> list[int]:
        """An integer cochain vector representing the given class."""
        vec = [0] * len(self.moduli)
        for c, g in zip(coords, self.generators):
            if c:
                vec = [(x + int(c) * y) for x, y in zip(vec, g)]
        return [x % m for x, m in zip(vec, self.moduli)]

    def canonical_rep(self, vec) -> list[int]:
        """Hermite-canonical representative of vec's coboundary coset."""
        return lattice_canonical_rep(vec, self._bcols, self.moduli)

    def is_zero(self, vec) -> bool:
        return all(c == 0 for c in self.reduce(vec))

    def all_classes(self):
        """Iterate class coordinate tuples in lexicographic order."""
        return np.ndindex(*self.orders) if self.orders else iter([()])
