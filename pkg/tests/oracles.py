"""Slow, independent reference implementations used as test oracles.

Everything here works on plain dicts and explicit loops, no shared code
with the package's kernel or linear-algebra paths.
"""

from __future__ import annotations

import itertools


def brute_is_normal(group, members) -> bool:
    mset = set(int(m) for m in members)
    for x in range(group.order):
        xi = group.inv(x)
        for h in mset:
            if group.mul(group.mul(x, h), xi) not in mset:
                return False
    return True


def brute_quotient_abelian(group, big, small) -> bool:
    sset = set(int(m) for m in small)
    for a in big:
        for b in big:
            ab = group.mul(int(a), int(b))
            ba = group.mul(int(b), int(a))
            # aH bH == bH aH  <=>  (ba)^-1 (ab) in H
            if group.mul(group.inv(ba), ab) not in sset:
                return False
    return True


def brute_h1_partition(sheaf):
    """All degree-1 cocycles grouped into coboundary orbits.

    Returns a set of frozensets of value tuples.  Enumerates the full
    0-cochain group action, no generators, no encoding.
    """
    nerve = sheaf.nerve
    edges = nerve.faces(1)
    verts = nerve.vertices
    cocycles = []
    for values in itertools.product(*[range(sheaf.groups[e].order) for e in edges]):
        ok = True
        for tri in nerve.faces(2):
            i, j, k = tri
            g = sheaf.groups[tri]
            val = {e: values[edges.index(e)] for e in edges}
            a = sheaf.res((i, j), tri)(val[(i, j)])
            b = sheaf.res((j, k), tri)(val[(j, k)])
            c = sheaf.res((i, k), tri)(val[(i, k)])
            if g.mul(a, b) != c:
                ok = False
                break
        if ok:
            cocycles.append(values)
    cocycle_set = set(cocycles)
    orbits = []
    seen = set()
    for z in cocycles:
        if z in seen:
            continue
        orbit = set()
        for h in itertools.product(*[range(sheaf.groups[(v,)].order) for v in verts]):
            moved = []
            for pos, (a, b) in enumerate(edges):
                ge = sheaf.groups[(a, b)]
                ha = sheaf.res((a,), (a, b))(h[verts.index(a)])
                hb = sheaf.res((b,), (a, b))(h[verts.index(b)])
                moved.append(ge.mul(ge.mul(ha, z[pos]), ge.inv(hb)))
            moved = tuple(moved)
            assert moved in cocycle_set
            orbit.add(moved)
        seen |= orbit
        orbits.append(frozenset(orbit))
    return set(orbits)


def brute_h0_sections(sheaf):
    nerve = sheaf.nerve
    verts = nerve.vertices
    out = []
    for s in itertools.product(*[range(sheaf.groups[(v,)].order) for v in verts]):
        ok = True
        for (a, b) in nerve.faces(1):
            ra = sheaf.res((a,), (a, b))(s[verts.index(a)])
            rb = sheaf.res((b,), (a, b))(s[verts.index(b)])
            if ra != rb:
                ok = False
                break
        if ok:
            out.append(s)
    return out


def brute_h2_order(sheaf) -> int:
    """|H^2| for an abelian sheaf by direct counting: cocycles in C^2
    modulo the image of C^1 (orders only, exhaustive)."""
    nerve = sheaf.nerve
    edges = nerve.faces(1)
    tris = nerve.faces(2)
    tets = nerve.faces(3)

    def is_two_cocycle(values):
        for tet in tets:
            i, j, k, l = tet
            g = sheaf.groups[tet]
            total = g.identity
            for sign, tri in ((1, (j, k, l)), (-1, (i, k, l)), (1, (i, j, l)), (-1, (i, j, k))):
                x = sheaf.res(tri, tet)(values[tris.index(tri)])
                if sign < 0:
                    x = g.inv(x)
                total = g.mul(total, x)
            if total != g.identity:
                return False
        return True

    z2 = [v for v in itertools.product(*[range(sheaf.groups[t].order) for t in tris])
          if is_two_cocycle(v)]
    boundaries = set()
    for b in itertools.product(*[range(sheaf.groups[e].order) for e in edges]):
        img = []
        for tri in tris:
            i, j, k = tri
            g = sheaf.groups[tri]
            bij = sheaf.res((i, j), tri)(b[edges.index((i, j))])
            bjk = sheaf.res((j, k), tri)(b[edges.index((j, k))])
            bik = sheaf.res((i, k), tri)(b[edges.index((i, k))])
            img.append(g.mul(g.mul(bij, bjk), g.inv(bik)))
        boundaries.add(tuple(img))
    assert all(tuple(x) in set(map(tuple, z2)) for x in boundaries)
    return len(z2) // len(boundaries)
