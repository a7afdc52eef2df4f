"""Taut ideal triangulations of 3-manifolds: the combinatorial model,
tautness and veering checks, coorientation reversal, conjugacy keys.

A tetrahedron is stored in a fixed flattened framing: its four ideal
vertices 0,1,2,3 are the corners of a quadrilateral in counterclockwise
order (seen along the coorientation), with diagonals {0,2} and {1,3}.
Faces are indexed by opposite vertex; gluings are vertex 4-permutations in
the usual convention (face f of t glues to face perm[f] of the neighbour).
Dihedral angles are pi on the two diagonals and 0 on the four sides of the
quadrilateral; the two faces on one side of the pinched quadrilateral point
in, the other two point out.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

from .errors import NotTaut, TautError

IN, OUT = "I", "O"

_FACE_VERTICES = {f: tuple(v for v in range(4) if v != f) for f in range(4)}

# boundary orientation of each face, read along its outward coorientation:
# faces 0, 2 point "up" in the standard framing, 1, 3 "down"
_FACE_TRIPLE = {0: (1, 2, 3), 1: (0, 3, 2), 2: (0, 1, 3), 3: (0, 2, 1)}

# moving past an equatorial edge, the opposite ideal vertex steps left or
# right around the circle at infinity; intrinsic to the framing
_LEFT_EDGES = (frozenset({0, 1}), frozenset({2, 3}))

STANDARD_COOR = (OUT, IN, OUT, IN)  # faces 0,2 above, 1,3 below


def perm_inverse(p):
    inv = [0] * 4
    for i, v in enumerate(p):
        inv[v] = i
    return tuple(inv)


def perm_compose(p, q):
    """(p o q)(x) = p[q[x]]."""
    return tuple(p[q[x]] for x in range(4))


def perm_parity(p):
    par = 0
    for i in range(4):
        for j in range(i + 1, 4):
            if p[i] > p[j]:
                par ^= 1
    return par  # 0 even, 1 odd


@dataclass
class Tet:
    nbr: list          # per face: (tet index, perm) or None while building
    coor: tuple = STANDARD_COOR


class TautTriangulation3:
    """Glued taut tetrahedra; every face slot paired."""

    def __init__(self, tets, check=True):
        self.tets = tets
        if check:
            self._check_structure()

    def _check_structure(self):
        for ti, t in enumerate(self.tets):
            if len(t.nbr) != 4:
                raise TautError(f"tet {ti} has {len(t.nbr)} face slots")
            for f in range(4):
                if t.nbr[f] is None:
                    raise TautError(f"face {f} of tet {ti} is unglued")
                t2, p = t.nbr[f]
                b2, p2 = self.tets[t2].nbr[p[f]]
                if b2 != ti or perm_compose(p2, p) != (0, 1, 2, 3):
                    raise TautError(f"gluing at tet {ti} face {f} not involutive")

    def __len__(self):
        return len(self.tets)

    # -- derived classes --------------------------------------------------

    def angle(self, ti, edge):
        """0 or 1 (units of pi) at the given vertex-pair edge of a tet."""
        t = self.tets[ti]
        in_pair = frozenset(f for f in range(4) if t.coor[f] == IN)
        out_pair = frozenset(f for f in range(4) if t.coor[f] == OUT)
        e = frozenset(edge)
        if e == frozenset(range(4)) - in_pair or e == frozenset(range(4)) - out_pair:
            return 1
        return 0

    def edge_orbits(self):
        """Cyclic corner orbits around each edge class.

        Returns a list of orbits; each orbit is a list of (tet, (i, j))
        corners in cyclic order, with the ordered pair transporting a
        consistent orientation of the edge around the orbit.
        """
        seen = set()
        orbits = []
        for ti in range(len(self.tets)):
            for i in range(4):
                for j in range(i + 1, 4):
                    if (ti, frozenset((i, j))) in seen:
                        continue
                    orbit = []
                    faces = [f for f in range(4) if f not in (i, j)]
                    cur = (ti, i, j, faces[0])  # exit through faces[0]
                    while True:
                        t, a, b, fx = cur
                        orbit.append((t, (a, b)))
                        seen.add((t, frozenset((a, b))))
                        t2, p = self.tets[t].nbr[fx]
                        a2, b2, fe2 = p[a], p[b], p[fx]
                        fx2 = next(f for f in range(4)
                                   if f not in (a2, b2, fe2))
                        cur = (t2, a2, b2, fx2)
                        if (cur[0], frozenset((cur[1], cur[2]))) == (ti, frozenset((i, j))):
                            break
                    orbits.append(orbit)
        return orbits

    def edge_count(self):
        return len(self.edge_orbits())

    def vertex_orbits(self):
        """Ideal vertex classes (cusps)."""
        parent = {}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for ti in range(len(self.tets)):
            for v in range(4):
                parent[(ti, v)] = (ti, v)
        for ti, t in enumerate(self.tets):
            for f in range(4):
                t2, p = t.nbr[f]
                for v in range(4):
                    if v != f:
                        a, b = find((ti, v)), find((t2, p[v]))
                        if a != b:
                            parent[a] = b
        classes = {}
        for key in parent:
            classes.setdefault(find(key), []).append(key)
        return list(classes.values())

    def cusp_count(self):
        return len(self.vertex_orbits())

    def face_classes(self):
        """List of glued face pairs [((t, f), (t2, f2))], each pair once,
        plus a lookup dict (t, f) -> class index."""
        pairs = []
        lookup = {}
        for ti, t in enumerate(self.tets):
            for f in range(4):
                if (ti, f) in lookup:
                    continue
                t2, p = t.nbr[f]
                idx = len(pairs)
                pairs.append(((ti, f), (t2, p[f])))
                lookup[(ti, f)] = idx
                lookup[(t2, p[f])] = idx
        return pairs, lookup

    def is_oriented(self):
        return all(perm_parity(t.nbr[f][1]) == 1
                   for t in self.tets for f in range(4))

    # -- the taut conditions ------------------------------------------------

    def check_taut(self):
        """List of violations; empty means taut."""
        violations = []
        for ti, t in enumerate(self.tets):
            ins = sum(1 for f in range(4) if t.coor[f] == IN)
            if ins != 2:
                violations.append(("tet", ti, f"{ins} inward faces, need 2"))
        for ti, t in enumerate(self.tets):
            for f in range(4):
                t2, p = t.nbr[f]
                if t.coor[f] == self.tets[t2].coor[p[f]]:
                    violations.append(
                        ("face", (ti, f), "coorientation agrees on both sides"))
        for orbit in self.edge_orbits():
            total = sum(self.angle(t, e) for t, e in orbit)
            if total != 2:
                violations.append(
                    ("edge", tuple(orbit[0]), f"angle sum {total}*pi != 2*pi"))
        return violations

    def check_veering(self):
        """Classify every edge left or right; see VeeringResult."""
        taut_violations = self.check_taut()
        if taut_violations:
            raise NotTaut(f"not taut: {taut_violations[:3]}")
        colors = {}
        for orbit in self.edge_orbits():
            key = (orbit[0][0], tuple(sorted(orbit[0][1])))
            angles = [self.angle(t, e) for t, e in orbit]
            pi_pos = [k for k, a in enumerate(angles) if a == 1]
            k0, k1 = pi_pos
            fan_a = (k1 - k0 - 1) % len(orbit)
            fan_b = (k0 - k1 - 1) % len(orbit)
            if fan_a == 0 or fan_b == 0:
                return VeeringResult(None, key, "an edge fan is empty (degree < 4)")
            dirs = set()
            for k, (t, e) in enumerate(orbit):
                if angles[k] == 0:
                    dirs.add("L" if frozenset(e) in _LEFT_EDGES else "R")
            if len(dirs) != 1:
                return VeeringResult(None, key, "mixed left/right moves at edge")
            colors[key] = dirs.pop()
        return VeeringResult(colors, None, None)

    def reverse(self):
        """Flip every coorientation; angles are unchanged."""
        flip = {IN: OUT, OUT: IN}
        tets = [Tet(nbr=[t.nbr[f] for f in range(4)],
                    coor=tuple(flip[c] for c in t.coor))
                for t in self.tets]
        return TautTriangulation3(tets)

    def pi_pairs(self, ti):
        t = self.tets[ti]
        in_pair = frozenset(f for f in range(4) if t.coor[f] == IN)
        out_pair = frozenset(range(4)) - in_pair
        return (tuple(sorted(frozenset(range(4)) - in_pair)),
                tuple(sorted(frozenset(range(4)) - out_pair)))


@dataclass
class VeeringResult:
    colors: dict | None
    failed_edge: tuple | None
    reason: str | None

    @property
    def ok(self):
        return self.colors is not None


# -- canonical conjugacy keys ---------------------------------------------------

_EVEN_PERMS = tuple(
    p for p in [
        (a, b, c, d)
        for a in range(4) for b in range(4) for c in range(4) for d in range(4)
        if len({a, b, c, d}) == 4]
    if perm_parity(p) == 0)


def conjugacy_key(tri: TautTriangulation3, cycle=None):
    """Canonical form of (triangulation, coorientations, angles, 2-cycle).

    Lexicographic minimum over start tetrahedron and orientation-preserving
    start framing of a deterministic traversal serialization.  Equal keys
    are equivalent to the existence of a combinatorial equivalence
    preserving gluings, coorientations, angles, and the projectivized face
    weights.
    """
    res = tri.check_veering()
    if not res.ok:
        from .errors import VeeringRequired
        raise VeeringRequired(f"veering fails: {res.reason} at {res.failed_edge}")
    weights = None
    if cycle is not None:
        _, lookup = tri.face_classes()
        weights = {slot: cycle.weights[cls] for slot, cls in lookup.items()}
    best = None
    for t0 in range(len(tri.tets)):
        for p0 in _EVEN_PERMS:
            cand = _labelled_key(tri, t0, p0, weights)
            if best is None or cand < best:
                best = cand
    return best


def _labelled_key(tri, t0, p0, weights):
    vmap = {t0: p0}
    label = {t0: 0}
    order = [t0]
    i = 0
    rows = []
    ref_weight = None
    while i < len(order):
        t = order[i]
        vm = vmap[t]
        inv_vm = perm_inverse(vm)
        row = []
        for big_f in range(4):
            f = inv_vm[big_f]
            t2, p = tri.tets[t].nbr[f]
            if t2 not in label:
                label[t2] = len(label)
                vmap[t2] = perm_compose(vm, perm_inverse(p))
                order.append(t2)
            q = perm_compose(vmap[t2], perm_compose(p, inv_vm))
            entry = [label[t2], q, tri.tets[t].coor[f]]
            if weights is not None:
                wv = weights[(t, f)]
                if ref_weight is None and wv != 0:
                    ref_weight = wv
                rel = wv / ref_weight if ref_weight is not None else wv
                entry.append((rel.numerator, rel.denominator))
            row.append(tuple(entry))
        pis = tuple(sorted(
            tuple(sorted((vm[a], vm[b]))) for a, b in tri.pi_pairs(t)))
        rows.append((tuple(row), pis))
        i += 1
    if len(label) != len(tri.tets):
        raise TautError("triangulation is not connected")
    return tuple(rows)


def key_digest(key) -> str:
    return hashlib.sha256(repr(key).encode()).hexdigest()


def compare_conjugacy(key1, key2) -> bool:
    return key1 == key2
