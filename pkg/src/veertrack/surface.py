"""Ideal triangulations of punctured surfaces and the diagonal-exchange move.

Triangles carry their three edge labels in counterclockwise order.  An edge
may bound the same triangle twice (the once-punctured torus needs this); the
diagonal exchange requires two distinct triangles.
"""

from __future__ import annotations

from .errors import SelfAdjacentEdge, TrackError


class IdealTriangulation2:
    """triangles: mapping triangle id -> (e0, e1, e2) edge ids, ccw."""

    __slots__ = ("triangles", "edge_slots")

    def __init__(self, triangles):
        self.triangles = {t: tuple(sides) for t, sides in triangles.items()}
        slots = {}
        for t, sides in self.triangles.items():
            if len(sides) != 3:
                raise TrackError(f"triangle {t} must have 3 sides")
            for i, e in enumerate(sides):
                slots.setdefault(e, []).append((t, i))
        for e, ss in slots.items():
            if len(ss) != 2:
                raise TrackError(f"edge {e} bounds {len(ss)} triangle sides")
        self.edge_slots = {e: tuple(ss) for e, ss in slots.items()}

    @property
    def edges(self):
        return self.edge_slots.keys()

    def euler(self):
        return len(self.triangles) - len(self.edge_slots)

    def whitehead(self, edge, new_edge_id=None):
        """Diagonal exchange at an edge adjacent to two distinct triangles.

        With the two triangles rotated edge-first as (e, p, q) and (e, r, s),
        the replacements are (p, e', s) and (q, r, e'); all other labels
        persist.  The new diagonal keeps the old id unless one is supplied.
        """
        (t1, i1), (t2, i2) = self.edge_slots[edge]
        if t1 == t2:
            raise SelfAdjacentEdge(edge)
        new_id = edge if new_edge_id is None else new_edge_id
        if new_id != edge and new_id in self.edge_slots:
            raise TrackError(f"edge id {new_id} already in use")
        s1 = _rotate(self.triangles[t1], i1)
        s2 = _rotate(self.triangles[t2], i2)
        _, p, q = s1
        _, r, s = s2
        tris = dict(self.triangles)
        tris[t1] = (p, new_id, s)
        tris[t2] = (q, r, new_id)
        return IdealTriangulation2(tris)

    def canonical_key(self):
        """Lexicographic minimum over starts of a deterministic traversal;
        equal keys iff the triangulations are isomorphic."""
        best = None
        for t0 in self.triangles:
            for rot in range(3):
                key = self._traverse_key(t0, rot)
                if best is None or key < best:
                    best = key
        return best

    def _traverse_key(self, t0, rot):
        tri_label = {t0: 0}
        tri_rot = {t0: rot}
        edge_label = {}
        order = [t0]
        i = 0
        while i < len(order):
            t = order[i]
            sides = _rotate(self.triangles[t], tri_rot[t])
            for j, e in enumerate(sides):
                if e not in edge_label:
                    edge_label[e] = len(edge_label)
                (a, ia), (b, ib) = self.edge_slots[e]
                for (other, oi) in ((a, ia), (b, ib)):
                    if other not in tri_label:
                        tri_label[other] = len(tri_label)
                        # rotate the neighbour so the shared edge comes first
                        tri_rot[other] = oi
                        order.append(other)
            i += 1
        rows = []
        for t in order:
            sides = _rotate(self.triangles[t], tri_rot[t])
            rows.append(tuple(edge_label[e] for e in sides))
        return tuple(rows)

    def isomorphic(self, other) -> bool:
        return self.canonical_key() == other.canonical_key()

    def __repr__(self):
        return (f"IdealTriangulation2({len(self.triangles)} triangles, "
                f"{len(self.edge_slots)} edges)")


def _rotate(seq, k):
    return tuple(seq[k:]) + tuple(seq[:k])
