"""Layered taut triangulations from periodic splitting sequences, the
converse extraction of folding data, and the harmonic fiber 2-cycle.

Corner bookkeeping uses the quadrilateral of the dual Whitehead move:
vertices (0,1,2,3) of the attached tetrahedron are the quad corners in
counterclockwise order, the bottom diagonal {0,2} is dual to the split
branch and the top diagonal {1,3} to the created branch.  With the two
bottom triangles written side-first as (e, a, b) at switch u and (e, d, c)
at switch w (slot order L, SR, SL), the corner identifications are

    0 = u.c0 = w.c2,  1 = u.c1,  2 = u.c2 = w.c0,  3 = w.c1,

and the two top faces are dual to the new switches with sides (c, a, e'),
(b, d, e') after a left split and (a, e', c), (d, e', b) after a right one.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field
from fractions import Fraction

from .errors import ClosingMismatch, DegenerateSystem, TautError, VeeringRequired
from .moves import MoveRecord, PeriodicityCertificate, SplittingSequence, canonical_key
from .taut import (
    IN,
    OUT,
    STANDARD_COOR,
    Tet,
    TautTriangulation3,
    _FACE_TRIPLE,
    _FACE_VERTICES,
    perm_inverse,
)
from .track import LARGE, SLOTS, SMALL_LEFT, SMALL_RIGHT, TrainTrack

# face-vertex -> corner maps for the four slots of the attached tetrahedron
_CMAP_BOTTOM_U = {0: 0, 1: 1, 2: 2}          # face 3 onto the u triangle
_CMAP_BOTTOM_W = {0: 2, 2: 0, 3: 1}          # face 1 onto the w triangle
_CMAP_TOP = {
    "split-left": ({0: 0, 1: 1, 3: 2},       # face 2: new u triangle
                   {2: 0, 3: 1, 1: 2}),      # face 0: new w triangle
    "split-right": ({1: 0, 3: 1, 0: 2},
                    {3: 0, 1: 1, 2: 2}),
}
_SIDES_TOP = {
    "split-left": (lambda a, b, c, d, ep: (c, a, ep),
                   lambda a, b, c, d, ep: (b, d, ep)),
    "split-right": (lambda a, b, c, d, ep: (a, ep, c),
                    lambda a, b, c, d, ep: (d, ep, b)),
}


@dataclass
class TriRecord:
    token: int
    switch: str
    sides: tuple
    created_step: int
    destroyed_step: int | None = None
    below: tuple | None = None   # (tet, face, cmap): top face of the tet below
    cover: tuple | None = None   # (tet, face, cmap): bottom face of the tet above


@dataclass
class LayeredStructure:
    steps: int
    snapshots: tuple      # m+1 dicts: switch id -> token
    tris: dict            # token -> TriRecord
    step_tets: tuple      # per step: tuple of (tet index, MoveRecord)
    iso_switch: dict
    iso_branch: dict
    start_index: int      # index of the first period state in the sequence


class _Builder:
    def __init__(self):
        self.tets = []

    def new_tet(self):
        self.tets.append([None] * 4)
        return len(self.tets) - 1

    def glue(self, slot_a, slot_b):
        """Glue two face slots whose cmaps land in corner-matched triangles."""
        ta, fa, ca = slot_a
        tb, fb, cb = slot_b
        inv_cb = {corner: v for v, corner in cb.items()}
        perm = [None] * 4
        for v, corner in ca.items():
            perm[v] = inv_cb[corner]
        perm[fa] = fb
        perm = tuple(perm)
        if self.tets[ta][fa] is not None or self.tets[tb][fb] is not None:
            raise TautError("face slot glued twice")
        self.tets[ta][fa] = (tb, perm)
        self.tets[tb][fb] = (ta, perm_inverse(perm))

    def finish(self):
        return TautTriangulation3([Tet(nbr=list(n), coor=STANDARD_COOR)
                                   for n in self.tets])


def build_layered(seq: SplittingSequence, cert: PeriodicityCertificate):
    """Layered taut triangulation of the punctured mapping torus.

    One taut tetrahedron per split of one period, attached across the dual
    Whitehead move; the final layer is glued to the first through the
    certificate isomorphism.  Returns (TautTriangulation3, LayeredStructure).
    """
    n, m = cert.n, cert.m
    start_track = seq.states[n][0]
    builder = _Builder()
    tris = {}
    live = {}
    next_token = 0
    for sw in start_track.switches:
        sides = tuple(start_track.branch_at(sw, slot) for slot in SLOTS)
        tris[next_token] = TriRecord(next_token, sw, sides, created_step=0)
        live[sw] = next_token
        next_token += 1
    start_token = dict(live)
    snapshots = [dict(live)]
    step_tets = []
    for k in range(m):
        batch = seq.batches[n + k]
        attached = []
        for rec in batch:
            if rec.kind not in ("split-left", "split-right"):
                raise TautError(f"unexpected move {rec.kind} in batch")
            a, b, c, d = (end[0] for end in rec.ends)
            x = tris[live[rec.u]]
            y = tris[live[rec.w]]
            if x.sides != (rec.branch, a, b) or y.sides != (rec.branch, d, c):
                raise TautError("surface state disagrees with the move record")
            tet = builder.new_tet()
            for tri, face, cmap in ((x, 3, _CMAP_BOTTOM_U), (y, 1, _CMAP_BOTTOM_W)):
                tri.cover = (tet, face, dict(cmap))
                tri.destroyed_step = k
                if tri.below is not None:
                    builder.glue((tet, face, cmap), tri.below)
            cm_u, cm_w = _CMAP_TOP[rec.kind]
            mk_u, mk_w = _SIDES_TOP[rec.kind]
            for sw, face, cmap, sides in (
                    (rec.u, 2, cm_u, mk_u(a, b, c, d, rec.created)),
                    (rec.w, 0, cm_w, mk_w(a, b, c, d, rec.created))):
                tri = TriRecord(next_token, sw, sides, created_step=k + 1,
                                below=(tet, face, dict(cmap)))
                tris[next_token] = tri
                live[sw] = next_token
                next_token += 1
            attached.append((tet, rec))
        snapshots.append(dict(live))
        step_tets.append(tuple(attached))
    # Close through the certificate isomorphism.  The layer-m triangle over
    # switch iso(x) is identified corner-for-corner with the layer-0
    # triangle over x; a triangle that survives the whole period uncovered
    # passes through this identification into the next period, so the face
    # below a covered initial triangle is found by descending the orbit of
    # the isomorphism until a tetrahedron top face appears (one must, since
    # every branch is eventually split).
    bound = len(start_track.switches) + 1

    def resolve_below(sw):
        x = sw
        for _ in range(bound):
            y = cert.iso_switch[x]
            t0x = tris[start_token[x]]
            tri_m = tris[live[y]]
            expected = tuple(cert.iso_branch[br] for br in t0x.sides)
            if tri_m.sides != expected:
                raise ClosingMismatch(
                    f"layer-{m} triangle {tri_m.sides} over {y} != "
                    f"isomorphic image {expected}")
            if tri_m.below is not None:
                return tri_m.below
            if live[y] != start_token[y]:
                raise TautError("uncovered layer-m triangle is not initial")
            x = y
        raise ClosingMismatch("an isomorphism orbit is never covered")

    def resolve_cover(sw):
        iso_inv = {v: k for k, v in cert.iso_switch.items()}
        z = sw
        for _ in range(bound):
            z = iso_inv[z]
            t0z = tris[start_token[z]]
            if t0z.cover is not None:
                return t0z.cover
        raise ClosingMismatch("an isomorphism orbit is never covered")

    for sw in start_track.switches:
        t0 = tris[start_token[sw]]
        if t0.cover is not None:
            builder.glue(resolve_below(sw), t0.cover)
    for sw in start_track.switches:
        t0 = tris[start_token[sw]]
        if t0.cover is None:  # survivor: record its resolved slots
            t0.cover = resolve_cover(sw)
            t0.below = resolve_below(sw)
        elif t0.below is None:
            t0.below = resolve_below(sw)
    for sw, token in live.items():
        tri = tris[token]
        if tri.cover is None:
            # final-layer triangle: covered through the closing by the
            # first period's tetrahedron over its orbit
            src = next(s for s in start_track.switches
                       if cert.iso_switch[s] == sw)
            tri.cover = tris[start_token[src]].cover
        if tri.destroyed_step is None:
            tri.destroyed_step = m
    tri3 = builder.finish()
    if len(tri3) != cert.splits:
        raise TautError("tetrahedron count differs from the period's splits")
    if not tri3.is_oriented():
        raise TautError("gluing permutations are not orientation-coherent")
    layering = LayeredStructure(
        steps=m, snapshots=tuple(snapshots), tris=tris,
        step_tets=tuple(step_tets),
        iso_switch=dict(cert.iso_switch), iso_branch=dict(cert.iso_branch),
        start_index=n)
    return tri3, layering


# -- converse: extract the folding data from a veering layered triangulation --


@dataclass
class ExtractedFolding:
    reading: str          # "stable" (against the coorientation) or "unstable"
    tracks: tuple         # one reconstructed track per layer, 0..steps
    switch_sides: tuple   # per layer: {switch token: large-side edge id}
    folds: tuple          # per step: tuple of (small branch, large branch)


def _front_slot(tri3, record):
    """The face slot the triangle's coorientation points into."""
    for slot in (record.cover, record.below):
        tet, face, _ = slot
        if tri3.tets[tet].coor[face] == IN:
            return slot
    raise TautError("no inward face above or below a layer triangle")


def _pi_edge_in_face(tri3, tet, face):
    for pair in tri3.pi_pairs(tet):
        if face not in pair:
            return pair
    raise TautError("face contains no pi edge")


def _side_between(cx, cy):
    """Side index of the triangle between two corner indices."""
    for s in range(3):
        if {(s - 1) % 3, s} == {cx, cy}:
            return s
    raise ValueError((cx, cy))


def extract_folding(tri3: TautTriangulation3, layering: LayeredStructure):
    """Recover per-triangle switches and the closed folding sequence.

    Each layer triangle is assigned the switch whose large slot is dual to
    the pi edge of the taut tetrahedron its coorientation points into, as
    dictated by requiring every tetrahedron's boundary tracks to realize a
    fold.  On the triangulation as built this reverses the generating
    splitting sequence; on its coorientation reversal it yields the
    opposite (unstable) folding cycle.
    """
    res = tri3.check_veering()
    if not res.ok:
        raise VeeringRequired(
            f"veering fails at {res.failed_edge}: {res.reason}")
    sample = layering.tris[layering.snapshots[0][
        next(iter(layering.snapshots[0]))]]
    reading = "stable" if _front_slot(tri3, sample) == sample.cover else "unstable"
    tracks = []
    assignments = []
    for k in range(layering.steps + 1):
        snap = layering.snapshots[k]
        branches = {}
        large_sides = {}
        for sw, token in sorted(snap.items()):
            rec = layering.tris[token]
            tet, face, cmap = _front_slot(tri3, rec)
            pe = _pi_edge_in_face(tri3, tet, face)
            s_large = _side_between(cmap[pe[0]], cmap[pe[1]])
            large_sides[token] = rec.sides[s_large]
            rotated = rec.sides[s_large:] + rec.sides[:s_large]
            for slot, edge in zip(SLOTS, rotated):
                branches.setdefault(edge, []).append((f"t{token}", slot))
        for edge, ends in branches.items():
            if len(ends) != 2:
                raise TautError(f"layer edge {edge} has {len(ends)} sides")
        tracks.append(TrainTrack({e: tuple(v) for e, v in branches.items()}))
        assignments.append(large_sides)
    folds = []
    for k in range(layering.steps):
        step = tuple((rec.created, rec.branch) if reading == "stable"
                     else (rec.branch, rec.created)
                     for _tet, rec in layering.step_tets[k])
        folds.append(step)
    return ExtractedFolding(reading=reading, tracks=tuple(tracks),
                            switch_sides=tuple(assignments),
                            folds=tuple(folds))


# -- harmonic fiber 2-cycle -----------------------------------------------------


@dataclass
class FiberCycle:
    weights: dict          # face class index -> Fraction, not all zero
    face_classes: tuple    # ((tet, face), (tet, face)) per class
    pairing: Fraction      # intersection with a monotone dual loop
    positive: bool = True  # whether every weight is strictly positive
    rank_data: dict = dataclass_field(default_factory=dict)


def _edge_orientation_signs(tri3):
    """Edge class index and orientation sign per (tet, ordered increasing
    pair), transported around each orbit from its first corner."""
    info = {}
    orbits = tri3.edge_orbits()
    for idx, orbit in enumerate(orbits):
        for t, (a, b) in orbit:
            key = (t, (min(a, b), max(a, b)))
            sign = 1 if a < b else -1
            if key not in info:
                info[key] = (idx, sign)
    return info, len(orbits)


def fiber_cycle(tri3: TautTriangulation3, layering: LayeredStructure):
    """The canonical harmonic 2-cycle representing the fiber class.

    Solves, in exact rational arithmetic, for the unique cycle homologous
    to the layer-0 surface that has zero coorientation-signed weight sum on
    every tetrahedron (the dual 1-chain is a cycle).  All weights of a
    layered triangulation come out strictly positive.
    """
    pairs, lookup = tri3.face_classes()
    nf = len(pairs)
    nt = len(tri3)
    edge_info, ne = _edge_orientation_signs(tri3)

    def out_rep(ci):
        (t1, f1), (t2, f2) = pairs[ci]
        return (t1, f1) if tri3.tets[t1].coor[f1] == OUT else (t2, f2)

    # boundary of each face class, as edge-class incidence rows
    d2 = [[Fraction(0)] * nf for _ in range(ne)]
    for ci in range(nf):
        t, f = out_rep(ci)
        x, y, z = _FACE_TRIPLE[f]
        for (p, q), s in (((y, z), 1), ((x, z), -1), ((x, y), 1)):
            key = (t, (min(p, q), max(p, q)))
            idx, base = edge_info[key]
            orient = 1 if p < q else -1
            d2[idx][ci] += s * base * orient
    # tetrahedron boundaries: +1 on outward faces, -1 on inward
    d3 = [[Fraction(0)] * nt for _ in range(nf)]
    for ti in range(nt):
        for f in range(4):
            ci = lookup[(ti, f)]
            d3[ci][ti] += 1 if tri3.tets[ti].coor[f] == OUT else -1
    for ti in range(nt):  # boundary of a boundary vanishes
        for ei in range(ne):
            val = sum(d2[ei][ci] * d3[ci][ti] for ci in range(nf))
            if val != 0:
                raise TautError("d2 . d3 != 0; orientation conventions broken")
    # layer-0 surface as a 2-chain
    chain = [Fraction(0)] * nf
    snap0 = layering.snapshots[0]
    for sw, token in snap0.items():
        tet, face, _ = layering.tris[token].cover
        chain[lookup[(tet, face)]] += 1
    for ei in range(ne):
        if sum(d2[ei][ci] * chain[ci] for ci in range(nf)) != 0:
            raise TautError("layer-0 chain is not a cycle")
    # harmonic projection: w = chain + d3 x with d3^T w = 0
    gram = [[sum(d3[ci][i] * d3[ci][j] for ci in range(nf))
             for j in range(nt)] for i in range(nt)]
    rhs = [-sum(d3[ci][i] * chain[ci] for ci in range(nf)) for i in range(nt)]
    x, rank = _solve_consistent(gram, rhs)
    kernel_dim = nt - rank
    ones_in_kernel = all(
        sum(d3[ci][ti] for ti in range(nt)) == 0 for ci in range(nf))
    if kernel_dim != 1 or not ones_in_kernel:
        raise DegenerateSystem(
            "fiber system rank unexpected",
            rank_data={"gram_rank": rank, "tets": nt,
                       "kernel_dim": kernel_dim,
                       "ones_in_kernel": ones_in_kernel})
    w = [chain[ci] + sum(d3[ci][ti] * x[ti] for ti in range(nt))
         for ci in range(nf)]
    for ei in range(ne):
        assert sum(d2[ei][ci] * w[ci] for ci in range(nf)) == 0
    for ti in range(nt):
        assert sum(d3[ci][ti] * w[ci] for ci in range(nf)) == 0
    if all(v == 0 for v in w):
        raise DegenerateSystem("harmonic fiber cycle vanishes")
    # The representative can carry a negative weight on a face whose
    # isomorphism orbit survives whole periods (e.g. the 6-tetrahedron
    # example); the class is still pinned down by its pairings, which are
    # positive integers on every monotone dual loop.
    pairing = _monotone_loop_pairing(tri3, lookup, w)
    if pairing <= 0 or pairing.denominator != 1:
        raise DegenerateSystem("fiber pairing with the flow is not a "
                               "positive integer",
                               rank_data={"pairing": str(pairing)})
    return FiberCycle(weights={ci: w[ci] for ci in range(nf)},
                      face_classes=tuple(pairs), pairing=pairing,
                      positive=all(v > 0 for v in w),
                      rank_data={"gram_rank": rank, "face_classes": nf,
                                 "edge_classes": ne})


def _monotone_loop_pairing(tri3, lookup, w):
    """Sum of cycle weights along a loop that always exits upward."""
    start = 0
    seen = {}
    path = []  # face classes crossed
    t = start
    while t not in seen:
        seen[t] = len(path)
        f = min(f for f in range(4) if tri3.tets[t].coor[f] == OUT)
        path.append(lookup[(t, f)])
        t = tri3.tets[t].nbr[f][0]
    return sum(w[ci] for ci in path[seen[t]:])


def _solve_consistent(a, b):
    """Solve a x = b over the rationals, free variables set to zero.

    Returns (x, rank); raises on inconsistency.
    """
    n = len(a)
    m = len(a[0]) if a else 0
    rows = [list(map(Fraction, a[i])) + [Fraction(b[i])] for i in range(n)]
    piv_cols = []
    r = 0
    for c in range(m):
        piv = next((i for i in range(r, n) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [v * inv for v in rows[r]]
        for i in range(n):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [v - f * pv for v, pv in zip(rows[i], rows[r])]
        piv_cols.append(c)
        r += 1
        if r == n:
            break
    for i in range(r, n):
        if rows[i][m] != 0:
            raise DegenerateSystem("inconsistent linear system")
    x = [Fraction(0)] * m
    for i, c in enumerate(piv_cols):
        x[c] = rows[i][m]
    return x, len(piv_cols)
