"""Seed measured tracks: the once-punctured torus family, plus small fixture
builders used by tests and the fixture search."""

from __future__ import annotations

from fractions import Fraction

from .algebra import IntegerMatrix, pf_eigenpair
from .errors import NotPseudoAnosov
from .track import (
    LARGE,
    Measure,
    SMALL_LEFT,
    SMALL_RIGHT,
    TrainTrack,
    validate,
    validate_measure,
)

R_MATRIX = IntegerMatrix([[1, 1], [0, 1]])
L_MATRIX = IntegerMatrix([[1, 0], [1, 1]])


def word_matrix(word: str) -> IntegerMatrix:
    """Ordered product of the elementary nonnegative matrices for R and L."""
    acc = IntegerMatrix.identity(2)
    for ch in word:
        if ch == "R":
            acc = acc @ R_MATRIX
        elif ch == "L":
            acc = acc @ L_MATRIX
        else:
            raise NotPseudoAnosov(f"word letter {ch!r} is not R or L")
    return acc


def seed_punctured_torus(word: str):
    """Invariant measured track of the punctured-torus class of the word.

    The track is the standard 2-switch/3-branch track dual to the
    2-triangle ideal triangulation: a large "diagonal" branch d with the
    two smalls h and v at both switches.  The measure extends the exact
    Perron-Frobenius eigenvector of the word matrix by the switch
    conditions.  Single-letter (parabolic) words are rejected.
    """
    if not word or set(word) - {"R", "L"}:
        raise NotPseudoAnosov(f"word {word!r} must be over the letters R, L")
    if len(set(word)) < 2:
        raise NotPseudoAnosov(f"word {word!r} is not pseudo-Anosov (one letter)")
    m = word_matrix(word)
    lam, vec = pf_eigenpair(m)
    track = TrainTrack({
        "d": (("s0", LARGE), ("s1", LARGE)),
        "h": (("s0", SMALL_RIGHT), ("s1", SMALL_RIGHT)),
        "v": (("s0", SMALL_LEFT), ("s1", SMALL_LEFT)),
    })
    # the single complementary region is the punctured one
    region = track.regions()[0]
    track = track.with_punctures({region.darts[0]})
    field = lam.field
    weights = {"h": vec[0], "v": vec[1], "d": vec[0] + vec[1]}
    measure = Measure(field, weights)
    summary = validate(track)
    assert (summary.genus, summary.punctures) == (1, 1)
    validate_measure(track, measure)
    return track, measure


def torus_track_with_weights(field, h, v):
    """The standard punctured-torus track with explicit weights (testing)."""
    track, _ = seed_punctured_torus("RL")
    weights = {"h": field.element(h) if not hasattr(h, "field") else h,
               "v": field.element(v) if not hasattr(v, "field") else v}
    weights["d"] = weights["h"] + weights["v"]
    return track, Measure(field, weights)


def _octahedron_faces():
    """Faces of the octahedron, ccw viewed from outside.

    Vertices: 0=N, 1=S, 2=E, 3=F, 4=W, 5=B with E,F,W,B equatorial in
    counterclockwise order seen from N.
    """
    n, s, e, f, w, b = 0, 1, 2, 3, 4, 5
    return [(n, e, f), (n, f, w), (n, w, b), (n, b, e),
            (s, f, e), (s, w, f), (s, b, w), (s, e, b)]


def octahedral_tracks():
    """Valid filling tracks on S_{0,5} dual to the octahedral triangulation
    of the 6-punctured sphere, regions five punctured monogons + one
    unpunctured trigon.  Used to seed the fixture automaton.

    Each track comes from choosing a cusp corner in every dual triangle so
    that one vertex collects three cusps and the others one each; the
    trigon's region is left unpunctured.
    """
    faces = _octahedron_faces()
    edge_ids = {}

    def edge(xx, yy):
        key = tuple(sorted((xx, yy)))
        if key not in edge_ids:
            edge_ids[key] = f"e{len(edge_ids)}"
        return edge_ids[key]

    out = []
    import itertools

    for choice in itertools.product(range(3), repeat=8):
        counts = {}
        for fi, ci in zip(faces, choice):
            # cusp corner is the last vertex once the face is rotated
            # cusp-last; i.e. the chosen vertex itself
            counts[fi[ci]] = counts.get(fi[ci], 0) + 1
        profile = sorted(counts.get(vv, 0) for vv in range(6))
        if profile != [1, 1, 1, 1, 1, 3]:
            continue
        branches = {}
        ok = True
        for face_idx, (fi, ci) in enumerate(zip(faces, choice)):
            # rotate so the cusp vertex is last: sides ccw are then
            # (L, SR, SL) = (opposite edge, next, previous)
            x, y, z = fi[(ci + 1) % 3], fi[(ci + 2) % 3], fi[ci]
            sw = f"t{face_idx}"
            for slot, (p1, p2) in ((LARGE, (x, y)), (SMALL_RIGHT, (y, z)),
                                   (SMALL_LEFT, (z, x))):
                eid = edge(p1, p2)
                ends = branches.setdefault(eid, [])
                ends.append((sw, slot))
        for eid, ends in branches.items():
            if len(ends) != 2:
                ok = False
        if not ok:
            continue
        try:
            track = TrainTrack({eid: tuple(ends) for eid, ends in branches.items()})
            regs = track.regions()
        except Exception:
            continue
        # puncture the five 1-cusp regions, leave the trigon open
        if sorted(r.cusps for r in regs) != [1, 1, 1, 1, 1, 3]:
            continue
        darts = {r.darts[0] for r in regs if r.cusps == 1}
        track = track.with_punctures(darts)
        try:
            summary = validate(track)
        except Exception:
            continue
        if (summary.genus, summary.punctures) != (0, 5):
            continue
        # one-sided small branches are tolerated here: splits only ever
        # remove them, so these seeds still reach the clean recurrent part
        # of the splitting automaton
        out.append(track)
    return out
