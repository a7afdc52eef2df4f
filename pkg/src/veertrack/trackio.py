"""Text formats: measured-track files, sequence dumps, triangulation files.

Track file grammar (line oriented, '#' comments):

    surface auto
    field <minpoly int coeffs, lowest degree first> <root lo p/q> <root hi p/q>
    switch <id>
    branch <id> (<switch>,<slot>) (<switch>,<slot>)     slot in {L, SL, SR}
    puncture <region-index>
    weight <branch-id> <rational coeffs of the lambda-polynomial>

Region indices refer to the canonical region order (regions sorted by their
smallest dart).  Parsing then writing reproduces the file bit-exactly for
files produced by this module.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction

from .algebra import FieldElement, IntPolynomial, NumberField
from .errors import ParseError
from .track import Measure, SLOTS, TrainTrack

_ID = re.compile(r"^[A-Za-z0-9_.\-]+$")


def _fmt_fraction(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _parse_fraction(tok: str, line=None) -> Fraction:
    try:
        return Fraction(tok)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"bad rational {tok!r}", line)


def format_element(x: FieldElement) -> str:
    if x.is_zero():
        return "0"
    return " ".join(_fmt_fraction(c) for c in x.coeffs)


def format_element_compact(x: FieldElement) -> str:
    if x.is_zero():
        return "0"
    return ",".join(_fmt_fraction(c) for c in x.coeffs)


def write_track(track: TrainTrack, measure: Measure | None = None) -> str:
    lines = ["surface auto"]
    if measure is not None:
        f = measure.field
        lo, hi = f.interval()
        lines.append("field " + str(f.minpoly)
                     + f" {_fmt_fraction(lo)} {_fmt_fraction(hi)}")
    for sw in track.switches:
        if not _ID.match(str(sw)):
            raise ValueError(f"switch id {sw!r} not writable")
        lines.append(f"switch {sw}")
    for b in sorted(track.places):
        if not _ID.match(str(b)):
            raise ValueError(f"branch id {b!r} not writable")
        (s0, l0), (s1, l1) = track.places[b]
        lines.append(f"branch {b} ({s0},{l0}) ({s1},{l1})")
    for idx, region in enumerate(track.regions()):
        if region.punctured:
            lines.append(f"puncture {idx}")
    if measure is not None:
        for b in sorted(track.places):
            lines.append(f"weight {b} {format_element(measure[b])}")
    return "\n".join(lines) + "\n"


_BRANCH_RE = re.compile(
    r"^branch\s+(\S+)\s+\((\S+?),(L|SL|SR)\)\s+\((\S+?),(L|SL|SR)\)$")


def parse_track(text: str):
    """Returns (track, measure | None)."""
    field = None
    branches = {}
    declared_switches = []
    puncture_indices = []
    weights = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        head = tokens[0]
        if head in ("surface", "surface?"):
            continue
        if head == "field":
            if len(tokens) < 4:
                raise ParseError("field needs minpoly coeffs and an interval", lineno)
            try:
                coeffs = [int(t) for t in tokens[1:-2]]
            except ValueError:
                raise ParseError("bad minimal polynomial coefficients", lineno)
            lo = _parse_fraction(tokens[-2], lineno)
            hi = _parse_fraction(tokens[-1], lineno)
            try:
                field = NumberField(IntPolynomial(coeffs), lo, hi)
            except Exception as exc:
                raise ParseError(f"bad field descriptor: {exc}", lineno)
        elif head == "switch":
            if len(tokens) != 2:
                raise ParseError("switch takes one id", lineno)
            declared_switches.append(tokens[1])
        elif head == "branch":
            m = _BRANCH_RE.match(line)
            if not m:
                raise ParseError("bad branch line", lineno)
            b, s0, l0, s1, l1 = m.groups()
            if b in branches:
                raise ParseError(f"branch {b} declared twice", lineno)
            branches[b] = ((s0, l0), (s1, l1))
        elif head == "puncture":
            if len(tokens) != 2 or not tokens[1].isdigit():
                raise ParseError("puncture takes a region index", lineno)
            puncture_indices.append((int(tokens[1]), lineno))
        elif head == "weight":
            if len(tokens) < 3:
                raise ParseError("weight needs a branch id and coefficients", lineno)
            weights[tokens[1]] = ([_parse_fraction(t, lineno) for t in tokens[2:]],
                                  lineno)
        else:
            raise ParseError(f"unknown directive {head!r}", lineno)
    if not branches:
        raise ParseError("no branches declared")
    try:
        track = TrainTrack(branches)
    except Exception as exc:
        raise ParseError(f"invalid track: {exc}")
    missing = set(declared_switches) - set(track.switches)
    if missing:
        raise ParseError(f"declared switches never used: {sorted(missing)}")
    regions = track.regions()
    darts = set()
    for idx, lineno in puncture_indices:
        if idx >= len(regions):
            raise ParseError(f"region index {idx} out of range", lineno)
        darts.add(regions[idx].darts[0])
    track = track.with_punctures(darts)
    measure = None
    if weights:
        if field is None:
            raise ParseError("weight lines require a field line")
        vals = {}
        for b, (coeffs, lineno) in weights.items():
            if b not in track.places:
                raise ParseError(f"weight for unknown branch {b}", lineno)
            vals[b] = field.element(coeffs)
        missing = set(track.places) - set(vals)
        if missing:
            raise ParseError(f"branches without weights: {sorted(missing)}")
        measure = Measure(field, vals)
    return track, measure


# -- sequence dumps ------------------------------------------------------------


def write_sequence(seq, upto=None) -> str:
    """One line per step plus a certificate block when present."""
    out = []
    last = len(seq.batches) if upto is None else upto
    for i in range(last + 1):
        track, measure = seq.states[i]
        if i < len(seq.batches):
            batch = " ".join(
                f"{r.branch}:{r.kind.removeprefix('split-')}"
                for r in seq.batches[i])
        else:
            batch = "-"
        ws = " ".join(
            f"{b}:{format_element_compact(measure[b])}"
            for b in sorted(track.places))
        out.append(f"step {i} | batch {batch} | weights {ws}")
    cert = seq.certificate
    if cert is not None:
        iso = " ".join(f"{a}->{cert.iso_branch[a]}"
                       for a in sorted(cert.iso_branch))
        out.append(
            f"period n={cert.n} m={cert.m} "
            f"scale={format_element_compact(cert.scale)} iso={iso}")
    return "\n".join(out) + "\n"


# -- triangulation files ---------------------------------------------------------


def write_triangulation_text(tri3, coloring=None, cycle=None) -> str:
    lines = []
    for ti, t in enumerate(tri3.tets):
        nbrs = " ".join(str(t.nbr[f][0]) for f in range(4))
        perms = " ".join("".join(map(str, t.nbr[f][1])) for f in range(4))
        coor = "".join(t.coor)
        pis = ",".join("".join(map(str, pair)) for pair in tri3.pi_pairs(ti))
        lines.append(f"tet {ti} nbr {nbrs} perm {perms} coor {coor} pi {pis}")
    orbits = tri3.edge_orbits()
    for idx, orbit in enumerate(orbits):
        key = (orbit[0][0], tuple(sorted(orbit[0][1])))
        color = coloring.get(key, "?") if coloring else "?"
        lines.append(f"edge {idx} degree {len(orbit)} color {color}")
    if cycle is not None:
        for ci in sorted(cycle.weights):
            lines.append(f"face {ci} weight {_fmt_fraction(cycle.weights[ci])}")
    return "\n".join(lines) + "\n"


def triangulation_json(tri3, coloring=None, cycle=None) -> dict:
    tets = []
    for ti, t in enumerate(tri3.tets):
        tets.append({
            "neighbors": [t.nbr[f][0] for f in range(4)],
            "perms": [list(t.nbr[f][1]) for f in range(4)],
            "coor": "".join(t.coor),
            "pi": [list(p) for p in tri3.pi_pairs(ti)],
        })
    data = {"schema": "veertrack-triangulation/1", "tetrahedra": tets}
    if coloring is not None:
        orbits = tri3.edge_orbits()
        edges = []
        for idx, orbit in enumerate(orbits):
            key = (orbit[0][0], tuple(sorted(orbit[0][1])))
            edges.append({"index": idx, "degree": len(orbit),
                          "color": coloring.get(key)})
        data["edges"] = edges
    if cycle is not None:
        data["fiber"] = [{"face": ci, "weight": _fmt_fraction(w)}
                         for ci, w in sorted(cycle.weights.items())]
    return data


def parse_triangulation_json(data):
    """Rebuild a TautTriangulation3 (and fiber weights) from the JSON form."""
    from .taut import Tet, TautTriangulation3

    if data.get("schema") != "veertrack-triangulation/1":
        raise ParseError("not a veertrack triangulation file")
    tets = []
    for entry in data["tetrahedra"]:
        nbr = [(entry["neighbors"][f], tuple(entry["perms"][f]))
               for f in range(4)]
        tets.append(Tet(nbr=nbr, coor=tuple(entry["coor"])))
    tri3 = TautTriangulation3(tets)
    weights = None
    if "fiber" in data:
        weights = {item["face"]: Fraction(item["weight"])
                   for item in data["fiber"]}
    return tri3, weights


def dump_json(data) -> str:
    return json.dumps(data, indent=2, sort_keys=True) + "\n"
