"""End-to-end orchestration: seed or file to certified run, triangulation,
fiber cycle, conjugacy key, bounds, and the machine-readable run report."""

from __future__ import annotations

import time
from dataclasses import dataclass

from .algebra import minimal_polynomial
from .bounds import BoundReport, verify_inequality
from .errors import VeertrackError
from .layered import FiberCycle, build_layered, fiber_cycle
from .moves import (
    SplittingSequence,
    _traversal_key,
    canonical_form,
    make_certificate,
    run_sequence,
)
from .seeds import seed_punctured_torus
from .taut import TautTriangulation3, conjugacy_key, key_digest
from .track import validate
from .trackio import format_element, triangulation_json


@dataclass
class RunResult:
    input_kind: str
    word: str | None
    seq: SplittingSequence
    certificate: object
    surface: object
    tri3: TautTriangulation3
    layering: object
    coloring: dict
    cycle: FiberCycle
    key: object
    digest: str
    bounds: BoundReport
    iso_choices: int
    keys_agree: bool
    seconds: float


def certificate_isomorphisms(seq, cert):
    """All slot-preserving measured isomorphisms state n -> state n+m.

    They differ by automorphisms of the periodic measured track; each yields
    a closed triangulation, and the conjugacy keys are asserted equal.
    """
    n, m = cert.n, cert.m
    ti, mi = seq.states[n]
    punct = tuple(r.darts for r in ti.regions() if r.punctured)
    best = None
    labelings = []
    for s0 in ti.switches:
        k, swl, brl = _traversal_key(ti, mi, s0, punct)
        if best is None or k < best:
            best, labelings = k, [(swl, brl)]
        elif k == best:
            labelings.append((swl, brl))
    _, swj, brj = canonical_form(*seq.states[n + m])
    inv_swj = {v: s for s, v in swj.items()}
    inv_brj = {v: b for b, v in brj.items()}
    out = []
    for swl, brl in labelings:
        out.append(({s: inv_swj[swl[s]] for s in swl},
                    {b: inv_brj[brl[b]] for b in brl}))
    return out


def run_measured_track(track, measure, max_steps=10000, close_multiplier=1,
                       input_kind="file", word=None):
    """Run the whole pipeline on a valid measured track.

    close_multiplier closes the triangulation after that many minimal
    periods (a word u^k needs k periods of the primitive word u).
    """
    t0 = time.perf_counter()
    surface = validate(track)
    seq = run_sequence(track, measure, max_steps)
    if seq.certificate is None:
        raise VeertrackError(
            f"no periodicity within {max_steps} maximal splittings; "
            "the measure may not come from a pseudo-Anosov class")
    base = seq.certificate
    cert = base
    if close_multiplier != 1:
        need = base.n + close_multiplier * base.m
        if len(seq.states) - 1 < need:
            seq.extend(need - (len(seq.states) - 1))
        cert = make_certificate(seq, base.n, need)
    tri3, layering = build_layered(seq, cert)
    violations = tri3.check_taut()
    if violations:
        raise VeertrackError(f"layered triangulation is not taut: {violations}")
    res = tri3.check_veering()
    if not res.ok:
        raise VeertrackError(
            f"layered triangulation is not veering at {res.failed_edge}: "
            f"{res.reason}")
    cycle = fiber_cycle(tri3, layering)
    key = conjugacy_key(tri3, cycle)
    # alternate certificate isomorphisms must close up to the same key
    isos = certificate_isomorphisms(seq, cert)
    keys_agree = True
    import copy

    for iso_s, iso_b in isos:
        if iso_s == cert.iso_switch and iso_b == cert.iso_branch:
            continue
        alt = copy.copy(cert)
        alt.iso_switch, alt.iso_branch = iso_s, iso_b
        tri_alt, lay_alt = build_layered(seq, alt)
        key_alt = conjugacy_key(tri_alt, fiber_cycle(tri_alt, lay_alt))
        if key_alt != key:
            keys_agree = False
    period_surface = validate(seq.states[cert.n][0])
    bounds = verify_inequality(cert, period_surface.genus,
                               period_surface.punctures)
    return RunResult(
        input_kind=input_kind, word=word,
        seq=seq, certificate=cert, surface=surface,
        tri3=tri3, layering=layering, coloring=res.colors, cycle=cycle,
        key=key, digest=key_digest(key), bounds=bounds,
        iso_choices=len(isos), keys_agree=keys_agree,
        seconds=time.perf_counter() - t0)


def run_word(word: str, max_steps=10000):
    """Pipeline for a punctured-torus class given as an R/L word."""
    track, measure = seed_punctured_torus(word)
    probe = run_sequence(track, measure, max_steps)
    if probe.certificate is None:
        raise VeertrackError("no periodicity found for the word seed")
    splits = probe.certificate.splits
    if len(word) % splits != 0:
        raise VeertrackError(
            f"period splits {splits} do not divide word length {len(word)}")
    k = len(word) // splits
    return run_measured_track(track, measure, max_steps,
                              close_multiplier=k, input_kind="word", word=word)


def run_report(result: RunResult, include_key=False) -> dict:
    cert = result.certificate
    lam = cert.dilatation
    minpoly = minimal_polynomial(lam)
    field = lam.field
    lo, hi = field.interval()
    edge_orbits = result.tri3.edge_orbits()
    colors = []
    for idx, orbit in enumerate(edge_orbits):
        key = (orbit[0][0], tuple(sorted(orbit[0][1])))
        colors.append({"edge": idx, "degree": len(orbit),
                       "color": result.coloring[key]})
    report = {
        "schema": "veertrack-run-report/1",
        "input": {"kind": result.input_kind, "word": result.word},
        "field": {
            "minpoly": str(field.minpoly),
            "interval": [f"{lo.numerator}/{lo.denominator}",
                         f"{hi.numerator}/{hi.denominator}"],
        },
        "dilatation": {
            "minpoly": str(minpoly),
            "coeffs_in_field": format_element(lam),
            "decimal": lam.decimal(10),
            "scale_coeffs": format_element(cert.scale),
        },
        "period": {
            "preperiod": cert.n,
            "steps": cert.m,
            "splits": cert.splits,
        },
        "surface": {
            "genus": result.surface.genus,
            "punctures": result.surface.punctures,
            "branches": len(result.seq.states[0][0].places),
            "switches": len(result.seq.states[0][0].switches),
        },
        "triangulation": {
            "tetrahedra": len(result.tri3),
            "edge_classes": len(edge_orbits),
            "cusps": result.tri3.cusp_count(),
        },
        "veering": {"edges": colors},
        "fiber": {
            "weights": [f"{w.numerator}/{w.denominator}"
                        for _, w in sorted(result.cycle.weights.items())],
            "pairing": str(result.cycle.pairing),
            "positive": result.cycle.positive,
        },
        "conjugacy": {
            "digest": result.digest,
            "iso_choices": result.iso_choices,
            "keys_agree": result.keys_agree,
        },
        "bounds": {
            "branch_count": result.bounds.branch_count,
            "fold_count": result.bounds.fold_count,
            "inequality_margin": [
                f"{q.numerator}/{q.denominator}"
                for q in result.bounds.inequality_margin],
            "psi_exponent": str(result.bounds.psi_exponent),
            "entry_sums": list(result.bounds.entry_sums),
            "branch_bound": result.bounds.branch_bound,
            "branch_bound_tight": result.bounds.branch_bound_tight,
        },
        "timing": {"seconds": round(result.seconds, 4)},
    }
    if include_key:
        report["conjugacy"]["key"] = repr(result.key)
    return report


def triangulation_report(result: RunResult) -> dict:
    return triangulation_json(result.tri3, result.coloring, result.cycle)
