"""Elementary moves, the maximal splitting operator, and periodicity.

Split conventions (orientation-intrinsic, no pictures needed): let e be a
large branch with end 0 at switch u and end 1 at switch w, and write

    a = end in (u, SR), b = end in (u, SL), c = end in (w, SL), d = end in (w, SR).

With weights mu(a) + mu(b) = mu(e) = mu(c) + mu(d) the split is guided by
comparing mu(a) and mu(c):

  left  (mu(a) < mu(c)):  u -> {L: c, SR: a, SL: e'},  w -> {L: b, SL: e', SR: d}
  right (mu(a) > mu(c)):  u -> {L: a, SL: c, SR: e'},  w -> {L: d, SR: e', SL: b}

with mu(e') = |mu(c) - mu(a)|; equality is a central split and is not a
move.  Swapping the roles of the two ends of e gives the same rule, so the
parity is well defined.  The fold is the exact inverse and needs no
measure; the branches folded over e' are the SR companions for a left
configuration and the SL companions for a right one, and the folded weight
is their sum plus mu(e').
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field

from .algebra import IntegerMatrix, pf_eigenpair, same_real_number
from .errors import (
    CentralSplit,
    CentralSplitInBatch,
    MoveError,
    NotFoldable,
    NotLarge,
    NotMixed,
    NotSmall,
    TrackError,
)
from .track import (
    LARGE,
    Measure,
    SLOTS,
    SMALL_LEFT,
    SMALL_RIGHT,
    TrainTrack,
    validate,
    validate_measure,
)


@dataclass(frozen=True)
class MoveRecord:
    kind: str                  # split-left / split-right / fold / shift
    branch: str                # branch the move was performed at
    created: str | None = None  # new branch id (splits and folds)
    u: str | None = None       # switch holding end 0 of the moved branch
    w: str | None = None       # switch holding end 1
    ends: tuple | None = None  # (a, b, c, d) as (branch, end) pairs
    folded: tuple | None = None  # branch pair folded over in the reverse move


def fresh_branch_id(track: TrainTrack, taken=()):
    k = len(track.places)
    while True:
        cand = f"b{k}"
        if cand not in track.places and cand not in taken:
            return cand
        k += 1


def _split_data(track: TrainTrack, e):
    (u, s0), (w, s1) = track.places[e]
    if s0 != LARGE or s1 != LARGE:
        raise NotLarge(f"branch {e} is {track.classify_branch(e)}")
    a = track.end_at(u, SMALL_RIGHT)
    b = track.end_at(u, SMALL_LEFT)
    c = track.end_at(w, SMALL_LEFT)
    d = track.end_at(w, SMALL_RIGHT)
    return u, w, a, b, c, d


def split_track(track: TrainTrack, e, parity, new_branch_id=None):
    """Split the large branch e with a chosen parity, no measure needed.

    parity is "left" or "right".  Returns (track', record).
    """
    u, w, a, b, c, d = _split_data(track, e)
    ep = new_branch_id or fresh_branch_id(track)
    if ep in track.places:
        raise MoveError(f"branch id {ep} already in use")
    places = dict(track.places)
    del places[e]
    if parity == "left":
        places[a[0]] = _move_end(places[a[0]], a[1], (u, SMALL_RIGHT))
        places[c[0]] = _move_end(places[c[0]], c[1], (u, LARGE))
        places[b[0]] = _move_end(places[b[0]], b[1], (w, LARGE))
        places[d[0]] = _move_end(places[d[0]], d[1], (w, SMALL_RIGHT))
        places[ep] = ((u, SMALL_LEFT), (w, SMALL_LEFT))
        kind = "split-left"
        folded = (a[0], d[0])
    elif parity == "right":
        places[a[0]] = _move_end(places[a[0]], a[1], (u, LARGE))
        places[c[0]] = _move_end(places[c[0]], c[1], (u, SMALL_LEFT))
        places[b[0]] = _move_end(places[b[0]], b[1], (w, SMALL_LEFT))
        places[d[0]] = _move_end(places[d[0]], d[1], (w, LARGE))
        places[ep] = ((u, SMALL_RIGHT), (w, SMALL_RIGHT))
        kind = "split-right"
        folded = (b[0], c[0])
    else:
        raise ValueError(f"parity {parity!r}")
    punctures = _safe_puncture_darts(track, dead={e})
    new_track = TrainTrack(places, punctures)
    record = MoveRecord(kind, e, ep, u, w, (a, b, c, d), folded)
    return new_track, record


def split(track: TrainTrack, measure: Measure, e, new_branch_id=None):
    """Split the large branch e, guided by the measure.

    Returns (track', measure', record).  Raises CentralSplit when the two
    guiding weights tie (the branch would vanish; not a move here).
    """
    u, w, a, b, c, d = _split_data(track, e)
    mu_a = measure[a[0]]
    mu_c = measure[c[0]]
    cmp = (mu_a - mu_c).sign()
    if cmp == 0:
        raise CentralSplit(e)
    parity = "left" if cmp < 0 else "right"
    new_track, record = split_track(track, e, parity, new_branch_id)
    weight = (mu_c - mu_a) if cmp < 0 else (mu_a - mu_c)
    new_measure = measure.replace(remove=(e,), add=((record.created, weight),))
    return new_track, new_measure, record


def _move_end(pair, end_idx, new_place):
    pair = list(pair)
    pair[end_idx] = new_place
    return tuple(pair)


def _safe_puncture_darts(track: TrainTrack, dead):
    """Puncture representatives rewritten off branches about to disappear.

    Darts on surviving branches persist through a move and still identify
    the same complementary region afterwards.
    """
    if not track.punctured_darts:
        return frozenset()
    out = set()
    regions = None
    for dart in track.punctured_darts:
        if dart[0] not in dead:
            out.add(dart)
            continue
        if regions is None:
            regions = track.regions()
        for r in regions:
            if dart in r.darts:
                alive = [dd for dd in r.darts if dd[0] not in dead]
                if not alive:
                    raise TrackError("region bounded only by dying branches")
                out.add(min(alive))
                break
        else:
            raise TrackError(f"puncture dart {dart} not found in any region")
    return frozenset(out)


def fold(track: TrainTrack, e, measure: Measure | None = None,
         new_branch_id=None):
    """Fold the small branch e; the exact inverse of a split.

    Needs no measure; when one is given, the folded branch gets the weight
    of the two folded-over branches plus the old weight.  Returns
    (track', measure'|None, record).
    """
    (u, s0), (w, s1) = track.places[e]
    if s0 == LARGE or s1 == LARGE:
        raise NotSmall(f"branch {e} is {track.classify_branch(e)}")
    if s0 != s1:
        # one-sided small branch (or a loop monogon): the two companions sit
        # on the same side and would collide
        raise NotFoldable(f"branch {e} has ends in slots {s0}/{s1}")
    big = new_branch_id or fresh_branch_id(track)
    if big in track.places:
        raise MoveError(f"branch id {big} already in use")
    places = dict(track.places)
    del places[e]
    if s0 == SMALL_LEFT:  # inverse of a left split
        c = track.end_at(u, LARGE)
        a = track.end_at(u, SMALL_RIGHT)
        b = track.end_at(w, LARGE)
        d = track.end_at(w, SMALL_RIGHT)
        folded = (a[0], d[0])
    else:  # inverse of a right split
        a = track.end_at(u, LARGE)
        c = track.end_at(u, SMALL_LEFT)
        d = track.end_at(w, LARGE)
        b = track.end_at(w, SMALL_LEFT)
        folded = (b[0], c[0])
    places[a[0]] = _move_end(places[a[0]], a[1], (u, SMALL_RIGHT))
    places[b[0]] = _move_end(places[b[0]], b[1], (u, SMALL_LEFT))
    places[c[0]] = _move_end(places[c[0]], c[1], (w, SMALL_LEFT))
    places[d[0]] = _move_end(places[d[0]], d[1], (w, SMALL_RIGHT))
    places[big] = ((u, LARGE), (w, LARGE))
    punctures = _safe_puncture_darts(track, dead={e})
    new_track = TrainTrack(places, punctures)
    new_measure = None
    if measure is not None:
        weight = measure[folded[0]] + measure[e] + measure[folded[1]]
        new_measure = measure.replace(remove=(e,), add=((big, weight),))
    record = MoveRecord("fold", e, big, u, w, (a, b, c, d), folded)
    return new_track, new_measure, record


def shift(track: TrainTrack, e, measure: Measure | None = None):
    """Shift the mixed branch e; self-inverse up to relabeling."""
    (p0, p1) = track.places[e]
    if p0[1] == LARGE and p1[1] != LARGE:
        (u, _), (w, s) = p0, p1
        e_u, e_w = 0, 1
    elif p1[1] == LARGE and p0[1] != LARGE:
        (u, _), (w, s) = p1, p0
        e_u, e_w = 1, 0
    else:
        raise NotMixed(f"branch {e} is {track.classify_branch(e)}")
    if u == w:
        raise MoveError(f"branch {e} loops through its own large slot")
    p = track.end_at(u, SMALL_RIGHT)
    q = track.end_at(u, SMALL_LEFT)
    places = dict(track.places)
    if s == SMALL_LEFT:
        g = track.end_at(w, SMALL_RIGHT)
        places[e] = _move_end(places[e], e_w, (w, SMALL_RIGHT))
        places[g[0]] = _move_end(places[g[0]], g[1], (u, SMALL_RIGHT))
        places[q[0]] = _move_end(places[q[0]], q[1], (w, SMALL_LEFT))
        places[p[0]] = _move_end(places[p[0]], p[1], (u, SMALL_LEFT))
        new_weight = lambda m: m[p[0]] + m[g[0]]
    else:
        g = track.end_at(w, SMALL_LEFT)
        places[e] = _move_end(places[e], e_w, (w, SMALL_LEFT))
        places[g[0]] = _move_end(places[g[0]], g[1], (u, SMALL_LEFT))
        places[q[0]] = _move_end(places[q[0]], q[1], (u, SMALL_RIGHT))
        places[p[0]] = _move_end(places[p[0]], p[1], (w, SMALL_RIGHT))
        new_weight = lambda m: m[q[0]] + m[g[0]]
    punctures = _safe_puncture_darts(track, dead={e})
    new_track = TrainTrack(places, punctures)
    new_measure = None
    if measure is not None:
        new_measure = measure.replace(remove=(e,), add=((e, new_weight(measure)),))
    record = MoveRecord("shift", e, None, u, w, None, None)
    return new_track, new_measure, record


# -- maximal splitting --------------------------------------------------------


def maximal_weight_branches(track: TrainTrack, measure: Measure):
    """Branches of maximal weight, by exact comparison; asserts they are
    large (forced by positivity and the switch conditions)."""
    best = None
    best_ids = []
    for b in sorted(track.places):
        w = measure[b]
        if best is None:
            best, best_ids = w, [b]
            continue
        s = (w - best).sign()
        if s > 0:
            best, best_ids = w, [b]
        elif s == 0:
            best_ids.append(b)
    for b in best_ids:
        if track.classify_branch(b) != "large":
            raise TrackError(
                f"maximal-weight branch {b} is not large; measure invalid")
    return best_ids


def maximal_split(track: TrainTrack, measure: Measure):
    """Split every large branch of maximal weight, ascending branch id.

    Tied splits involve disjoint switch pairs, so the order cannot matter;
    the ascending order is a serialization convention.  Returns
    (track', measure', batch records).
    """
    targets = maximal_weight_branches(track, measure)
    for e in targets:
        _, _, a, _, c, _ = _split_data(track, e)
        if (measure[a[0]] - measure[c[0]]).is_zero():
            raise CentralSplitInBatch(e)
    records = []
    taken = set()
    for e in targets:
        ep = fresh_branch_id(track, taken)
        taken.add(ep)
        track, measure, rec = split(track, measure, e, new_branch_id=ep)
        records.append(rec)
    return track, measure, tuple(records)


# -- canonical forms ----------------------------------------------------------


def canonical_form(track: TrainTrack, measure: Measure | None = None):
    """Canonical key of a (projectively) measured track.

    Minimizes a deterministic traversal serialization over all start
    switches; slot labels leave no other freedom.  The measure is
    normalized by the weight of the canonically-first branch, so keys agree
    exactly on measure-projective slot-preserving isomorphism orbits.
    Returns (key, switch_labeling, branch_labeling).
    """
    punctured_regions = tuple(
        r.darts for r in track.regions() if r.punctured)
    best = None
    for s0 in track.switches:
        cand = _traversal_key(track, measure, s0, punctured_regions)
        if best is None or cand[0] < best[0]:
            best = cand
    return best


def canonical_key(track: TrainTrack, measure: Measure | None = None):
    return canonical_form(track, measure)[0]


def _traversal_key(track: TrainTrack, measure, s0, punctured_regions):
    sw_label = {s0: 0}
    br_label = {}
    order = [s0]
    i = 0
    while i < len(order):
        sw = order[i]
        for slot in SLOTS:
            b, e = track.slots[(sw, slot)]
            if b not in br_label:
                br_label[b] = len(br_label)
            other = track.places[b][1 - e][0]
            if other not in sw_label:
                sw_label[other] = len(sw_label)
                order.append(other)
        i += 1
    branches = sorted(br_label, key=br_label.get)
    rows = []
    norm_place = {}
    for b in branches:
        pa, pb = track.places[b]
        la = (sw_label[pa[0]], SLOTS.index(pa[1]))
        lb = (sw_label[pb[0]], SLOTS.index(pb[1]))
        if la <= lb:
            rows.append((la, lb))
            norm_place[b] = (0, 1)
        else:
            rows.append((lb, la))
            norm_place[b] = (1, 0)
    # punctures are properties of regions: serialize each punctured region
    # by its minimal relabeled dart, which is labeling-invariant
    punct = tuple(sorted(
        min((br_label[b], norm_place[b][e]) for (b, e) in darts)
        for darts in punctured_regions))
    key = (len(order), tuple(rows), punct)
    if measure is not None:
        ref = measure[branches[0]]
        wrows = []
        for b in branches:
            val = measure[b] / ref
            wrows.append(tuple((c.numerator, c.denominator) for c in val.coeffs))
        key = key + (tuple(measure.field.minpoly.coeffs), tuple(wrows))
    return key, sw_label, br_label


# -- splitting sequences and periodicity ---------------------------------------


@dataclass
class PeriodicityCertificate:
    n: int                      # preperiod, in maximal-splitting steps
    m: int                      # period length, in maximal-splitting steps
    splits: int                 # individual splits during the period
    iso_switch: dict            # switches of state n -> state n+m
    iso_branch: dict            # branches of state n -> state n+m
    scale: object               # kappa with mu_{n+m} = kappa * (mu_n o iso^-1)
    dilatation: object          # kappa^{-1}, the exact dilatation
    transition: IntegerMatrix   # period folds, state-n branch coordinates
    branch_order: tuple         # coordinate order of `transition`
    factors: tuple              # unipotent fold factor matrices
    pf_eigenvalue: object = None  # PF eigenvalue of `transition`, own field


@dataclass
class SplittingSequence:
    states: list                # [(track, measure)]
    batches: list               # per step, tuple of MoveRecords
    certificate: PeriodicityCertificate | None = None
    keys: dict = dataclass_field(default_factory=dict)

    def extend(self, steps):
        """Apply further maximal splittings past the detected repeat."""
        for _ in range(steps):
            track, measure = self.states[-1]
            t2, m2, recs = maximal_split(track, measure)
            _check_state(t2, m2)
            self.states.append((t2, m2))
            self.batches.append(recs)


def _check_state(track, measure):
    validate(track)
    validate_measure(track, measure)
    bad = track.check_excluded()
    if bad:
        raise TrackError(f"excluded configuration appeared: {bad}")


def run_sequence(track: TrainTrack, measure: Measure, max_steps=10000):
    """Iterate maximal splittings until the projective canonical form
    repeats; returns the sequence with a certificate on repeat, or without
    one when max_steps is exhausted."""
    _check_state(track, measure)
    seq = SplittingSequence(states=[(track, measure)], batches=[])
    key = canonical_key(track, measure)
    seq.keys[key] = 0
    for step in range(1, max_steps + 1):
        t, m = seq.states[-1]
        t2, m2, recs = maximal_split(t, m)
        _check_state(t2, m2)
        seq.states.append((t2, m2))
        seq.batches.append(recs)
        key = canonical_key(t2, m2)
        if key in seq.keys:
            n = seq.keys[key]
            seq.certificate = make_certificate(seq, n, step)
            return seq
        seq.keys[key] = step
    return seq


def state_isomorphism(seq: SplittingSequence, i: int, j: int):
    """Slot-preserving isomorphism state i -> state j via canonical labels."""
    ti, mi = seq.states[i]
    tj, mj = seq.states[j]
    ki, swi, bri = canonical_form(ti, mi)
    kj, swj, brj = canonical_form(tj, mj)
    if ki != kj:
        raise TrackError(f"states {i} and {j} are not isomorphic")
    inv_swj = {v: k for k, v in swj.items()}
    inv_brj = {v: k for k, v in brj.items()}
    iso_switch = {s: inv_swj[swi[s]] for s in swi}
    iso_branch = {b: inv_brj[bri[b]] for b in bri}
    return iso_switch, iso_branch


def transition_matrix(seq: SplittingSequence, i: int, j: int, iso_branch):
    """Integer matrix of the period's folds in state-i branch coordinates.

    Reversing the splits of steps [i, j) as folds and closing up through the
    isomorphism gives M with M . mu_i = dilatation . mu_i exactly.
    """
    ids = sorted(seq.states[i][0].places)
    cols = []
    for b in ids:
        vec = {iso_branch[b]: 1}
        for k in range(j - 1, i - 1, -1):
            for rec in seq.batches[k]:
                val = vec.pop(rec.created, 0)
                x, y = rec.folded
                vec[rec.branch] = val + vec.get(x, 0) + vec.get(y, 0)
        cols.append([vec.get(b2, 0) for b2 in ids])
    rows = [[cols[cidx][ridx] for cidx in range(len(ids))]
            for ridx in range(len(ids))]
    return IntegerMatrix(rows), tuple(ids)


def fold_factor_matrices(seq: SplittingSequence, i: int, j: int):
    """One unipotent factor per fold, each with entry sum e + 2."""
    factors = []
    for k in range(j - 1, i - 1, -1):
        ids_after = sorted(seq.states[k + 1][0].places)
        current = list(ids_after)
        for rec in reversed(seq.batches[k]):
            before = sorted(set(current) - {rec.created} | {rec.branch})
            col_of = {b: idx for idx, b in enumerate(current)}
            rows = []
            for b in before:
                row = [0] * len(current)
                if b == rec.branch:
                    row[col_of[rec.created]] += 1
                    row[col_of[rec.folded[0]]] += 1
                    row[col_of[rec.folded[1]]] += 1
                else:
                    row[col_of[b]] = 1
                rows.append(row)
            factors.append(IntegerMatrix(rows))
            current = before
    return tuple(factors)


def every_branch_eventually_split(seq: SplittingSequence, cert) -> bool:
    """Each branch of the periodic tail is split after finitely many
    periods: following a surviving branch one period back through the
    isomorphism must reach a split branch."""
    split_ids = {rec.branch
                 for k in range(cert.n, cert.n + cert.m)
                 for rec in seq.batches[k]}
    inv_iso = {v: k for k, v in cert.iso_branch.items()}
    for b in seq.states[cert.n][0].places:
        cur = b
        for _ in range(len(cert.iso_branch) + 1):
            if cur in split_ids:
                break
            cur = inv_iso[cur]
        else:
            return False
    return True


def make_certificate(seq: SplittingSequence, i: int, j: int):
    """Build and fully verify the periodicity certificate for states i, j."""
    ti, mi = seq.states[i]
    tj, mj = seq.states[j]
    iso_switch, iso_branch = state_isomorphism(seq, i, j)
    ref = sorted(ti.places)[0]
    kappa = mj[iso_branch[ref]] / mi[ref]
    for b in ti.places:
        if not (mj[iso_branch[b]] - kappa * mi[b]).is_zero():
            raise TrackError("scale is not uniform across branches")
    if not (kappa.sign() > 0 and (kappa - 1).sign() < 0):
        raise TrackError(f"scale {kappa!r} not in (0, 1)")
    dilatation = kappa.inverse()
    matrix, order = transition_matrix(seq, i, j, iso_branch)
    mu_vec = [mi[b] for b in order]
    for ridx, b in enumerate(order):
        lhs = mi.field.zero()
        for cidx, b2 in enumerate(order):
            if matrix.rows[ridx][cidx]:
                lhs = lhs + mu_vec[cidx] * matrix.rows[ridx][cidx]
        if not (lhs - dilatation * mu_vec[ridx]).is_zero():
            raise TrackError("transition matrix does not scale the measure")
    factors = fold_factor_matrices(seq, i, j)
    e = len(ti.places)
    for f in factors:
        if f.entry_sum() != e + 2:
            raise TrackError(f"fold factor entry sum {f.entry_sum()} != {e + 2}")
    lam_pf, _ = pf_eigenpair(matrix)
    if not same_real_number(lam_pf, dilatation):
        raise TrackError("PF eigenvalue of the period disagrees with the scale")
    cert = PeriodicityCertificate(
        n=i, m=j - i,
        splits=sum(len(seq.batches[k]) for k in range(i, j)),
        iso_switch=iso_switch, iso_branch=iso_branch,
        scale=kappa, dilatation=dilatation,
        transition=matrix, branch_order=order, factors=factors,
        pf_eigenvalue=lam_pf)
    if not every_branch_eventually_split(seq, cert):
        raise TrackError("a branch is never split; certificate invalid")
    return cert
