"""Combinatorial measured train tracks on punctured orientable surfaces.

A track is a trivalent fat graph with a tangential structure: each switch
has one large slot L and two small slots SL/SR, the small slots ordered by
the surface orientation.  Around a switch the counterclockwise order of the
three half-branch ends is (L, SR, SL).  The embedding is entirely encoded by
this slot order plus the global orientation; complementary regions, genus
and puncture count are derived, never stored as ground truth.

A dart is a pair (branch, end) and means the traversal that leaves that end
of the branch; region boundaries are orbits of darts.  Punctures are tracked
as one representative dart per punctured region.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    DegenerateStratum,
    IllegalRegion,
    IncompleteTrack,
    NonpositiveWeight,
    NotFullyPunctured,
    SwitchViolation,
    TrackError,
)

LARGE = "L"
SMALL_RIGHT = "SR"
SMALL_LEFT = "SL"
SLOTS = (LARGE, SMALL_RIGHT, SMALL_LEFT)  # counterclockwise around a switch
SMALL_SLOTS = (SMALL_RIGHT, SMALL_LEFT)

_CCW_NEXT = {LARGE: SMALL_RIGHT, SMALL_RIGHT: SMALL_LEFT, SMALL_LEFT: LARGE}


class TrainTrack:
    """Immutable slot assignment: every (switch, slot) holds one branch end.

    branches: mapping branch id -> ((switch, slot), (switch, slot)).
    punctured_darts: one dart per punctured complementary region.
    """

    __slots__ = ("places", "slots", "switches", "punctured_darts")

    def __init__(self, branches, punctured_darts=()):
        places = {}
        slots = {}
        for b, (p0, p1) in branches.items():
            p0 = (p0[0], p0[1])
            p1 = (p1[0], p1[1])
            for p in (p0, p1):
                if p[1] not in SLOTS:
                    raise TrackError(f"unknown slot {p[1]!r} on branch {b}")
                if p in slots:
                    raise TrackError(f"slot {p} occupied twice")
                slots[p] = None
            places[b] = (p0, p1)
        for b, (p0, p1) in places.items():
            slots[p0] = (b, 0)
            slots[p1] = (b, 1)
        switches = sorted({sw for (sw, _slot) in slots})
        for sw in switches:
            for slot in SLOTS:
                if (sw, slot) not in slots:
                    raise IncompleteTrack(f"switch {sw} is missing slot {slot}")
        self.places = places
        self.slots = slots
        self.switches = tuple(switches)
        self.punctured_darts = frozenset(tuple(d) for d in punctured_darts)

    # -- basic queries ---------------------------------------------------

    @property
    def branches(self):
        return self.places.keys()

    def end_at(self, switch, slot):
        return self.slots[(switch, slot)]

    def place_of(self, branch, end):
        return self.places[branch][end]

    def branch_at(self, switch, slot):
        return self.slots[(switch, slot)][0]

    def classify_branch(self, b):
        """'large', 'small' or 'mixed' from the two end slots."""
        s0 = self.places[b][0][1]
        s1 = self.places[b][1][1]
        if s0 == LARGE and s1 == LARGE:
            return "large"
        if s0 != LARGE and s1 != LARGE:
            return "small"
        return "mixed"

    def large_branches(self):
        return sorted(b for b in self.places if self.classify_branch(b) == "large")

    # -- region traversal --------------------------------------------------

    def next_dart(self, dart):
        """Follow the branch, then rotate counterclockwise at the far switch."""
        b, e = dart
        sw, slot = self.places[b][1 - e]
        nxt = self.slots[(sw, _CCW_NEXT[slot])]
        return nxt

    def regions(self):
        """Complementary regions as dart orbits, sorted by smallest dart.

        Each region records its boundary darts (rotated so the minimum dart
        comes first), its cusp count, and whether it is punctured.  Every
        dart lies in exactly one region; cusps total one per switch.
        """
        seen = set()
        out = []
        for start in sorted((b, e) for b in self.places for e in (0, 1)):
            if start in seen:
                continue
            orbit = []
            cusps = 0
            d = start
            while True:
                orbit.append(d)
                seen.add(d)
                b, e = d
                sw, slot = self.places[b][1 - e]
                if slot == SMALL_RIGHT:
                    cusps += 1  # the SR -> SL passage crosses the cusp
                d = self.next_dart(d)
                if d == start:
                    break
            k = orbit.index(min(orbit))
            orbit = tuple(orbit[k:] + orbit[:k])
            punctured = any(d in self.punctured_darts for d in orbit)
            out.append(Region(orbit, cusps, punctured))
        out.sort(key=lambda r: r.darts[0])
        return out

    def region_of_dart(self, dart):
        for r in self.regions():
            if tuple(dart) in r.darts:
                return r
        raise TrackError(f"dart {dart} not found")

    # -- derived surface ---------------------------------------------------

    def surface(self):
        """SurfaceSummary after validity checks; raises on illegal regions."""
        regs = self.regions()
        if len(self.switches) == 0:
            raise IncompleteTrack("empty track")
        self._check_connected()
        for r in regs:
            chi = 0 if r.punctured else 1
            if 2 * chi - r.cusps >= 0:
                kind = "punctured disk" if r.punctured else "disk"
                raise IllegalRegion(
                    r.darts, f"{kind} with {r.cusps} cusps has 2*chi - cusps >= 0")
        v = len(self.switches)
        e = len(self.places)
        total_cusps = sum(r.cusps for r in regs)
        if total_cusps != v:
            raise TrackError(
                f"cusp count {total_cusps} != switch count {v} (model broken)")
        n = sum(1 for r in regs if r.punctured)
        chi = v - e + sum(0 if r.punctured else 1 for r in regs)
        if (2 - chi - n) % 2 != 0:
            raise TrackError("non-integral genus; orientability bookkeeping broken")
        g = (2 - chi - n) // 2
        if g < 0:
            raise TrackError(f"negative genus {g}")
        return SurfaceSummary(genus=g, punctures=n, regions=regs)

    def _check_connected(self):
        if not self.switches:
            return
        seen = {self.switches[0]}
        stack = [self.switches[0]]
        while stack:
            sw = stack.pop()
            for slot in SLOTS:
                b, e = self.slots[(sw, slot)]
                other = self.places[b][1 - e][0]
                if other not in seen:
                    seen.add(other)
                    stack.append(other)
        if len(seen) != len(self.switches):
            raise IncompleteTrack("track is not connected")

    # -- excluded configurations -------------------------------------------

    def check_excluded(self):
        """Configurations that can never appear in a periodic sequence.

        A small branch whose companion small half-branches sit on the same
        side (end slots SL at one end, SR at the other), and the special
        case of a loop at one switch bounding a monogon.
        """
        violations = []
        for b in sorted(self.places):
            (sw0, s0), (sw1, s1) = self.places[b]
            if s0 == LARGE or s1 == LARGE:
                continue
            if {s0, s1} == {SMALL_LEFT, SMALL_RIGHT}:
                if sw0 == sw1:
                    violations.append(ExcludedConfiguration(b, "isolated monogon"))
                else:
                    violations.append(
                        ExcludedConfiguration(b, "one-sided small branch"))
        return violations

    # -- puncturing ----------------------------------------------------------

    def with_punctures(self, darts):
        return TrainTrack(self.places, frozenset(darts))

    def puncture_unpunctured_regions(self):
        """Puncture every unpunctured region (pass to the fully punctured
        surface); a no-op on darts already marked."""
        darts = set(self.punctured_darts)
        for r in self.regions():
            if not r.punctured:
                darts.add(r.darts[0])
        return self.with_punctures(darts)

    def normalized_puncture_darts(self):
        """Representative darts rewritten as each region's minimum dart."""
        darts = set()
        for r in self.regions():
            if r.punctured:
                darts.add(r.darts[0])
        return self.with_punctures(darts)

    def __repr__(self):
        return (f"TrainTrack({len(self.switches)} switches, "
                f"{len(self.places)} branches)")


@dataclass(frozen=True)
class Region:
    darts: tuple
    cusps: int
    punctured: bool


@dataclass(frozen=True)
class SurfaceSummary:
    genus: int
    punctures: int
    regions: tuple

    @property
    def euler(self):
        return 2 - 2 * self.genus - self.punctures


@dataclass(frozen=True)
class ExcludedConfiguration:
    branch: str
    kind: str


def validate(track: TrainTrack) -> SurfaceSummary:
    return track.surface()


class Measure:
    """Positive branch weights in a shared field Q(lambda)."""

    __slots__ = ("field", "weights")

    def __init__(self, field, weights):
        self.field = field
        self.weights = dict(weights)

    def __getitem__(self, b):
        return self.weights[b]

    def __contains__(self, b):
        return b in self.weights

    def items(self):
        return self.weights.items()

    def replace(self, remove=(), add=()):
        w = dict(self.weights)
        for b in remove:
            del w[b]
        for b, val in add:
            w[b] = val
        return Measure(self.field, w)

    def scaled(self, factor):
        return Measure(self.field, {b: w * factor for b, w in self.weights.items()})


def validate_measure(track: TrainTrack, measure: Measure):
    """Positivity and exact switch conditions; raises on failure."""
    for b in sorted(track.places):
        if b not in measure:
            raise TrackError(f"no weight for branch {b}")
        if measure[b].sign() <= 0:
            raise NonpositiveWeight(b)
    for sw in track.switches:
        large = measure[track.branch_at(sw, LARGE)]
        small = (measure[track.branch_at(sw, SMALL_LEFT)]
                 + measure[track.branch_at(sw, SMALL_RIGHT)])
        if not (large - small).is_zero():
            raise SwitchViolation(sw)
    return True


def branch_bound(g: int, n: int) -> int:
    """Maximal branch count 18g - 18 + 6n of a filling track on S_{g,n}."""
    if 2 - 2 * g - n >= 0:
        raise TrackError(f"surface S_{{{g},{n}}} is not hyperbolic")
    e = 18 * g - 18 + 6 * n
    if e <= 0:
        raise DegenerateStratum(
            f"S_{{{g},{n}}}: branch bound {e} <= 0, no filling trivalent track")
    return e


def maximal_track_counts(g: int, n: int):
    """(switches, branches, trigons) of a track whose regions are n punctured
    monogons and t trigons: v = n + 3t and 3v = 2e."""
    e = branch_bound(g, n)
    if (2 * e) % 3 != 0:
        raise TrackError("3v = 2e has no integer solution")
    v = (2 * e) // 3
    if (v - n) % 3 != 0:
        raise TrackError("v = n + 3t has no integer solution")
    t = (v - n) // 3
    return v, e, t


def dual_triangulation(track: TrainTrack):
    """Ideal triangulation dual to a track all of whose regions are punctured.

    One triangle per switch with sides in slot order (L, SR, SL), which is
    the counterclockwise order; one edge per branch.
    """
    from .surface import IdealTriangulation2

    bad = [r.darts for r in track.regions() if not r.punctured]
    if bad:
        raise NotFullyPunctured(bad)
    tris = {}
    for sw in track.switches:
        tris[sw] = tuple(track.branch_at(sw, slot) for slot in SLOTS)
    return IdealTriangulation2(tris)
