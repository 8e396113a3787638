"""Minimal/maximal set constructions over doubly-exponential interval blocks.

A bit-entry history drives, per interval I_n, a pair of moving markers: the
member marker a_n (the only member of A inside I_n) and its mirror image
b_n = g(a_n) (the only non-member of B inside I_n).  Marker positions are
decided arithmetically from arbitrary-precision block sums; the huge
intervals are never materialized.  The module also carries the superset,
splitting, witness and gadget constructions that live over the same layout.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from random import Random
from typing import Optional, Sequence

from .core import (ApproxProcess, CapacityError, Horizon, InputError, Prefix,
                   Schedule, UsageError, join, schedule_member)


class InternalInvariantError(RuntimeError):
    """An arithmetic invariant of the construction failed; never clamped."""


@dataclass(frozen=True)
class BlockLayout:
    """Disjoint intervals I_1, I_2, ... tiling the naturals from 0.

    I_n holds the full pairing range {offset(n) + x*2^(2^n) + y} for
    x, y < 2^(2^n), plus one spare slot so the interval maximum is never a
    pairing value.
    """

    n_cap: int

    def base(self, n: int) -> int:
        return 1 << (1 << n)

    def size(self, n: int) -> int:
        return (1 << (1 << (n + 1))) + 1

    def offset(self, n: int) -> int:
        if not 1 <= n <= self.n_cap + 1:
            raise UsageError(f"interval index {n} outside layout cap {self.n_cap}")
        total = 0
        for k in range(1, n):
            total += self.size(k)
        return total

    def interval(self, n: int) -> tuple[int, int]:
        lo = self.offset(n)
        return lo, lo + self.size(n) - 1

    def pair(self, n: int, x: int, y: int) -> int:
        b = self.base(n)
        if not (0 <= x < b and 0 <= y < b):
            raise UsageError("pairing coordinates out of range")
        return self.offset(n) + x * b + y

    def interval_of(self, u: int) -> Optional[int]:
        if u < 0:
            raise UsageError("positions are naturals")
        for n in range(1, self.n_cap + 1):
            lo, hi = self.interval(n)
            if lo <= u <= hi:
                return n
        return None

    def ind(self, u: int) -> int:
        n = self.interval_of(u)
        if n is None:
            raise InputError(f"position {u} outside the laid-out intervals")
        return n

    def mirror(self, u: int) -> int:
        """g: the r-th smallest element of its interval maps to the r-th largest."""
        n = self.ind(u)
        lo, hi = self.interval(n)
        return hi + lo - u

    def in_pairing_range(self, u: int) -> bool:
        n = self.interval_of(u)
        if n is None:
            return False
        lo, hi = self.interval(n)
        return u < hi  # the maximum is the spare slot


def _check_omega(omega: Schedule) -> None:
    if omega.kind != "omega-bits":
        raise UsageError(f"expected an omega-bits schedule, got {omega.kind!r}")
    if omega.entry_stage(0) is not None:
        raise InputError(
            "bit 0 of the driving history must stay 0; the block-sum bound "
            "c_n <= 2^(2^n) fails otherwise")


def compute_c(omega: Schedule, n: int, s: int) -> int:
    """Block sum: sum over m < 2^n of 2^(2^n - m) times the stage-s bit at m."""
    _check_omega(omega)
    top = 1 << n
    total = 0
    for m, t in omega.entries:
        if m < top and t <= s:
            total += 1 << (top - m)
    return total


@dataclass
class ZuluState:
    omega: Schedule
    layout: BlockLayout
    s0: int = 0
    _c_cache: dict[tuple[int, int], int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        _check_omega(self.omega)

    def c(self, n: int, s: int) -> int:
        key = (n, s)
        if key not in self._c_cache:
            self._c_cache[key] = compute_c(self.omega, n, s)
        return self._c_cache[key]

    def d(self, n: int, s: int) -> int:
        if n < 1:
            raise UsageError("block differences start at n = 1")
        return self.c(n, s) - self.layout.base(n - 1) * self.c(n - 1, s)

    def a(self, n: int, s: int) -> int:
        b = self.layout.base(n)
        d = self.d(n, s)
        if d > b - 1:
            raise InternalInvariantError(
                f"block difference {d} exceeds {b - 1} at (n={n}, s={s})")
        return self.layout.pair(n, self.c(n - 1, s), b - 1 - d)

    def b(self, n: int, s: int) -> int:
        return self.layout.mirror(self.a(n, s))

    def covered(self, s: int) -> int:
        return min(s, self.layout.n_cap)


def compute_markers(state: ZuluState, n: int, s: int) -> tuple[int, int]:
    """Member marker and its mirror for interval n at stage s."""
    if s < state.s0:
        raise UsageError("stage precedes the start of the enumeration")
    a = state.a(n, s)
    return a, state.layout.mirror(a)


def build_minimal(omega: Schedule, layout: BlockLayout, horizon: Horizon,
                  label: str = "minimal") -> ApproxProcess:
    """The set holding exactly the member markers of the covered intervals."""
    state = ZuluState(omega, layout)

    def bit(s: int, u: int) -> int:
        n = layout.interval_of(u)
        if n is None or n > state.covered(s):
            return 0
        return 1 if u == state.a(n, s) else 0

    def prefix_value(s: int) -> int:
        N = horizon.bits
        value = 0
        for n in range(1, state.covered(s) + 1):
            a = state.a(n, s)
            if a < N:
                value |= 1 << (N - 1 - a)
        return value

    return ApproxProcess(bit, horizon, label, prefix_fn=prefix_value)


def build_maximal(omega: Schedule, layout: BlockLayout, horizon: Horizon,
                  label: str = "maximal") -> ApproxProcess:
    """The set missing exactly the mirror markers of the covered intervals."""
    state = ZuluState(omega, layout)

    def bit(s: int, u: int) -> int:
        n = layout.interval_of(u)
        if n is None or n > state.covered(s):
            return 0
        return 0 if u == state.b(n, s) else 1

    def prefix_value(s: int) -> int:
        N = horizon.bits
        cov = state.covered(s)
        if cov == 0:
            return 0
        end = min(N, layout.offset(cov + 1))
        value = ((1 << end) - 1) << (N - end) if end > 0 else 0
        for n in range(1, cov + 1):
            b = state.b(n, s)
            if b < N:
                value &= ~(1 << (N - 1 - b))
        return value

    return ApproxProcess(bit, horizon, label, prefix_fn=prefix_value)


@dataclass(frozen=True)
class BttReport:
    ok: bool
    witness: Optional[tuple[int, int]] = None  # (stage, position)
    checked: int = 0


def btt_check(A: ApproxProcess, B: ApproxProcess, layout: BlockLayout,
              stages: Optional[Sequence[int]] = None, exhaustive_below: int = 3,
              samples_per_interval: int = 32, seed: int = 0) -> BttReport:
    """Verify u in A iff mirror(u) not in B over the covered intervals.

    Small intervals are scanned exhaustively; the doubly-exponential ones are
    probed at the markers, the interval boundaries, and seeded samples.
    """
    if A.horizon != B.horizon:
        raise UsageError("processes must share a horizon")
    rng = Random(seed)
    if stages is None:
        stages = range(A.horizon.stages)
    checked = 0
    for s in stages:
        for n in range(1, min(s, layout.n_cap) + 1):
            lo, hi = layout.interval(n)
            if n < exhaustive_below:
                probes = range(lo, hi + 1)
            else:
                probes = {lo, lo + 1, hi - 1, hi}
                for _ in range(samples_per_interval):
                    probes.add(rng.randrange(lo, hi + 1))
                # Probe both sides of every membership boundary we can find.
                for u in list(probes):
                    probes.add(layout.mirror(u))
                probes = sorted(probes)
            member_hits = []
            for u in probes:
                checked += 1
                if A.bit(s, u) != 1 - B.bit(s, layout.mirror(u)):
                    return BttReport(False, (s, u), checked)
                if A.bit(s, u):
                    member_hits.append(u)
            # Also probe the member marker itself via the mirror relation.
            for u in member_hits:
                checked += 1
                if B.bit(s, layout.mirror(u)) != 0:
                    return BttReport(False, (s, u), checked)
    return BttReport(True, None, checked)


def maxsep_superset(A: Schedule, horizon: Horizon,
                    label: str = "strict-superset") -> ApproxProcess:
    """Stage-wise union of an enumeration with every second complement element.

    Requires the schedule to enumerate exactly one new element per stage up to
    its exhaustion; afterwards the output is static.
    """
    if A.kind not in ("re-set", "k-set"):
        raise UsageError("superset construction needs an enumeration schedule")
    by_stage: dict[int, list[int]] = {}
    for x, t in A.entries:
        by_stage.setdefault(t, []).append(x)
    if by_stage:
        for t in range(max(by_stage) + 1):
            if len(by_stage.get(t, ())) != 1:
                raise InputError(
                    f"stage {t} enumerates {len(by_stage.get(t, ()))} elements; "
                    "exactly one per stage is required")
    N = horizon.bits
    members_per_stage: list[frozenset[int]] = []
    values: list[int] = []
    for s in range(horizon.stages):
        members = A.members_at(s)
        members_per_stage.append(members)
        value = 0
        comp_rank = 0
        for x in range(N):
            if x in members:
                value |= 1 << (N - 1 - x)
            else:
                if comp_rank % 2 == 1:
                    value |= 1 << (N - 1 - x)
                comp_rank += 1
        values.append(value)

    def bit(s: int, x: int) -> int:
        members = members_per_stage[s]
        if x in members:
            return 1
        comp_rank = x - sum(1 for m in members if m < x)
        return comp_rank % 2

    return ApproxProcess(bit, horizon, label, prefix_fn=lambda s: values[s])


def _stage_members(p: ApproxProcess, s: int) -> list[int]:
    value = p.prefix(s).value
    N = p.horizon.bits
    return [n for n in range(N) if (value >> (N - 1 - n)) & 1]


def split_subset(A: ApproxProcess, label: str = "split-E") -> ApproxProcess:
    """From an all-odd-members process, keep the even-indexed members and the
    predecessors of the odd-indexed ones."""
    N = A.horizon.bits
    values = []
    for s in range(A.horizon.stages):
        members = _stage_members(A, s)
        if any(m % 2 == 0 for m in members):
            raise InputError("splitting requires all members odd at every stage")
        value = 0
        for k, m in enumerate(members):
            target = m if k % 2 == 0 else m - 1
            value |= 1 << (N - 1 - target)
        values.append(value)
    return ApproxProcess(
        lambda s, n: (values[s] >> (N - 1 - n)) & 1 if n < N else 0,
        A.horizon, label, prefix_fn=lambda s: values[s])


def split_superset(B: ApproxProcess, label: str = "split-F") -> ApproxProcess:
    """Dual form: from a process whose non-members are all odd, remove the
    even-indexed non-members and the predecessors of the odd-indexed ones."""
    N = B.horizon.bits
    full = (1 << N) - 1
    values = []
    for s in range(B.horizon.stages):
        value = B.prefix(s).value
        non_members = [n for n in range(N) if not (value >> (N - 1 - n)) & 1]
        if any(m % 2 == 0 for m in non_members):
            raise InputError("dual splitting requires all non-members odd")
        removed = 0
        for k, m in enumerate(non_members):
            target = m if k % 2 == 0 else m - 1
            removed |= 1 << (N - 1 - target)
        values.append(full & ~removed)
    return ApproxProcess(
        lambda s, n: (values[s] >> (N - 1 - n)) & 1 if n < N else 0,
        B.horizon, label, prefix_fn=lambda s: values[s])


def lowerfarm_witness(B: ApproxProcess, R: frozenset[int],
                      label: str = "window-witness") -> ApproxProcess:
    """Windowed union with a fixed recursive set, at stages where the window
    avoids it: output t is (B at stage s_t, restricted to [0, t]) union R."""
    N = B.horizon.bits
    S = B.horizon.stages
    final_members = frozenset(_stage_members(B, S - 1))
    if R & final_members:
        raise InputError("the fixed set must avoid the final content")
    r_value = Prefix.from_set(R, N).value
    values = []
    s_prev = 0
    for t in range(S):
        window_top = min(t + 1, N)
        window_mask = ((1 << window_top) - 1) << (N - window_top)
        s_t = None
        for s in range(s_prev, S):
            if B.prefix(s).value & window_mask & r_value == 0:
                s_t = s
                break
        if s_t is None:
            raise CapacityError(f"no admissible stage for window [0, {t}]")
        s_prev = s_t
        values.append((B.prefix(s_t).value & window_mask) | r_value)
    return ApproxProcess(
        lambda s, n: (values[s] >> (N - 1 - n)) & 1 if n < N else 0,
        B.horizon, label, prefix_fn=lambda s: values[s])


def tilde_set(A: ApproxProcess, W: Schedule, layout: BlockLayout,
              subset_form: bool = False, label: str = "tilde") -> ApproxProcess:
    """Triple-coded recombination of a one-marker-per-interval set with an
    enumeration over interval indices: members x with enumerated interval
    index contribute 3x, the others contribute 3x+1 and 3x+2 (the subset form
    drops the 3x+2 leg)."""
    if W.kind != "re-set":
        raise UsageError("the index set must be an enumeration schedule")
    hz = A.horizon

    def bit(s: int, y: int) -> int:
        x, r = divmod(y, 3)
        if A.bit(s, x) == 0:
            return 0
        n = layout.ind(x)
        in_w = schedule_member(W, n, s)
        if r == 0:
            return in_w
        if r == 2 and subset_form:
            return 0
        return 1 - in_w

    return ApproxProcess(bit, hz, label)


def max_join_gadget(B: ApproxProcess, W: Schedule,
                    label: str = "join-gadget") -> ApproxProcess:
    """Join with the characteristic process of an enumeration schedule."""
    return join(B, W.as_process(B.horizon), label)
