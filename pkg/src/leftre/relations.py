"""Inclusion and lex-order relations over numberings.

Brute-force oracles compute the relations from final limit estimates and
serve as independent references.  The coding half turns an enumeration of a
set K into a process whose adjacent bit pairs flip from 01 to 10, and the
decoding half recovers K below a bound by searching an enumerated inclusion
oracle.  The follower construction builds a numbering on which the lex
relation is enumerable: whenever one approximation overtakes another, the
overtaken follower is obliterated to the all-ones set, emitted pairs whose
left side died drag their right side down with them, and fresh followers are
established, so no emitted comparison is ever invalidated.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .core import (ApproxProcess, CapacityError, GREATER, Horizon, InputError,
                   Numbering, Prefix, Schedule, UsageError, lex_cmp,
                   limit_estimate, process_from_stage_prefixes)


def pair_code(i: int, j: int) -> int:
    return (i + j) * (i + j + 1) // 2 + j


@dataclass(frozen=True)
class RelationOracle:
    entries: tuple[tuple[tuple[int, int], int], ...]  # ((i, j), stage)
    mode: str  # "inclusion" | "lex"

    def pairs(self) -> frozenset[tuple[int, int]]:
        return frozenset(p for p, _ in self.entries)

    def emitted_by(self, s: int) -> frozenset[tuple[int, int]]:
        return frozenset(p for p, t in self.entries if t <= s)

    def has(self, i: int, j: int) -> bool:
        return (i, j) in self.pairs()

    def max_stage(self) -> int:
        return max((t for _, t in self.entries), default=0)

    def csv_rows(self) -> list[str]:
        return [f"{i},{j},{t}" for (i, j), t in sorted(
            self.entries, key=lambda e: (e[1], pair_code(*e[0])))]


def _stable_finals(nu: Numbering) -> list[Prefix]:
    finals = []
    for e in range(nu.index_range):
        final, stable = limit_estimate(nu.at(e))
        if not stable:
            raise InputError(
                f"index {e} still changing near the horizon; oracle refused")
        finals.append(final)
    return finals


def inc_oracle_bruteforce(nu: Numbering) -> RelationOracle:
    """Inclusion on limit estimates; emission stage is the pair code, which
    simulates an enumeration order for the decoding search."""
    finals = _stable_finals(nu)
    entries = []
    for i, a in enumerate(finals):
        for j, b in enumerate(finals):
            if a.is_subset_of(b):
                entries.append(((i, j), pair_code(i, j)))
    return RelationOracle(tuple(entries), "inclusion")


def lex_oracle_bruteforce(nu: Numbering) -> RelationOracle:
    finals = _stable_finals(nu)
    entries = []
    for i, a in enumerate(finals):
        for j, b in enumerate(finals):
            if lex_cmp(a, b) != GREATER:
                entries.append(((i, j), pair_code(i, j)))
    return RelationOracle(tuple(entries), "lex")


def b_from_k(K: Schedule, horizon: Horizon) -> ApproxProcess:
    """Adjacent-pair coding: positions 2x, 2x+1 read 01 until x enters K and
    10 afterwards."""
    if K.kind != "k-set":
        raise UsageError("coding expects a k-set schedule")
    N = horizon.bits
    odds = 0
    for n in range(N):
        if n % 2 == 1:
            odds |= 1 << (N - 1 - n)
    values = []
    for s in range(horizon.stages):
        v = odds
        for x in K.members_at(s):
            if 2 * x < N:
                v |= 1 << (N - 1 - 2 * x)
            if 2 * x + 1 < N:
                v &= ~(1 << (N - 1 - (2 * x + 1)))
        values.append(v)

    def bit(s: int, y: int) -> int:
        in_k = K.bit(y // 2, s)
        return in_k if y % 2 == 0 else 1 - in_k

    return ApproxProcess(bit, horizon, "coded-k", prefix_fn=lambda s: values[s])


def decide_k_below(oracle: RelationOracle, nu: Numbering, x: int, K: Schedule,
                   a_index: int = 0, b_index: int = 1) -> set[int]:
    """Recover K below x from an enumerated inclusion oracle.

    Searches for a candidate set E and a stage at which both E-inside-odds
    and E-inside-coded-set pairs are out, and every y below x sits in exactly
    one of the stage view of K and the doubled-shifted view of E.  The result
    is audited against the schedule's final content.
    """
    if oracle.mode != "inclusion":
        raise UsageError("decoding needs an inclusion oracle")
    if x == 0:
        return set()
    S = nu.horizon.stages
    limit = max(oracle.max_stage(), max((t for _, t in K.entries), default=0),
                S - 1) + 1
    candidates = [e for e in range(nu.index_range) if e not in (a_index, b_index)]
    for s in range(limit):
        emitted = oracle.emitted_by(s)
        k_view = K.members_at(s)
        for e in candidates:
            if (e, a_index) not in emitted or (e, b_index) not in emitted:
                continue
            E = nu.at(e).prefix(min(s, S - 1)).members()
            if all((y in k_view) != (2 * y + 1 in E) for y in range(x)):
                result = {y for y in range(x) if 2 * y + 1 not in E}
                expected = {y for y in K.final_members() if y < x}
                if result != expected:
                    raise RuntimeError(
                        f"decoded {sorted(result)} but the schedule holds "
                        f"{sorted(expected)} below {x}")
                return result
    raise CapacityError("candidate family insufficient for decoding below "
                        f"{x} on this horizon")


@dataclass
class GazeboState:
    followers: dict[int, int] = field(default_factory=dict)  # beta idx -> alpha idx
    established: dict[int, tuple[int, int]] = field(default_factory=dict)
    obliterated: dict[int, int] = field(default_factory=dict)  # alpha idx -> stage
    next_fresh: int = 0
    emissions: list[tuple[tuple[int, int], int]] = field(default_factory=list)
    trace: list[dict] = field(default_factory=list)

    def is_dead(self, a: int, s: Optional[int] = None) -> bool:
        t = self.obliterated.get(a)
        return t is not None and (s is None or t <= s)


def gazebo_run(beta: Numbering) -> tuple[Numbering, GazeboState]:
    """Follower construction making the lex relation enumerable.

    Obliteration is triggered by any overtaking, in either index order; the
    emitted-pair cascade then takes down right-hand followers whose left
    partner died, and every affected index gets a fresh follower.
    """
    hz = beta.horizon
    n = beta.index_range
    ones = (1 << hz.bits) - 1
    finals = _stable_finals(beta)
    for i, f in enumerate(finals):
        if f.value == ones:
            raise InputError(f"catalog index {i} is the all-ones set")
        for j in range(i):
            if finals[j].value == f.value:
                raise InputError(f"catalog indices {j} and {i} coincide")

    state = GazeboState()
    for j in range(n):
        state.followers[j] = j
        state.established[j] = (j, 0)
    state.next_fresh = n
    emitted: set[tuple[int, int]] = set()

    def emit_stage(s: int) -> None:
        defined = state.next_fresh
        live_beta = {a: b for b, a in state.followers.items()
                     if not state.is_dead(a)}
        new = []
        for a in range(defined):
            for b in range(defined):
                if (a, b) in emitted:
                    continue
                if a == b or state.is_dead(b, s):
                    new.append((a, b))
                elif a in live_beta and b in live_beta:
                    if lex_cmp(beta.at(live_beta[a]).prefix(s),
                               beta.at(live_beta[b]).prefix(s)) != GREATER:
                        new.append((a, b))
        for p in new:
            emitted.add(p)
            state.emissions.append((p, s))

    emit_stage(0)
    state.trace.append({"stage": 0, "followers": dict(state.followers),
                        "obliterated": []})
    for s in range(1, hz.stages):
        killed: set[int] = set()
        for i in range(n):
            for j in range(n):
                if i == j:
                    continue
                prev = lex_cmp(beta.at(i).prefix(s - 1), beta.at(j).prefix(s - 1))
                cur = lex_cmp(beta.at(i).prefix(s), beta.at(j).prefix(s))
                if prev != GREATER and cur == GREATER:
                    # i overtook j: the follower of j and everything above go.
                    threshold = state.followers[j]
                    for a in range(threshold, state.next_fresh):
                        if not state.is_dead(a):
                            killed.add(a)
        # Cascade: an emitted pair with a dead left side must not outlive its
        # right side, or the comparison flips when the left goes all-ones.
        changed = True
        while changed:
            changed = False
            for (a, b) in emitted:
                a_dead = state.is_dead(a) or a in killed
                b_dead = state.is_dead(b) or b in killed
                if a_dead and not b_dead and a != b:
                    killed.add(b)
                    changed = True
        if killed:
            for a in killed:
                state.obliterated[a] = s
            for j in sorted(b for b, a in state.followers.items() if a in killed):
                state.followers[j] = state.next_fresh
                state.established[state.next_fresh] = (j, s)
                state.next_fresh += 1
        emit_stage(s)
        state.trace.append({"stage": s, "followers": dict(state.followers),
                            "obliterated": sorted(killed)})

    processes = []
    for a in range(state.next_fresh):
        i, t = state.established[a]
        o = state.obliterated.get(a, hz.stages)
        prefixes = []
        for s in range(hz.stages):
            if s < t:
                prefixes.append(Prefix.zeros(hz.bits))
            elif s < o:
                prefixes.append(beta.at(i).prefix(s))
            else:
                prefixes.append(Prefix.ones(hz.bits))
        processes.append(process_from_stage_prefixes(prefixes, hz, f"alpha-{a}"))
    return Numbering(processes, label="followers"), state


def gazebo_lex_emissions(state: GazeboState, alpha: Numbering) -> RelationOracle:
    """Package the run's emissions; every pair is lex-valid from its stage on."""
    return RelationOracle(tuple(state.emissions), "lex")


def check_persistence(oracle: RelationOracle, alpha: Numbering) -> Optional[tuple]:
    """First ((i, j), stage) whose comparison fails after emission, or None."""
    for (i, j), t in oracle.entries:
        for s in range(t, alpha.horizon.stages):
            if lex_cmp(alpha.at(i).prefix(s), alpha.at(j).prefix(s)) == GREATER:
                return ((i, j), s)
    return None
