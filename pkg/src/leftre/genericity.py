"""Desk-scale genericity: forcing, interval functions, indifference checks.

Requirements are finite enumeration schedules of binary-string codes.  A
string satisfies requirement e if one of its prefixes has been enumerated or
if no enumerated string properly extends it; extension search is bounded by
the bit horizon, which is the computable surrogate for the unbounded side of
the definition.  A generic prefix is forced deterministically (least
witnessing extension first), an interval function is read off from the least
satisfying segment lengths, and indifference of a marker set is verified by
exhaustively re-checking every variant that differs from the forced prefix
only on marker positions.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Optional, Sequence

from .core import (CapacityError, Horizon, InputError, LimitFunctionApprox,
                   Prefix, Schedule, UsageError)
from .markers import MarkerSystem, build_retraceable


def string_code(s: str) -> int:
    """Number of a binary string in length-lexicographic order (empty string is 0)."""
    if any(c not in "01" for c in s):
        raise UsageError("string must be binary")
    return int("1" + s, 2) - 1


def code_string(n: int) -> str:
    if n < 0:
        raise UsageError("string codes are naturals")
    return bin(n + 1)[3:]


@dataclass(frozen=True)
class RequirementList:
    reqs: tuple[Schedule, ...]

    def __post_init__(self) -> None:
        for W in self.reqs:
            if W.kind != "re-set":
                raise InputError("requirement schedules must be enumeration schedules")

    @property
    def count(self) -> int:
        return len(self.reqs)

    def strings_at(self, e: int, s: Optional[int]) -> frozenset[str]:
        W = self.reqs[e]
        codes = W.final_members() if s is None else W.members_at(s)
        return frozenset(code_string(c) for c in codes)

    def validate_within(self, bits: int) -> None:
        for e in range(self.count):
            for w in self.strings_at(e, None):
                if len(w) > bits:
                    raise InputError(
                        f"requirement {e} contains a string longer than the horizon")

    @classmethod
    def from_strings(cls, groups: Sequence[Sequence[str]]) -> "RequirementList":
        reqs = []
        for strings in groups:
            reqs.append(Schedule.from_pairs(
                [(string_code(w), 0) for w in strings], "re-set"))
        return cls(tuple(reqs))


def _sat(rho: str, strings: frozenset[str], bits: int) -> bool:
    if any(rho[:k] in strings for k in range(len(rho) + 1)):
        return True
    return not any(len(w) > len(rho) and len(w) <= bits and w.startswith(rho)
                   for w in strings)


def requirement_satisfied(rho: Prefix, W: Schedule, s: Optional[int], bits: int) -> bool:
    """True iff a prefix of rho has been enumerated by stage s, or no
    enumerated string of length <= bits properly extends rho."""
    codes = W.final_members() if s is None else W.members_at(s)
    strings = frozenset(code_string(c) for c in codes)
    return _sat(rho.to_string(), strings, bits)


def prefix_meets_requirement(X: Prefix, strings: frozenset[str], bits: int) -> bool:
    """True iff some proper-length initial segment of X settles the requirement."""
    x = X.to_string()
    return any(_sat(x[:k], strings, bits) for k in range(min(len(x), bits)))


def force_generic_prefix(Ws: RequirementList, bits: int,
                         s: Optional[int] = None) -> Prefix:
    """Force a prefix meeting every requirement, least witnessing extension first."""
    Ws.validate_within(bits)
    rho = ""
    for e in range(Ws.count):
        strings = Ws.strings_at(e, s)
        if any(rho[:k] in strings for k in range(len(rho) + 1)):
            continue
        extensions = sorted(
            (w for w in strings if len(w) >= len(rho) and w.startswith(rho)
             and len(w) <= bits),
            key=lambda w: (len(w), w))
        if extensions:
            rho = extensions[0]
        # Otherwise no enumerated string extends rho: vacuously settled.
    forced = Prefix.from_string(rho).padded(bits)
    for e in range(Ws.count):
        if not prefix_meets_requirement(forced, Ws.strings_at(e, s), bits):
            raise CapacityError(
                f"horizon of {bits} bits exhausted while forcing requirement {e}")
    return forced


def least_satisfying_end(sigma: str, A: Prefix, strings: frozenset[str],
                         bits: int) -> int:
    """Least c >= |sigma| such that sigma followed by A's bits through c
    settles the requirement; capacity error if no c exists on the horizon."""
    a = A.to_string()
    for c in range(len(sigma), len(a)):
        tau = sigma + a[len(sigma):c + 1]
        if _sat(tau, strings, bits):
            return c
    raise CapacityError("no satisfying segment end within the bit horizon")


def interval_function_values(A: Prefix, Ws: RequirementList, levels: int) -> list[int]:
    """f(0)=0; each next value covers the worst segment end over all prefixed
    strings and requirement indices bounded by the previous value.  Strictly
    increasing by construction (empty bound sets advance by one)."""
    bits = A.length
    f = [0]
    cache: dict[tuple[str, int], int] = {}
    for _ in range(levels):
        bound = f[-1]
        worst = 0
        for e in range(min(bound + 1, Ws.count)):
            strings = Ws.strings_at(e, None)
            for length in range(bound + 1):
                for sig_bits in product("01", repeat=length):
                    sigma = "".join(sig_bits)
                    key = (sigma, e)
                    if key not in cache:
                        cache[key] = least_satisfying_end(sigma, A, strings, bits)
                    worst = max(worst, cache[key])
        nxt = max(bound + 1, worst)
        if nxt >= bits:
            raise CapacityError(
                f"interval function exceeds the bit horizon at level {len(f)}")
        f.append(nxt)
    return f


def build_interval_function(A: Prefix, Ws: RequirementList, levels: int,
                            stages: int) -> LimitFunctionApprox:
    return LimitFunctionApprox.from_final_values(
        interval_function_values(A, Ws, levels), stages)


def intervals_from_values(f: Sequence[int]) -> list[range]:
    """J_k runs from f(k)+1 through f(k+1), inclusive."""
    return [range(f[k] + 1, f[k + 1] + 1) for k in range(len(f) - 1)]


@dataclass
class GenericPlan:
    A: Prefix
    f_values: list[int]
    J: list[range]
    markers: MarkerSystem
    Ws: RequirementList

    def marker_free_intervals(self, k_bound: int) -> list[int]:
        s = self.markers.final_stage()
        out = []
        for k, J in enumerate(self.J):
            if k >= k_bound:
                break
            if all(self.markers.removed(p, s) for p in J):
                out.append(k)
        return out


def build_generic_plan(Ws: RequirementList, bits: int, levels: int,
                       horizon: Horizon) -> GenericPlan:
    """Full pipeline: force a prefix, read off the interval function, and build
    markers dominating every second interval bound."""
    if levels % 2 != 0:
        raise UsageError("levels must be even to double the interval bounds")
    A = force_generic_prefix(Ws, bits)
    f = interval_function_values(A, Ws, levels)
    # The +1 keeps domination strict even at f(0) = 0: a value of 0 never
    # changes in the stage approximation, so its marker would sit at 0 exactly.
    doubled = [f[2 * n] + 1 for n in range(levels // 2 + 1)]
    if max(doubled) + 2 >= horizon.stages:
        raise CapacityError("stage horizon too small for the marker construction")
    approx = LimitFunctionApprox.from_final_values(doubled, horizon.stages)
    markers = build_retraceable(approx, horizon)
    return GenericPlan(A, f, intervals_from_values(f), markers, Ws)


@dataclass(frozen=True)
class IndifferenceReport:
    ok: bool
    positions: tuple[int, ...]
    variants_checked: int
    failures: tuple[tuple[str, int], ...]  # (variant as bit string, failing index)


def verify_indifference(A: Prefix, I: MarkerSystem, Ws: RequirementList,
                        e_bound: int, cap: int = 12,
                        positions: Optional[Sequence[int]] = None) -> IndifferenceReport:
    """Exhaustively check every variant of A supported on the marker set.

    Variants assign arbitrary bits to the surviving marker positions below the
    prefix length; each must still settle requirements 0..e_bound.
    """
    if positions is None:
        s = I.final_stage()
        positions = [p for p in range(A.length) if not I.removed(p, s)]
    positions = tuple(positions)
    if len(positions) > cap:
        raise CapacityError(
            f"{len(positions)} free positions exceed the exhaustive cap of {cap}; "
            "sample instead")
    e_top = min(e_bound, Ws.count - 1)
    string_sets = [Ws.strings_at(e, None) for e in range(e_top + 1)]
    failures: list[tuple[str, int]] = []
    checked = 0
    for assignment in product((0, 1), repeat=len(positions)):
        value = A.value
        for p, b in zip(positions, assignment):
            mask = 1 << (A.length - 1 - p)
            value = (value | mask) if b else (value & ~mask)
        X = Prefix(A.length, value)
        checked += 1
        for e in range(e_top + 1):
            if not prefix_meets_requirement(X, string_sets[e], A.length):
                failures.append((X.to_string(), e))
                break
    return IndifferenceReport(not failures, positions, checked, tuple(failures))
