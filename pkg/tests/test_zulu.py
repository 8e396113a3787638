import pytest
from hypothesis import given, settings, strategies as st

from leftre.core import (Horizon, InputError, Prefix, Schedule,
                         validate_left_re)
from leftre.fixtures import (omega_fixture, omega_worked_example,
                             one_per_stage_schedule, random_leftre_process)
from leftre.zulu import (BlockLayout, ZuluState, btt_check, build_maximal,
                         build_minimal, compute_c, lowerfarm_witness,
                         max_join_gadget, maxsep_superset, split_subset,
                         split_superset, tilde_set)

HZ = Horizon(64, 128)
LAYOUT = BlockLayout(3)


def formula_eval(omega_bits: str, n: int, layout: BlockLayout):
    """Independent evaluator: marker positions straight from the definitions,
    computed from an explicit bit string rather than a schedule."""
    def c(k):
        return sum((1 << ((1 << k) - m)) * int(omega_bits[m])
                   for m in range(1 << k) if m < len(omega_bits))
    base = 1 << (1 << n)
    half = 1 << (1 << (n - 1))
    d = c(n) - half * c(n - 1)
    a = layout.offset(n) + c(n - 1) * base + (base - 1 - d)
    lo, hi = layout.interval(n)
    return a, hi + lo - a


class TestLayout:
    def test_intervals_tile_from_zero(self):
        assert LAYOUT.interval(1) == (0, 16)
        assert LAYOUT.interval(2) == (17, 273)
        for n in (1, 2):
            assert LAYOUT.interval(n + 1)[0] == LAYOUT.interval(n)[1] + 1

    def test_spare_slot_outside_pairing_range(self):
        _, hi = LAYOUT.interval(1)
        assert not LAYOUT.in_pairing_range(hi)
        assert LAYOUT.in_pairing_range(hi - 1)

    def test_mirror_is_involution(self):
        for u in range(0, 270, 7):
            assert LAYOUT.mirror(LAYOUT.mirror(u)) == u
            assert LAYOUT.interval_of(LAYOUT.mirror(u)) == LAYOUT.interval_of(u)

    def test_interval_of(self):
        assert LAYOUT.interval_of(0) == 1
        assert LAYOUT.interval_of(17) == 2
        assert LAYOUT.interval_of(10 ** 12) is None


class TestWorkedExample:
    """The settled history 0100... : every value below recomputed by the
    independent formula evaluator."""

    def test_marker_values(self):
        st_ = ZuluState(omega_worked_example(), LAYOUT)
        assert (st_.a(1, 1), st_.b(1, 1)) == (1, 15)
        assert st_.a(2, 2) == 17 + 2 * 16 + 15

    def test_against_formula_evaluator(self):
        st_ = ZuluState(omega_worked_example(), LAYOUT)
        for n in (1, 2, 3):
            a, b = formula_eval("0100", n, LAYOUT)
            assert (st_.a(n, 5), st_.b(n, 5)) == (a, b)

    def test_block_sums(self):
        om = omega_worked_example()
        assert compute_c(om, 1, 1) == 2
        assert compute_c(om, 2, 1) == 8
        assert compute_c(om, 1, 0) == 0


class TestMinimalMaximal:
    @pytest.mark.parametrize("seed", [0, 3, 9])
    def test_validators(self, seed):
        om = omega_fixture(seed, HZ, top_bit=7)
        assert validate_left_re(build_minimal(om, LAYOUT, HZ)).ok
        assert validate_left_re(build_maximal(om, LAYOUT, HZ)).ok

    @pytest.mark.parametrize("seed", [0, 3, 9])
    def test_exactly_one_per_covered_interval(self, seed):
        om = omega_fixture(seed, HZ, top_bit=7)
        A = build_minimal(om, LAYOUT, HZ)
        B = build_maximal(om, LAYOUT, HZ)
        for s in range(1, HZ.stages, 5):
            for n in range(1, min(s, LAYOUT.n_cap) + 1):
                lo, hi = LAYOUT.interval(n)
                if hi - lo > 4000:
                    continue
                assert sum(A.bit(s, u) for u in range(lo, hi + 1)) == 1
                assert sum(1 - B.bit(s, u) for u in range(lo, hi + 1)) == 1

    @pytest.mark.parametrize("seed", [0, 3, 9])
    def test_btt_link(self, seed):
        om = omega_fixture(seed, HZ, top_bit=7)
        A = build_minimal(om, LAYOUT, HZ)
        B = build_maximal(om, LAYOUT, HZ)
        report = btt_check(A, B, LAYOUT, seed=seed)
        assert report.ok, report

    def test_bit0_entry_rejected(self):
        bad = Schedule.from_pairs([(0, 2)], "omega-bits")
        with pytest.raises(InputError):
            build_minimal(bad, LAYOUT, HZ)

    def test_static_history_static_markers(self):
        om = Schedule.from_pairs([], "omega-bits")
        st_ = ZuluState(om, LAYOUT)
        assert st_.a(1, 1) == st_.a(1, 40)
        # Empty history: d = 0, so the marker sits at the pairing maximum.
        assert st_.a(1, 1) == LAYOUT.pair(1, 0, 3)


class TestMaxsep:
    @settings(deadline=None, max_examples=10)
    @given(st.integers(0, 10 ** 6))
    def test_random_schedules(self, seed):
        A = one_per_stage_schedule(seed, HZ)
        E = maxsep_superset(A, HZ)
        assert validate_left_re(E).ok
        final_a = A.final_members()
        final_e = E.final_prefix().members()
        assert final_a < final_e
        comp = [x for x in range(HZ.bits) if x not in final_a]
        for rank, x in enumerate(comp):
            assert (x in final_e) == (rank % 2 == 1)

    def test_singleton_example(self):
        A = Schedule.from_pairs([(0, 0)])
        E = maxsep_superset(A, HZ)
        members = E.final_prefix().members()
        assert 0 in members
        assert all((x in members) == (x % 2 == 0) for x in range(HZ.bits))

    def test_two_in_one_stage_rejected(self):
        with pytest.raises(InputError):
            maxsep_superset(Schedule.from_pairs([(1, 0), (2, 0), (3, 1)]), HZ)

    def test_gap_stage_rejected(self):
        with pytest.raises(InputError):
            maxsep_superset(Schedule.from_pairs([(1, 0), (2, 2)]), HZ)


def odd_process(seed):
    half = one_per_stage_schedule(seed, Horizon(HZ.stages, HZ.bits // 2))
    return Schedule.from_pairs(
        [(2 * x + 1, s) for x, s in half.entries]).as_process(HZ)


class TestSplit:
    @pytest.mark.parametrize("seed", [1, 4])
    def test_alternation(self, seed):
        A = odd_process(seed)
        E = split_subset(A)
        assert validate_left_re(E).ok
        members = sorted(A.final_prefix().members())
        final_e = E.final_prefix().members()
        for k, m in enumerate(members):
            assert (m in final_e) == (k % 2 == 0)
            assert (m - 1 in final_e) == (k % 2 == 1)

    def test_even_member_rejected(self):
        A = Schedule.from_pairs([(2, 0)]).as_process(HZ)
        with pytest.raises(InputError):
            split_subset(A)

    @pytest.mark.parametrize("seed", [1, 4])
    def test_superset_dual(self, seed):
        # Starts as the evens and absorbs odd elements one at a time, so the
        # all-odd complement shrinks and the process is lex-monotone.
        half = one_per_stage_schedule(seed, Horizon(HZ.stages, HZ.bits // 2))
        N = HZ.bits
        evens = Prefix.from_set(range(0, N, 2), N).value
        odd_sched = Schedule.from_pairs([(2 * x + 1, s) for x, s in half.entries])
        from leftre.core import ApproxProcess
        B = ApproxProcess(
            lambda s, n: 1 if n % 2 == 0 else odd_sched.bit(n, s), HZ, "dual",
            prefix_fn=lambda s: evens
            | Prefix.from_set(odd_sched.members_at(s), N).value)
        F = split_superset(B)
        assert validate_left_re(F).ok
        non = [n for n in range(N) if n not in B.final_prefix().members()]
        f_final = F.final_prefix().members()
        for k, m in enumerate(non):
            assert (m not in f_final) == (k % 2 == 0)
            assert (m - 1 not in f_final) == (k % 2 == 1)


class TestLowerfarm:
    def test_window_witness(self):
        B = random_leftre_process(2, HZ, head_zeros=8)
        R = frozenset({0, 2, 4})
        E = lowerfarm_witness(B, R)
        assert validate_left_re(E).ok
        assert R <= E.final_prefix().members()

    def test_overlapping_fixed_set_rejected(self):
        B = random_leftre_process(2, HZ, head_zeros=8)
        member = min(B.final_prefix().members())
        with pytest.raises(InputError):
            lowerfarm_witness(B, frozenset({member}))


class TestTilde:
    def test_validator_and_coding(self):
        om = omega_fixture(3, HZ, top_bit=7)
        A = build_minimal(om, LAYOUT, HZ)
        W = Schedule.from_pairs([(1, 2)])
        T = tilde_set(A, W, LAYOUT)
        assert validate_left_re(T).ok
        s = HZ.stages - 1
        st_ = ZuluState(om, LAYOUT)
        a1 = st_.a(1, s)
        # Interval 1 is enumerated: member contributes its 3x leg only.
        assert T.bit(s, 3 * a1) == 1
        assert T.bit(s, 3 * a1 + 1) == 0
        a2 = st_.a(2, s)
        # Interval 2 is not: the complementary legs appear instead.
        assert T.bit(s, 3 * a2) == 0
        assert T.bit(s, 3 * a2 + 1) == 1

    def test_subset_form_drops_third_leg(self):
        om = omega_fixture(3, HZ, top_bit=7)
        A = build_minimal(om, LAYOUT, HZ)
        T = tilde_set(A, Schedule.from_pairs([]), LAYOUT, subset_form=True)
        s = HZ.stages - 1
        a1 = ZuluState(om, LAYOUT).a(1, s)
        assert T.bit(s, 3 * a1 + 2) == 0


class TestJoinGadget:
    def test_interleaving(self):
        om = omega_fixture(3, HZ, top_bit=7)
        B = build_maximal(om, LAYOUT, HZ)
        W = Schedule.from_pairs([(2, 1), (5, 3)])
        J = max_join_gadget(B, W)
        assert validate_left_re(J).ok
        s = HZ.stages - 1
        assert J.bit(s, 2 * 2 + 1) == 1 and J.bit(s, 2 * 3 + 1) == 0
        assert J.bit(s, 4) == B.bit(s, 2)
