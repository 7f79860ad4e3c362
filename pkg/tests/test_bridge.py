import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from streammem.bridge import (
    BridgeMemory,
    HeadGates,
    HeadSummaries,
    advance_bridge,
    bridge_norm,
    build_bridge,
    head_gates,
    prune_bridge,
)
from streammem.errors import ConfigurationError


def vec(*xs):
    return np.array(xs, dtype=np.float64)


def summaries(recent, sink):
    return HeadSummaries(recent=recent, sink=sink, layer_index=0, head_index=0)


def fresh_bridge(schedule="decayed", b=(1.0, 1.0)):
    s = summaries(vec(*b), vec(*b))
    return build_bridge(s, vec(0.0, 0.0), HeadGates(g_recent=0.0, g_sink=0.0), schedule)


class TestHeadGates:
    def test_negative_alignment_closes_gate(self):
        s = summaries(vec(-1, 0), vec(0, 1))
        gates = head_gates(s, vec(1, 0), rho=1.5)
        assert gates.g_recent == 0.0

    def test_aligned_gate_scales_with_rho(self):
        s = summaries(vec(2, 0), vec(0, 1))
        gates = head_gates(s, vec(1, 0), rho=0.5)
        assert gates.g_recent == 0.5

    def test_outer_clamp_engages(self):
        s = summaries(vec(1, 0), vec(1, 0))
        gates = head_gates(s, vec(1, 0), rho=2.0)
        assert gates.g_recent == 1.0 and gates.g_sink == 1.0

    def test_rho_out_of_range(self):
        s = summaries(vec(1, 0), vec(0, 1))
        for bad in (-0.1, 2.1):
            with pytest.raises(ConfigurationError):
                head_gates(s, vec(1, 0), rho=bad)

    @given(
        st.lists(st.floats(min_value=-50, max_value=50), min_size=3, max_size=3),
        st.lists(st.floats(min_value=-50, max_value=50), min_size=3, max_size=3),
        st.floats(min_value=0, max_value=2),
    )
    def test_gates_always_bounded(self, r, dp, rho):
        s = summaries(np.array(r), np.array(r))
        g = head_gates(s, np.array(dp), rho)
        assert 0.0 <= g.g_recent <= 1.0
        assert 0.0 <= g.g_sink <= 1.0


class TestBuildBridge:
    def test_closed_gate_keeps_summary(self):
        s = summaries(vec(3, -1), vec(0, 2))
        b = build_bridge(s, vec(9, 9), HeadGates(0.0, 0.0), "decayed")
        np.testing.assert_array_equal(b.bridge_recent, vec(3, -1))
        np.testing.assert_array_equal(b.bridge_sink, vec(0, 2))

    def test_open_gate_keeps_delta_perp(self):
        s = summaries(vec(3, -1), vec(0, 2))
        b = build_bridge(s, vec(9, 9), HeadGates(1.0, 1.0), "constant")
        np.testing.assert_array_equal(b.bridge_recent, vec(9, 9))
        np.testing.assert_array_equal(b.bridge_sink, vec(9, 9))

    def test_midpoint(self):
        s = summaries(vec(1, 0), vec(1, 0))
        b = build_bridge(s, vec(0, 1), HeadGates(0.5, 0.5), "one_shot")
        np.testing.assert_array_equal(b.bridge_recent, vec(0.5, 0.5))

    def test_fresh_state(self):
        b = fresh_bridge()
        assert b.scale == 1.0 and b.age_blocks == 0

    def test_unknown_schedule(self):
        s = summaries(vec(1, 0), vec(1, 0))
        with pytest.raises(ConfigurationError):
            build_bridge(s, vec(0, 1), HeadGates(0.5, 0.5), "sometimes")

    @given(
        st.floats(min_value=0, max_value=1),
        st.lists(st.floats(min_value=-20, max_value=20), min_size=2, max_size=2),
        st.lists(st.floats(min_value=-20, max_value=20), min_size=2, max_size=2),
    )
    def test_convexity(self, g, r, dp):
        r, dp = np.array(r), np.array(dp)
        b = build_bridge(summaries(r, r), dp, HeadGates(g, g), "decayed")
        bound = max(np.linalg.norm(r), np.linalg.norm(dp))
        assert np.linalg.norm(b.bridge_recent) <= bound + 1e-12


class TestAdvanceBridge:
    def test_decayed_lambda_one_only_ages(self):
        b = advance_bridge(fresh_bridge(), 1.0)
        np.testing.assert_array_equal(b.bridge_recent, vec(1, 1))
        assert b.age_blocks == 1 and b.scale == 1.0

    def test_decayed_lambda_zero_zeroes(self):
        b = advance_bridge(fresh_bridge(), 0.0)
        assert bridge_norm(b) == 0.0

    def test_decayed_twice_gives_lambda_squared(self):
        b = advance_bridge(advance_bridge(fresh_bridge(), 0.85), 0.85)
        assert b.scale == pytest.approx(0.7225, abs=1e-15)
        np.testing.assert_allclose(b.bridge_recent, vec(0.7225, 0.7225), rtol=1e-15)

    def test_constant_never_changes_vectors(self):
        b = fresh_bridge("constant")
        for _ in range(10):
            b = advance_bridge(b, 0.85)
        np.testing.assert_array_equal(b.bridge_recent, vec(1, 1))
        assert b.scale == 1.0 and b.age_blocks == 10

    def test_one_shot_dies_after_first_advance(self):
        b = advance_bridge(fresh_bridge("one_shot"), 0.85)
        assert b.scale == 0.0
        assert bridge_norm(b) == 0.0

    def test_lambda_out_of_range(self):
        with pytest.raises(ConfigurationError):
            advance_bridge(fresh_bridge(), 1.5)

    def test_scale_tracks_lambda_power(self):
        b = fresh_bridge()
        for age in range(1, 50):
            b = advance_bridge(b, 0.85)
            assert b.scale == pytest.approx(0.85**age, rel=1e-12)

    def test_decay_strictly_monotone(self):
        b = fresh_bridge()
        prev = bridge_norm(b)
        for _ in range(20):
            b = advance_bridge(b, 0.85)
            cur = bridge_norm(b)
            assert cur < prev
            prev = cur

    def test_lambda_one_equals_constant_schedule(self):
        dec, con = fresh_bridge("decayed"), fresh_bridge("constant")
        for _ in range(15):
            dec, con = advance_bridge(dec, 1.0), advance_bridge(con, 0.5)
            np.testing.assert_array_equal(dec.bridge_recent, con.bridge_recent)
            np.testing.assert_array_equal(dec.bridge_sink, con.bridge_sink)
            assert bridge_norm(dec) == bridge_norm(con)


class TestPruneBridge:
    def test_zero_scale_pruned(self):
        b = advance_bridge(fresh_bridge("one_shot"), 0.85)
        assert prune_bridge(b, 1e-3, initial_norm=2.0) is None

    def test_fresh_bridge_retained(self):
        b = fresh_bridge()
        assert prune_bridge(b, 1e-3, initial_norm=bridge_norm(b)) is b

    def test_pruned_after_43_advances_at_default_tolerance(self):
        # 0.85^42 ~ 1.08e-3 survives, 0.85^43 ~ 9.2e-4 crosses 1e-3
        b = fresh_bridge()
        initial = bridge_norm(b)
        for _ in range(42):
            b = advance_bridge(b, 0.85)
            assert prune_bridge(b, 1e-3, initial) is not None
        b = advance_bridge(b, 0.85)
        assert prune_bridge(b, 1e-3, initial) is None
        assert math.ceil(math.log(1e-3) / math.log(0.85)) == 43

    def test_bad_tolerance(self):
        with pytest.raises(ConfigurationError):
            prune_bridge(fresh_bridge(), 0.0, 1.0)


class TestZeroStrengthSwitch:
    def test_bridge_equals_raw_summaries_bitwise(self):
        r, s = vec(0.3, -0.7, 1.1), vec(-2.0, 0.5, 0.25)
        hs = summaries(r, s)
        gates = head_gates(hs, vec(1.0, 1.0, 1.0), rho=0.0)
        assert gates == HeadGates(0.0, 0.0)
        b = build_bridge(hs, vec(1.0, 1.0, 1.0), gates, "decayed")
        assert np.array_equal(b.bridge_recent, r)
        assert np.array_equal(b.bridge_sink, s)
