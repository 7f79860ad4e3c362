import pytest

from streammem.config import load_sim_config, parse_sim_config
from streammem.errors import ConfigurationError


class TestDefaults:
    def test_none_gives_defaults(self):
        sim = parse_sim_config(None)
        assert sim.seed == 0
        assert sim.engine.layers == 2 and sim.engine.heads == 4
        assert sim.engine.value_dim == 16
        assert sim.engine.sink_frames == 3 and sim.engine.frames_per_block == 3
        assert sim.engine.window.w_min == 7 and sim.engine.window.w_max == 12
        assert sim.engine.window.tau_post == 18.0 and sim.engine.window.tau_pre == 9.0
        assert sim.engine.anchors.alpha == 0.35
        assert sim.engine.anchors.recent_frames == 6
        assert sim.engine.anchors.max_anchors == 4
        assert sim.engine.anchors.injection_scale == 0.8
        assert sim.engine.bridge_lambda == 0.85
        assert sim.schedule.boundaries == (40, 80, 120, 160, 200)
        assert sim.schedule.total_frames == 240

    def test_empty_mapping_gives_defaults(self):
        assert parse_sim_config({}) == parse_sim_config(None)


class TestOverrides:
    def test_nested_override(self):
        sim = parse_sim_config(
            {
                "seed": 42,
                "engine": {
                    "layers": 1,
                    "window": {"w_min": 4, "w_max": 9},
                    "anchors": {"alpha": 0.5},
                },
                "schedule": {"boundaries": [10, 20], "total_frames": 30},
            }
        )
        assert sim.seed == 42
        assert sim.engine.layers == 1
        assert sim.engine.window.w_min == 4 and sim.engine.window.w_max == 9
        assert sim.engine.anchors.alpha == 0.5
        assert sim.schedule.boundaries == (10, 20)

    def test_injection_modes(self):
        for mode in ("one_shot", "constant", "decayed", "off"):
            sim = parse_sim_config({"engine": {"bridge_schedule": mode}})
            assert sim.engine.bridge_schedule == mode


class TestRejection:
    def test_unknown_top_key(self):
        with pytest.raises(ConfigurationError) as err:
            parse_sim_config({"sneed": 1})
        assert "sneed" in str(err.value)

    def test_unknown_nested_key_names_path(self):
        with pytest.raises(ConfigurationError) as err:
            parse_sim_config({"engine": {"window": {"w_mid": 9}}})
        assert "engine.window.w_mid" in str(err.value)

    def test_wrong_type(self):
        with pytest.raises(ConfigurationError):
            parse_sim_config({"seed": "abc"})

    def test_bool_is_not_an_int(self):
        with pytest.raises(ConfigurationError):
            parse_sim_config({"engine": {"layers": True}})

    def test_bad_boundaries_type(self):
        with pytest.raises(ConfigurationError):
            parse_sim_config({"schedule": {"boundaries": "10,20"}})

    def test_non_mapping_document(self):
        with pytest.raises(ConfigurationError):
            parse_sim_config([1, 2, 3])

    def test_invalid_value_propagates(self):
        with pytest.raises(ConfigurationError):
            parse_sim_config({"engine": {"bridge_lambda": 1.5}})


class TestFileLoading:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "sim.yaml"
        path.write_text(
            "seed: 5\n"
            "signature_separation: 0.5\n"
            "engine:\n"
            "  heads: 2\n"
            "  window: {w_min: 6, w_max: 10}\n"
            "schedule:\n"
            "  boundaries: [12]\n"
            "  total_frames: 24\n"
        )
        sim = load_sim_config(str(path))
        assert sim.seed == 5
        assert sim.signature_separation == 0.5
        assert sim.engine.heads == 2
        assert sim.schedule.total_frames == 24

    def test_missing_file(self):
        with pytest.raises(ConfigurationError):
            load_sim_config("/nonexistent/sim.yaml")

    def test_invalid_yaml(self, tmp_path):
        path = tmp_path / "broken.yaml"
        path.write_text("engine: [unclosed\n")
        with pytest.raises(ConfigurationError):
            load_sim_config(str(path))

    def test_empty_file_gives_defaults(self, tmp_path):
        path = tmp_path / "empty.yaml"
        path.write_text("")
        assert load_sim_config(str(path)) == parse_sim_config(None)

    def test_none_path_gives_defaults(self):
        assert load_sim_config(None) == parse_sim_config(None)
