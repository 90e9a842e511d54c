import pytest

from labs.day05_qlog_blocklength.config import (
    DEFAULT_SEED,
    RunConfig,
    environment_values,
    format_number,
    load_config_file,
    parse_config_text,
    resolve_run_config,
)
from labs.day05_qlog_blocklength.errors import ConfigError


class TestRunConfig:
    def test_defaults_are_canonical_experiment(self):
        cfg = RunConfig()
        assert sorted(cfg.pmf().probs) == [0.11, 0.89]
        assert cfg.eps == 0.01
        assert list(cfg.n_values()) == list(range(20, 201))
        assert cfg.alpha_override is None
        assert cfg.seed == DEFAULT_SEED
        assert cfg.units == "nats"

    def test_step(self):
        assert list(RunConfig(n_min=10, n_max=30, n_step=10).n_values()) == [10, 20, 30]

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"pmf_spec": "0.5,0.6"},
            {"pmf_spec": "abc"},
            {"eps": 0.0},
            {"eps": 1.0},
            {"n_min": 0},
            {"n_min": 50, "n_max": 40},
            {"n_step": 0},
            {"alpha_override": float("nan")},
            {"seed": -1},
            {"seed": 2**64},
            {"samples": 0},
            {"units": "hartleys"},
            {"workers": 0},
        ],
    )
    def test_rejects_invalid(self, kwargs):
        with pytest.raises(ConfigError):
            RunConfig(**kwargs)


class TestConfigFile:
    def test_parse_with_comments_and_key_spellings(self):
        text = """
        # canonical run
        pmf = 0.2,0.8
        n-min = 5     # short sweep
        n_max=9
        nstep = 2
        eps = 0.05
        alpha = -0.5
        """
        values = parse_config_text(text)
        assert values == {
            "pmf_spec": "0.2,0.8",
            "n_min": 5,
            "n_max": 9,
            "n_step": 2,
            "eps": 0.05,
            "alpha_override": -0.5,
        }

    @pytest.mark.parametrize("text", ["colour = red", "eps 0.1", "n-min = five"])
    def test_rejects_bad_lines(self, text):
        with pytest.raises(ConfigError, match="<config>:1"):
            parse_config_text(text)

    def test_load_file(self, tmp_path):
        path = tmp_path / "run.conf"
        path.write_text("samples = 5000\nunits = bits\n", encoding="utf-8")
        assert load_config_file(path) == {"samples": 5000, "units": "bits"}

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="Cannot read"):
            load_config_file(tmp_path / "absent.conf")


class TestResolve:
    def test_flags_override_file(self, tmp_path):
        path = tmp_path / "run.conf"
        path.write_text("eps = 0.05\nn-min = 30\nn-max = 40\n", encoding="utf-8")
        cfg = resolve_run_config({"eps": 0.2, "n_min": None}, str(path))
        assert cfg.eps == 0.2
        assert cfg.n_min == 30
        assert cfg.n_max == 40

    def test_ignores_unset_and_foreign_keys(self, monkeypatch):
        monkeypatch.delenv("QBLOCK_SEED", raising=False)
        cfg = resolve_run_config({"command": "sweep", "verbose": False, "seed": None, "n_max": 25})
        assert cfg.seed == DEFAULT_SEED
        assert cfg.n_max == 25

    def test_environment_below_file_and_flags(self, monkeypatch, tmp_path):
        monkeypatch.setenv("QBLOCK_SEED", "7")
        monkeypatch.setenv("QBLOCK_SAMPLES", "5000")
        monkeypatch.setenv("QBLOCK_WORKERS", "3")
        path = tmp_path / "run.conf"
        path.write_text("samples = 6000\n", encoding="utf-8")
        cfg = resolve_run_config({"workers": 2}, str(path))
        assert (cfg.seed, cfg.samples, cfg.workers) == (7, 6000, 2)

    def test_empty_environment_value_is_unset(self, monkeypatch):
        monkeypatch.setenv("QBLOCK_SAMPLES", "")
        assert environment_values().get("samples") is None

    @pytest.mark.parametrize("name", ["QBLOCK_SEED", "QBLOCK_SAMPLES", "QBLOCK_WORKERS"])
    def test_malformed_environment_value(self, monkeypatch, name):
        monkeypatch.setenv(name, "abc")
        with pytest.raises(ConfigError, match=name):
            resolve_run_config({})

    def test_invalid_merged_values(self):
        with pytest.raises(ConfigError):
            resolve_run_config({"n_min": 100, "n_max": 50})


class TestFormatNumber:
    @pytest.mark.parametrize(
        "value, text",
        [(1.0, "1"), (0.1, "0.1"), (4.41454983046, "4.41454983046"), (1 / 3, "0.333333333333")],
    )
    def test_twelve_significant_digits(self, value, text):
        assert format_number(value) == text
