import json

import numpy as np
import pytest

from tandemax.cli import ConfigError, main, parse_config, run, validate
from tandemax.engine import simulate_serial
from tandemax.models import TandemSpec
from tandemax.sources import (
    ServiceTimeSource,
    SourceConfigError,
    cell_uniform01,
    dump_trace,
    load_trace,
)


def make_config(**overrides):
    doc = {
        "variant": "open_infinite",
        "n": 3,
        "K": 10,
        "source": {"kind": "constant", "value": 1.0},
    }
    doc.update(overrides)
    return json.dumps(doc)


class TestParseConfig:
    def test_minimal(self):
        config = parse_config(make_config())
        assert config.spec == TandemSpec("open_infinite", 3, 10)
        assert config.strategy == "serial"
        assert config.measures == ("departures",)

    def test_closed_c2_arity(self):
        config = parse_config(make_config(variant="closed", n=2, c=2))
        assert config.spec.arity == 4

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError, match="bogus"):
            parse_config(make_config(bogus=1))
        with pytest.raises(ConfigError, match="source"):
            parse_config(make_config(source={"kind": "constant", "oops": 2}))

    def test_missing_key_rejected(self):
        with pytest.raises(ConfigError, match="'K'"):
            parse_config(json.dumps({"variant": "closed", "n": 2,
                                     "source": {"kind": "constant"}}))

    def test_type_mismatch_rejected(self):
        with pytest.raises(ConfigError, match="'n'"):
            parse_config(make_config(n="three"))

    def test_incompatible_strategy_rejected(self):
        with pytest.raises(ConfigError, match="sparse-closed"):
            parse_config(make_config(variant="open_mfg", b=0, strategy="sparse-closed"))

    def test_closed_measures_restricted(self):
        with pytest.raises(ConfigError):
            parse_config(make_config(variant="closed", n=2, measures=["sojourn"]))

    def test_invalid_json(self):
        with pytest.raises(ConfigError, match="JSON"):
            parse_config("{nope")


class TestPortableGenerator:
    def test_sample_matches_per_cell_derivation(self):
        src = ServiceTimeSource(kind="uniform", low=0.0, high=1.0, seed=42)
        tau = src.sample(3, 4).tau
        for i in range(1, 4):
            for k in range(1, 5):
                assert tau[i - 1, k - 1] == cell_uniform01(42, i, k)

    def test_range_and_spread(self):
        us = [cell_uniform01(7, i, k) for i in range(1, 20) for k in range(1, 20)]
        assert all(0 <= u < 1 for u in us)
        assert 0.4 < sum(us) / len(us) < 0.6

    def test_sample_reproducible(self):
        src = ServiceTimeSource(kind="exponential", rate=2.0, seed=99)
        assert np.array_equal(src.sample(4, 6).tau, src.sample(4, 6).tau)

    def test_integer_mode(self):
        src = ServiceTimeSource(kind="uniform", low=0, high=9, seed=1, integer_times=True)
        tau = src.sample(3, 5).tau
        assert np.array_equal(tau, np.rint(tau))

    def test_source_validation(self):
        with pytest.raises(SourceConfigError):
            ServiceTimeSource(kind="nope")
        with pytest.raises(SourceConfigError):
            ServiceTimeSource(kind="exponential", rate=0.0)
        with pytest.raises(SourceConfigError):
            ServiceTimeSource(kind="trace")


class TestTrace:
    def test_round_trip_identical_trajectory(self, tmp_path):
        src = ServiceTimeSource(kind="uniform", low=0, high=5, seed=3)
        tau = src.sample(2, 4)
        path = tmp_path / "trace.csv"
        dump_trace(tau, path)
        reloaded = load_trace(path, 2, 4)
        assert np.array_equal(tau.tau, reloaded.tau)
        spec = TandemSpec("open_infinite", 2, 4)
        assert np.array_equal(
            simulate_serial(spec, tau).states, simulate_serial(spec, reloaded).states
        )

    def test_small_file(self, tmp_path):
        path = tmp_path / "t.csv"
        path.write_text("k,i,tau\n1,1,1\n1,2,2\n2,1,3\n2,2,4\n")
        tau = load_trace(path, 2, 2)
        assert tau.tau.tolist() == [[1, 3], [2, 4]]

    def test_missing_cell_named(self, tmp_path):
        path = tmp_path / "t.csv"
        path.write_text("k,i,tau\n1,1,1\n1,2,2\n2,2,4\n")
        with pytest.raises(SourceConfigError, match=r"\(k=2, i=1\)"):
            load_trace(path, 2, 2)

    def test_duplicate_rejected(self, tmp_path):
        path = tmp_path / "t.csv"
        path.write_text("k,i,tau\n1,1,1\n1,1,2\n")
        with pytest.raises(SourceConfigError, match="duplicate"):
            load_trace(path, 1, 1)

    def test_negative_rejected(self, tmp_path):
        path = tmp_path / "t.csv"
        path.write_text("k,i,tau\n1,1,-1\n")
        with pytest.raises(SourceConfigError, match=">= 0"):
            load_trace(path, 1, 1)

    def test_bad_header(self, tmp_path):
        path = tmp_path / "t.csv"
        path.write_text("a,b,c\n")
        with pytest.raises(SourceConfigError, match="header"):
            load_trace(path, 1, 1)


class TestRun:
    def test_departures_csv(self, tmp_path):
        out = tmp_path / "dep.csv"
        config = parse_config(
            make_config(n=2, K=3, output=str(out),
                        source={"kind": "constant", "value": 1.0})
        )
        # n=2 constant interarrival 1, service 1
        assert run(config) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "k,d_1,d_2"
        assert lines[1] == "1,1,2"

    def test_hand_case_csv(self, tmp_path):
        out = tmp_path / "dep.csv"
        trace = tmp_path / "trace.csv"
        rows = ["k,i,tau"]
        for k in range(1, 4):
            rows.append(f"{k},1,1")
            rows.append(f"{k},2,2")
        trace.write_text("\n".join(rows) + "\n")
        config = parse_config(
            make_config(n=2, K=3, output=str(out),
                        source={"kind": "trace", "path": str(trace)})
        )
        run(config)
        assert out.read_text().splitlines()[1:] == ["1,1,3", "2,2,5", "3,3,7"]

    def test_measures_and_ops(self, tmp_path, capsys):
        out = tmp_path / "r.csv"
        config = parse_config(
            make_config(n=2, K=3, output=str(out),
                        measures=["departures", "sojourn", "waiting"],
                        count_ops=True)
        )
        run(config)
        assert (tmp_path / "r_sojourn.csv").exists()
        assert (tmp_path / "r_waiting.csv").exists()
        report = (tmp_path / "r_ops.txt").read_text()
        assert "scalar_otimes" in report and "speedup formula" in report

    def test_validate_ok(self, capsys):
        config = parse_config(
            make_config(source={"kind": "uniform", "low": 0, "high": 5,
                                "seed": 1, "integer_times": True})
        )
        assert validate(config, trials=5) == 0


class TestMainExitCodes:
    def test_success(self, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text(make_config(output=str(tmp_path / "d.csv")))
        assert main(["simulate", "--config", str(cfg)]) == 0

    def test_config_error_is_2(self, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text(make_config(variant="open_mfg", b=0, strategy="sparse-closed"))
        assert main(["simulate", "--config", str(cfg)]) == 2

    def test_io_error_is_3(self, tmp_path):
        assert main(["simulate", "--config", str(tmp_path / "missing.json")]) == 3

    def test_validate_mismatch_is_1(self, tmp_path, monkeypatch):
        # force a mismatch by corrupting the oracle
        import tandemax.cli as cli

        cfg = tmp_path / "c.json"
        cfg.write_text(make_config())
        real = cli.oracle_lindley

        def corrupted(spec, tau):
            traj = real(spec, tau)
            states = traj.states.copy()
            states[1, 0] += 1
            traj.states = states
            return traj

        monkeypatch.setattr(cli, "oracle_lindley", corrupted)
        assert main(["validate", "--config", str(cfg), "--trials", "1"]) == 1

    def test_bench(self, tmp_path):
        out = tmp_path / "bench.csv"
        assert main(["bench", "--n-list", "2,3", "--k-list", "5",
                     "--p-list", "1,2", "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0].startswith("n,K,P,L")
        assert len(lines) == 1 + 2 * 1 * 2
