import json
from fractions import Fraction

import pytest

from pcl.cli import main
from pcl.core import concept_class, uniform_on
from pcl.learners import CompressionOutput
from pcl.serialize import (
    FormatError,
    class_from_dict,
    class_to_dict,
    compression_from_dict,
    compression_to_dict,
    distribution_from_dict,
    distribution_to_dict,
    sample_from_list,
)


@pytest.fixture
def class_file(tmp_path):
    path = tmp_path / "class.json"
    path.write_text(json.dumps({"domain_size": 3, "concepts": ["000", "111"]}))
    return str(path)


@pytest.fixture
def sample_file(tmp_path):
    path = tmp_path / "sample.json"
    path.write_text(json.dumps([[0, 1], [1, 1], [2, 1]]))
    return str(path)


class TestSerialize:
    def test_class_round_trip(self):
        cls = concept_class(3, ["01*", "1*0"])
        rebuilt, names = class_from_dict(class_to_dict(cls, names=["a", "b", "c"]))
        assert rebuilt == cls
        assert names == ["a", "b", "c"]

    def test_bad_concept_char_named(self):
        with pytest.raises(FormatError, match="class"):
            class_from_dict({"domain_size": 2, "concepts": ["0x"]})

    def test_missing_field_named(self):
        with pytest.raises(FormatError, match="domain_size"):
            class_from_dict({"concepts": ["01"]})

    def test_distribution_round_trip(self):
        dist = uniform_on([(0, 0), (1, 1), (2, 0)])
        rebuilt = distribution_from_dict(distribution_to_dict(dist))
        assert rebuilt == dist

    def test_distribution_rational_weights(self):
        obj = {"atoms": [[0, 0, "1/3"], [1, 1, "2/3"]]}
        dist = distribution_from_dict(obj)
        assert dist.weight((1, 1)) == Fraction(2, 3)

    def test_compression_round_trip(self):
        comp = CompressionOutput(((0, 1), (2, 0)), (1, 0, 1))
        rebuilt = compression_from_dict(compression_to_dict(comp))
        assert rebuilt == comp

    def test_sample_rejects_non_bits(self):
        with pytest.raises(FormatError):
            sample_from_list([[0, 2]])


class TestCliDim:
    def test_vc_with_witness(self, class_file, capsys):
        assert main(["dim", "--input", class_file, "--measure", "vc", "--witness"]) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["value"] == 1
        assert out["witness_verified"] is True

    def test_all_measures_run(self, class_file):
        for measure in ["vc", "ld", "td", "strength", "natarajan", "graph", "support-vc", "dual"]:
            assert main(["dim", "--input", class_file, "--measure", measure]) == 0

    def test_malformed_json_exits_2(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert main(["dim", "--input", str(bad), "--measure", "vc"]) == 2
        assert "error:" in capsys.readouterr().err

    def test_bad_field_exits_2_and_names_field(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"domain_size": 2, "concepts": ["01x"[:2] + "x"]}))
        assert main(["dim", "--input", str(bad), "--measure", "vc"]) == 2
        err = capsys.readouterr().err
        assert "concept" in err


class TestCliLearn:
    def test_ld_compress(self, class_file, sample_file, capsys):
        rc = main(
            ["learn", "--input", class_file, "--sample", sample_file, "--mode", "ld-compress"]
        )
        assert rc == 0
        out = json.loads(capsys.readouterr().out)
        assert out["size"] <= out["ld"]
        assert out["hypothesis"]["labels"] == "111"

    def test_realizable_too_short_reports_m(self, class_file, sample_file, capsys):
        rc = main(
            [
                "learn", "--input", class_file, "--sample", sample_file,
                "--mode", "realizable", "--eps", "0.5", "--delta", "0.5",
            ]
        )
        assert rc == 2
        assert "m =" in capsys.readouterr().err

    def test_compress_round_trip_payload(self, class_file, sample_file, capsys):
        rc = main(
            ["learn", "--input", class_file, "--sample", sample_file, "--mode", "compress"]
        )
        assert rc == 0
        out = json.loads(capsys.readouterr().out)
        comp = compression_from_dict(out["compression"])
        assert comp.size == out["size"]


class TestCliOther:
    def test_online_soa(self, class_file, sample_file, capsys):
        rc = main(
            ["online", "--input", class_file, "--mode", "soa", "--sample", sample_file]
        )
        assert rc == 0
        out = json.loads(capsys.readouterr().out)
        assert out["mistakes"] <= out["ld"]

    def test_disambiguate_majority(self, class_file, capsys):
        rc = main(["disambiguate", "--input", class_file, "--algo", "majority"])
        assert rc == 0
        out = json.loads(capsys.readouterr().out)
        assert sorted(out["totals"]) == ["000", "111"]
        assert out["strong_verified"] is True

    def test_construct_biclique_complete(self, capsys):
        rc = main(["construct", "biclique", "--complete", "4"])
        assert rc == 0
        out = json.loads(capsys.readouterr().out)
        assert out["vc"] == 1
        assert sorted(out["class"]["concepts"]) == sorted(["0**", "10*", "110", "111"])

    def test_construct_biclique_from_graph_file(self, tmp_path, capsys):
        graph = {
            "vertices": 2,
            "edges": [[0, 1]],
            "partition": [[[0], [1]]],
        }
        path = tmp_path / "graph.json"
        path.write_text(json.dumps(graph))
        rc = main(["construct", "biclique", "--graph", str(path)])
        assert rc == 0

    def test_construct_bad_partition_exits_2(self, tmp_path, capsys):
        graph = {
            "vertices": 3,
            "edges": [[0, 1], [1, 2]],
            "partition": [[[0], [1, 2]]],
        }
        path = tmp_path / "graph.json"
        path.write_text(json.dumps(graph))
        assert main(["construct", "biclique", "--graph", str(path)]) == 2
        assert "non-edge" in capsys.readouterr().err

    def test_scaling_table_runs(self, capsys):
        rc = main(["scaling", "compression-size", "--grid", "8", "16"])
        assert rc == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0] == "m,measured_size,envelope"
        assert len(lines) == 3


class TestCliExperiment:
    def test_small_suite_passes_and_writes(self, tmp_path, capsys):
        prefix = str(tmp_path / "report")
        rc = main(
            [
                "experiment", "erm-failure", "--seed", "3",
                "--trials", "200", "--out", prefix,
            ]
        )
        assert rc == 0
        report = json.loads((tmp_path / "report.json").read_text())
        assert report["schema"] == 1
        assert report["summary"]["failed"] == 0
        csv_text = (tmp_path / "report.csv").read_text()
        assert csv_text.splitlines()[0] == (
            "experiment,check,statement,measured,bound,passed"
        )

    def test_unknown_experiment_rejected(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["experiment", "nonsense"])
        assert exc.value.code == 2

    def test_determinism_same_seed_same_report(self, tmp_path):
        from pcl.experiments import ExperimentConfig, run_experiment

        cfg = ExperimentConfig(
            "experts-regret", seed=11, params={"matrices": 10}
        )
        a = run_experiment(cfg).to_dict()
        b = run_experiment(
            ExperimentConfig("experts-regret", seed=11, params={"matrices": 10})
        ).to_dict()
        assert a == b

    def test_different_seed_changes_report(self):
        from pcl.experiments import ExperimentConfig, run_experiment

        a = run_experiment(
            ExperimentConfig("experts-regret", seed=1, params={"matrices": 5})
        ).to_dict()
        b = run_experiment(
            ExperimentConfig("experts-regret", seed=2, params={"matrices": 5})
        ).to_dict()
        assert a != b


class TestScalingTables:
    def test_empty_grid_yields_header_only(self):
        from pcl.experiments import emit_scaling_table

        header, rows = emit_scaling_table("compression-size", [])
        assert header == ["m", "measured_size", "envelope"]
        assert rows == []

    def test_measured_within_envelope(self):
        from pcl.experiments import emit_scaling_table

        for name, grid in (
            ("compression-size", [8, 16]),
            ("disambiguation-size", [4, 6]),
        ):
            _, rows = emit_scaling_table(name, grid, seed=2)
            assert all(measured <= envelope for _, measured, envelope in rows)

    def test_unknown_table_rejected(self):
        from pcl.experiments import emit_scaling_table

        with pytest.raises(ValueError):
            emit_scaling_table("nonsense", [1])


class TestRandomClassGeneration:
    def test_full_cube_when_star_free(self):
        from pcl.experiments import generate_random_class

        cls = generate_random_class(3, 8, 0.0, seed=5)
        assert len(cls) == 8
        assert all(h.is_total() for h in cls)

    def test_all_star_flagged(self):
        from pcl.experiments import generate_random_class

        with pytest.warns(UserWarning, match="distinct concepts"):
            cls = generate_random_class(3, 4, 1.0, seed=5)
        assert len(cls) == 1

    def test_seed_reproducibility(self):
        from pcl.experiments import generate_random_class

        a = generate_random_class(5, 10, 0.3, seed=42)
        b = generate_random_class(5, 10, 0.3, seed=42)
        assert a == b

    def test_infeasible_size_rejected(self):
        from pcl.experiments import generate_random_class

        with pytest.raises(ValueError):
            generate_random_class(2, 5, 0.0, seed=1)
