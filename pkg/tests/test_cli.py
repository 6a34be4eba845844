import json

import jsonschema
import pytest

from icdof.channel import generic_channel, store_channel
from icdof.cli import main, parse_ifs_spec

CANTOR_SPEC = '{"r": "1/3", "atoms": [0, 2]}'


@pytest.fixture
def generic_file(tmp_path):
    path = tmp_path / "generic3.json"
    path.write_text(json.dumps(store_channel(generic_channel(3))))
    return str(path)


@pytest.fixture
def rational_file(tmp_path):
    doc = {
        "K": 2,
        "generators": [],
        "entries": [["2", "1"], ["1", "3"]],
    }
    path = tmp_path / "rational2.json"
    path.write_text(json.dumps(doc))
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


REPORT_SCHEMA = {
    "type": "object",
    "required": ["manifest", "report"],
    "properties": {
        "manifest": {
            "type": "object",
            "required": ["command", "parameters", "tool_version",
                         "input_digests", "wall_clock_s"],
            "properties": {
                "command": {"type": "string"},
                "tool_version": {"type": "string"},
                "wall_clock_s": {"type": "number"},
                "input_digests": {
                    "type": "object",
                    "additionalProperties": {"pattern": "^sha256:[0-9a-f]{64}$"},
                },
            },
        },
        "report": {"type": "object"},
    },
}


class TestCheck:
    def test_generic_independent(self, capsys, generic_file):
        code, out, _ = run(
            capsys, "check", "--channel", generic_file, "--degree", "1"
        )
        assert code == 0
        doc = json.loads(out)
        jsonschema.validate(doc, REPORT_SCHEMA)
        assert doc["report"]["independent"] is True
        assert all(r["rank"] == 14 for r in doc["report"]["receivers"])

    def test_rational_dependent_with_certificate(self, capsys, rational_file):
        code, out, _ = run(
            capsys, "check", "--channel", rational_file, "--degree", "0"
        )
        assert code == 0  # the check itself succeeds; the verdict is negative
        doc = json.loads(out)
        assert doc["report"]["independent"] is False
        cert = doc["report"]["receivers"][0]["certificate"]
        assert any(cert["a"]) or any(cert["b"])

    def test_single_receiver(self, capsys, generic_file):
        code, out, _ = run(
            capsys, "check", "--channel", generic_file,
            "--degree", "1", "--receiver", "2",
        )
        assert code == 0
        doc = json.loads(out)
        assert [r["receiver"] for r in doc["report"]["receivers"]] == [2]

    def test_missing_file(self, capsys):
        code, _, err = run(capsys, "check", "--channel", "/no/such.json",
                           "--degree", "1")
        assert code == 1
        assert "error" in json.loads(err)


class TestBuildAndBound:
    def test_build(self, capsys, generic_file):
        code, out, _ = run(
            capsys, "build", "--channel", generic_file,
            "--degree", "1", "--range", "2",
        )
        assert code == 0
        rep = json.loads(out)["report"]
        assert rep["phi"] == 7
        assert rep["cardinality"] == 128
        assert rep["contraction"] == "1/16384"
        assert rep["unique_representation"] is True

    def test_bound_values(self, capsys, generic_file):
        code, out, _ = run(
            capsys, "bound", "--channel", generic_file,
            "--degree", "1", "--range", "2",
        )
        assert code == 0
        doc = json.loads(out)
        jsonschema.validate(doc, REPORT_SCHEMA)
        rep = doc["report"]
        assert rep["total"] == pytest.approx(3 / 28, abs=1e-12)
        assert rep["log_inv_r"] == pytest.approx(14.0)
        assert rep["notes"]

    def test_bound_refuses_dependent_channel(self, capsys, rational_file):
        code, _, err = run(
            capsys, "bound", "--channel", rational_file,
            "--degree", "0", "--range", "2",
        )
        assert code == 1
        doc = json.loads(err)
        assert "condition_report" in doc
        assert doc["condition_report"]["independent"] is False

    def test_bound_waiver(self, capsys, rational_file):
        code, out, _ = run(
            capsys, "bound", "--channel", rational_file,
            "--degree", "0", "--range", "2", "--waive-condition",
        )
        assert code == 0
        assert "total" in json.loads(out)["report"]

    def test_out_file(self, capsys, generic_file, tmp_path):
        target = tmp_path / "report.json"
        code, out, _ = run(
            capsys, "build", "--channel", generic_file,
            "--degree", "0", "--range", "3", "--out", str(target),
        )
        assert code == 0
        assert out == ""
        assert json.loads(target.read_text())["report"]["cardinality"] == 3


class TestSweep:
    def test_csv_shape(self, capsys, generic_file):
        code, out, _ = run(
            capsys, "sweep", "--channel", generic_file,
            "--degrees", "0,1", "--ranges", "2,3",
        )
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[0].startswith("# manifest: ")
        assert lines[1] == ("degree,coeff_range,cardinality,log_inv_r,total,"
                            "interference_ratio_bound")
        assert len(lines) == 2 + 4

    def test_byte_identical_rerun(self, capsys, generic_file, tmp_path):
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        for target in (a, b):
            code, _, _ = run(
                capsys, "sweep", "--channel", generic_file,
                "--degrees", "0,1", "--ranges", "2,3", "--out", str(target),
            )
            assert code == 0
        assert a.read_bytes() == b.read_bytes()


class TestExampleRationalAndFig1:
    def test_example_rational(self, capsys):
        code, out, _ = run(
            capsys, "example-rational", "--k", "3", "--range", "1024"
        )
        assert code == 0
        rep = json.loads(out)["report"]
        assert rep["closed_form_bound"] == pytest.approx(
            1.1918986647072214, abs=1e-12
        )
        assert rep["dof"]["total"] == pytest.approx(rep["closed_form_bound"],
                                                    abs=1e-9)
        assert rep["interference_support"] == [0, 2046]

    def test_fig1(self, capsys):
        code, out, _ = run(capsys, "fig1")
        assert code == 0
        rep = json.loads(out)["report"]
        assert rep["common_structure_cardinality"] == 19
        assert rep["different_structure_cardinality"] == 49


class TestEstimate:
    def test_csv_and_summary(self, capsys, tmp_path):
        target = tmp_path / "est.csv"
        code, out, _ = run(
            capsys, "estimate", "--spec", CANTOR_SPEC,
            "--k-grid", "9,27,81", "--samples", "20000",
            "--seed", "1", "--out", str(target),
        )
        assert code == 0
        summary = json.loads(out)
        assert summary["report"]["slope"] == pytest.approx(0.6309, abs=0.05)
        lines = target.read_text().strip().split("\n")
        assert lines[1] == "k,H_bits,H_over_logk"
        assert len(lines) == 2 + 3
        # cells are plain decimal literals
        for row in lines[2:]:
            k, h, p = row.split(",")
            assert float(h) > 0 and 0 < float(p) <= 1.5
            assert "np." not in row

    def test_byte_identical_rerun(self, capsys, tmp_path):
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        for target in (a, b):
            code, _, _ = run(
                capsys, "estimate", "--spec", CANTOR_SPEC,
                "--k-grid", "9,27", "--samples", "5000",
                "--seed", "7", "--out", str(target),
            )
            assert code == 0
        assert a.read_bytes() == b.read_bytes()

    def test_spec_file(self, capsys, tmp_path):
        spec_path = tmp_path / "spec.json"
        spec_path.write_text(CANTOR_SPEC)
        code, out, _ = run(
            capsys, "estimate", "--spec", str(spec_path),
            "--k-grid", "9,27", "--samples", "2000",
        )
        assert code == 0
        assert out.startswith("# manifest: ")


class TestIfsSubcommand:
    def test_diagnostics(self, capsys):
        code, out, _ = run(capsys, "ifs", "--spec", CANTOR_SPEC)
        assert code == 0
        rep = json.loads(out)["report"]
        assert rep["dimension_formula"] == pytest.approx(0.6309, abs=1e-4)
        assert rep["separation"]["satisfied"] is True

    def test_overlap_search(self, capsys):
        spec = '{"r": "1/2", "atoms": [0, 1, 2]}'
        code, out, _ = run(capsys, "ifs", "--spec", spec, "--overlap-depth", "2")
        assert code == 0
        rep = json.loads(out)["report"]
        assert {"word_a": [1, 2], "word_b": [2, 0], "delta_abs": 0.0} in rep["overlaps"]

    def test_sample_export_csv(self, capsys, tmp_path):
        target = tmp_path / "draws.csv"
        code, out, _ = run(
            capsys, "ifs", "--spec", CANTOR_SPEC, "--sample", "100",
            "--depth", "10", "--samples-out", str(target),
        )
        assert code == 0
        values = [float(line) for line in target.read_text().split()]
        assert len(values) == 100
        assert all(0.0 <= v <= 3.0 for v in values)

    def test_sample_export_f64(self, capsys, tmp_path):
        import numpy as np

        target = tmp_path / "draws.bin"
        code, _, _ = run(
            capsys, "ifs", "--spec", CANTOR_SPEC, "--sample", "64",
            "--depth", "10", "--format", "f64", "--samples-out", str(target),
        )
        assert code == 0
        arr = np.fromfile(target, dtype="<f8")
        assert arr.shape == (64,)

    def test_invalid_spec(self, capsys):
        code, _, err = run(capsys, "ifs", "--spec", '{"r": "1/3"}')
        assert code == 1
        assert "error" in json.loads(err)


class TestUsageErrors:
    def test_no_subcommand(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main([])
        assert exc.value.code == 2

    def test_missing_required_flag(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["bound", "--degree", "1"])
        assert exc.value.code == 2

    def test_version(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["--version"])
        assert exc.value.code == 0


class TestParseIfsSpec:
    def test_exact_fraction(self):
        spec = parse_ifs_spec('{"r": "1/3", "atoms": ["0", "2"]}')
        assert spec.is_rational()

    def test_float_atoms(self):
        spec = parse_ifs_spec('{"r": 0.5, "atoms": [0.0, 1.3]}')
        assert not spec.is_rational()

    def test_probs(self):
        spec = parse_ifs_spec(
            '{"r": "1/4", "atoms": [0, 1], "probs": ["1/4", "3/4"]}'
        )
        assert str(spec.probs[1]) == "3/4"
