"""Structure files, report emission, and the command line entry points."""

import json

import pytest

from ahtorsion.catalog import ENTRIES, get
from ahtorsion.cli import (
    DEFINITIONS,
    FileFormatError,
    emit_structure_file,
    load_structure,
    main,
    structure_from_data,
)
from ahtorsion.scalars import parse_scalar


def minimal_file(**overrides):
    data = {
        "name": "test",
        "dimension": 4,
        "brackets": [],
        "kaehler_form": [
            {"i": 1, "j": 2, "c": "1"},
            {"i": 3, "j": 4, "c": "1"},
        ],
    }
    data.update(overrides)
    return data


class TestParsing:
    @pytest.mark.parametrize("entry", ENTRIES, ids=lambda e: e.name)
    def test_parse_emit_identity_on_catalog(self, entry):
        built = entry.build()
        parsed = structure_from_data(
            json.loads(emit_structure_file(entry.name)), source=entry.name
        )
        assert parsed.L._brackets == built.L._brackets
        assert parsed.L.extension_d == built.L.extension_d
        assert parsed.L.parameters == built.L.parameters
        assert parsed.omega == built.omega
        assert parsed.J == built.J
        assert parsed.vol == built.vol
        assert parsed.psi_plus == built.psi_plus
        assert parsed.psi_minus == built.psi_minus
        assert parsed.name == built.name

    def test_minimal_file_builds_flat_torus(self):
        S = structure_from_data(minimal_file())
        assert S.L.dim == 4 and S.n == 2

    def test_odd_dimension_rejected(self):
        with pytest.raises(FileFormatError, match="dimension"):
            structure_from_data(minimal_file(dimension=5))

    def test_out_of_range_index_rejected(self):
        bad = minimal_file(
            kaehler_form=[{"i": 1, "j": 9, "c": "1"}, {"i": 3, "j": 4, "c": "1"}]
        )
        with pytest.raises(FileFormatError, match="not in 1..4"):
            structure_from_data(bad)

    def test_float_scalar_rejected(self):
        bad = minimal_file(
            kaehler_form=[{"i": 1, "j": 2, "c": 0.5}, {"i": 3, "j": 4, "c": "1"}]
        )
        with pytest.raises(FileFormatError, match="literal strings"):
            structure_from_data(bad)

    def test_jacobi_failure_rejected_with_witness(self):
        bad = minimal_file(
            brackets=[
                {"i": 1, "j": 2, "coeffs": {"1": "1"}},
                {"i": 2, "j": 3, "coeffs": {"2": "1"}},
                {"i": 1, "j": 3, "coeffs": {"3": "-1"}},
            ]
        )
        with pytest.raises(FileFormatError, match="Jacobi"):
            structure_from_data(bad)

    def test_duplicate_bracket_rejected(self):
        bad = minimal_file(
            brackets=[
                {"i": 1, "j": 2, "coeffs": {"3": "1"}},
                {"i": 1, "j": 2, "coeffs": {"4": "1"}},
            ]
        )
        with pytest.raises(FileFormatError, match="duplicate"):
            structure_from_data(bad)

    def test_malformed_json_gets_line_and_column(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text('{"dimension": 4,\n  "brackets": [')
        with pytest.raises(FileFormatError, match=r":2:\d+"):
            load_structure(str(path))


class TestCommands:
    def test_catalog_list(self, capsys):
        assert main(["catalog", "list"]) == 0
        out = capsys.readouterr().out
        for entry in ENTRIES:
            assert entry.name in out

    def test_analyze_text_report(self, capsys):
        assert main(["analyze", "--catalog", "example-5.1", "--report", "text"]) == 0
        out = capsys.readouterr().out
        assert "theta = -e^1 - 2*e^4" in out
        assert "s = -13/2" in out
        assert "class: locally conformal Kaehler" in out

    def test_analyze_json_report_round_trips_scalars(self, capsys):
        assert main(["analyze", "--catalog", "example-5.2", "--report", "json"]) == 0
        data = json.loads(capsys.readouterr().out)
        assert data["scalar_curvatures"]["s"] == "-5/2 - 1/2*q^2"
        # every scalar in the report must parse back in the literal grammar
        def walk(node):
            if isinstance(node, dict):
                for key, value in node.items():
                    if key == "c" or key.startswith("s"):
                        if isinstance(value, str):
                            parse_scalar(value, d=3, parameters=("q",))
                    walk(value)
            elif isinstance(node, list):
                for item in node:
                    walk(item)

        walk(data)

    def test_analyze_file_target(self, tmp_path, capsys):
        path = tmp_path / "example-5.4.json"
        path.write_text(emit_structure_file("example-5.4"))
        assert main(["analyze", str(path), "--report", "text"]) == 0
        out = capsys.readouterr().out
        assert "theta = -(1/2*r)*e^5" in out

    def test_analyze_out_file(self, tmp_path):
        target = tmp_path / "report.json"
        code = main(
            [
                "analyze",
                "--catalog",
                "flat-kaehler-torus",
                "--report",
                "json",
                "--out",
                str(target),
            ]
        )
        assert code == 0
        data = json.loads(target.read_text())
        assert data["classification"]["label"] == "Kaehler"

    def test_analyze_broken_file_exits_nonzero(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text("{")
        assert main(["analyze", str(path)]) == 1

    def test_audit_catalog_entry(self, capsys):
        assert main(["audit", "--catalog", "example-5.1"]) == 0
        assert "example-5.1: ok" in capsys.readouterr().out

    def test_audit_all_with_samples(self, capsys):
        assert main(["audit", "--catalog", "all", "--samples", "2", "--seed", "3"]) == 0
        out = capsys.readouterr().out
        assert out.count(": ok") == len(ENTRIES) + 2

    def test_batch_reports_per_file_and_exit_status(self, tmp_path, capsys):
        for name in ("example-5.1", "flat-kaehler-torus"):
            (tmp_path / f"{name}.json").write_text(emit_structure_file(name))
        assert main(["batch", str(tmp_path)]) == 0
        out = capsys.readouterr().out
        assert out.count("ok ==") == 2

        (tmp_path / "broken.json").write_text("not json")
        assert main(["batch", str(tmp_path)]) == 1
        out = capsys.readouterr().out
        assert "broken.json FAIL" in out

    def test_batch_empty_directory(self, tmp_path, capsys):
        assert main(["batch", str(tmp_path)]) == 1


class TestDefinitions:
    def test_every_catalog_entry_has_a_definition(self):
        assert set(DEFINITIONS) == {e.name for e in ENTRIES}

    def test_definitions_are_valid_json_documents(self):
        for name in DEFINITIONS:
            json.loads(emit_structure_file(name))
