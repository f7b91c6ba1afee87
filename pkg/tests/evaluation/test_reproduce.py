import csv

import pytest

from spps.evaluation.reproduce import load_references, reproduce, table_ids
from spps.exceptions import ConfigurationError

UNIT_BOX = {
    "zs-unit": {
        "title": "unit box",
        "command": "zs",
        "potential": "box",
        "a": 1.0,
        "m": 2000,
        "N": 120,
        "rows": [{"n": 0, "A": 1.0, "value": 0.31902252414261895, "tolerance": 1.0e-8}],
    }
}


class TestReferences:
    def test_bundled_tables(self):
        assert table_ids() == ["4.1", "4.2", "4.3", "4.4", "5.1", "zs-box"]

    def test_rows_carry_tolerances(self):
        for entry in load_references().values():
            assert entry["rows"]
            assert all(row["tolerance"] > 0 for row in entry["rows"])

    def test_unreadable_file(self, temp_dir):
        bad = temp_dir / "refs.yaml"
        bad.write_text("tables: [unclosed")
        with pytest.raises(ConfigurationError):
            load_references(bad)


class TestReproduce:
    def test_unknown_table(self):
        with pytest.raises(ConfigurationError, match="Unknown table id"):
            reproduce("9.9")

    def test_unsupported_command(self):
        refs = {"x": {"command": "layer", "rows": [{"n": 0, "value": 0.0, "tolerance": 1.0}]}}
        with pytest.raises(ConfigurationError, match="unsupported command"):
            reproduce("x", references=refs)

    def test_unit_box_passes_and_writes_csv(self, temp_dir):
        result = reproduce("zs-unit", out_dir=temp_dir, references=UNIT_BOX)
        assert result.passed
        assert result.max_error < 1e-8
        with open(temp_dir / "table_zs-unit.csv") as f:
            rows = list(csv.reader(f))
        assert rows[0] == ["n", "computed", "reference", "abs_error"]
        assert len(rows) == 2

    def test_wrong_reference_fails(self):
        refs = {"zs-unit": dict(UNIT_BOX["zs-unit"])}
        refs["zs-unit"]["rows"] = [{"n": 0, "A": 1.0, "value": 0.3, "tolerance": 1.0e-8}]
        result = reproduce("zs-unit", references=refs)
        assert not result.passed
        assert [row.n for row in result.failures] == [0]

    def test_eigenvalue_count_mismatch(self):
        refs = {"zs-unit": dict(UNIT_BOX["zs-unit"])}
        refs["zs-unit"]["rows"] = UNIT_BOX["zs-unit"]["rows"] + [
            {"n": 1, "A": 1.0, "value": 1.0, "tolerance": 1.0e-8}
        ]
        result = reproduce("zs-unit", references=refs)
        assert result.count_mismatches
        assert not result.passed


@pytest.mark.slow
@pytest.mark.parametrize("table_id", ["4.1", "4.2", "4.3", "4.4", "5.1", "zs-box"])
def test_bundled_table(table_id, temp_dir):
    result = reproduce(table_id, out_dir=temp_dir)
    assert result.passed, [(r.n, r.computed, r.reference) for r in result.failures]
