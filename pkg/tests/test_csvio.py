import numpy as np
import pytest

from vardiag import CsvTable, EmptyData, ParseError, read_csv, write_csv


class TestRoundTrip:
    def test_random_table_exact(self, tmp_path):
        rng = np.random.default_rng(0)
        values = rng.standard_normal((100, 3)) * 10.0 ** rng.integers(-8, 8, size=(100, 3))
        path = tmp_path / "data.csv"
        write_csv(path, CsvTable(("a", "b", "c"), values))
        back = read_csv(path)
        assert back.header == ("a", "b", "c")
        assert np.abs(back.values - values).max() <= 1e-15
        # 17 significant digits round-trip doubles exactly
        assert np.array_equal(back.values, values)

    def test_write_read_write_is_stable(self, tmp_path):
        rng = np.random.default_rng(1)
        values = rng.standard_normal((20, 2))
        first = tmp_path / "one.csv"
        second = tmp_path / "two.csv"
        write_csv(first, CsvTable(("x", "y"), values))
        write_csv(second, read_csv(first))
        assert first.read_bytes() == second.read_bytes()


class TestErrors:
    def test_header_only(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("a,b\n")
        with pytest.raises(EmptyData):
            read_csv(path)

    def test_empty_file(self, tmp_path):
        path = tmp_path / "none.csv"
        path.write_text("")
        with pytest.raises(EmptyData):
            read_csv(path)

    def test_ragged_row_names_row(self, tmp_path):
        path = tmp_path / "ragged.csv"
        path.write_text("a,b\n1,2\n3\n")
        with pytest.raises(ParseError, match="row 3"):
            read_csv(path)

    def test_bad_cell_names_location(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("a,b\n1,2\n3,x\n")
        with pytest.raises(ParseError, match="row 3, column 2"):
            read_csv(path)

    def test_non_finite_rejected(self, tmp_path):
        path = tmp_path / "inf.csv"
        path.write_text("a\n1\ninf\n")
        with pytest.raises(ParseError, match="row 3"):
            read_csv(path)
