import json

import pytest

from focktrace import cli


def run(args):
    return cli.main(args)


class TestIdentities:
    def test_default_run_passes(self, tmp_path):
        out = tmp_path / "report.json"
        code = run(["identities", "--seed", "42", "--out", str(out)])
        assert code == 0
        rows = json.loads(out.read_text())
        assert rows and all(r["pass"] for r in rows)

    def test_byte_identical_reports(self, tmp_path):
        a = tmp_path / "a.json"
        b = tmp_path / "b.json"
        run(["identities", "--seed", "42", "--out", str(a)])
        run(["identities", "--seed", "42", "--out", str(b)])
        assert a.read_bytes() == b.read_bytes()

    def test_corrupted_tolerance_fails(self, tmp_path):
        out = tmp_path / "report.json"
        code = run(["identities", "--seed", "42", "--tol", "1e-30",
                    "--out", str(out)])
        assert code == 1

    def test_statistics_filter(self, tmp_path):
        out = tmp_path / "report.json"
        run(["identities", "--seed", "42", "--filter", "fermionic",
             "--out", str(out)])
        rows = json.loads(out.read_text())
        assert rows and all("fermionic" in r["check"] for r in rows)

    def test_csv_format(self, tmp_path):
        out = tmp_path / "report.csv"
        run(["identities", "--seed", "42", "--format", "csv",
             "--out", str(out)])
        header = out.read_text().splitlines()[0]
        assert header.split(",")[:4] == ["check", "inputs_digest",
                                         "value_re", "value_im"]


class TestFredholm:
    def test_product_kernel_run(self, tmp_path):
        out = tmp_path / "fred.json"
        code = run(["fredholm", "--kernel", "product:c=1.0", "--quad", "16",
                    "--nmax", "10", "--compare", "--out", str(out)])
        assert code == 0
        rows = {r["check"]: r for r in json.loads(out.read_text())}
        assert abs(rows["series_vs_dense_determinant"]["value"][0] - 4 / 3) < 1e-12
        assert rows["series_vs_nystrom"]["pass"]

    def test_zero_kernel_echoes(self, tmp_path):
        out = tmp_path / "fred.json"
        code = run(["fredholm", "--kernel", "zero", "--quad", "8",
                    "--nmax", "4", "--compare", "--out", str(out)])
        assert code == 0

    def test_permanent_branch(self, tmp_path):
        out = tmp_path / "fred.json"
        code = run(["fredholm", "--kernel", "product:c=0.5", "--quad", "16",
                    "--nmax", "16", "--spec", '{"f": "x", "sign": "-"}',
                    "--tol", "1e-9", "--out", str(out)])
        assert code == 0
        rows = {r["check"]: r for r in json.loads(out.read_text())}
        assert abs(rows["series_vs_dense_determinant"]["value"][0] - 1.2) < 1e-10


class TestVertex:
    SPEC = ('{"alpha": [0.8, 0.79], "k": [1, -1], "beta": [100.0, 101.0],'
            ' "l": [1, -1], "gamma": [0.1434, 0.2048]}')

    def test_trivial_spec_is_one(self, tmp_path):
        out = tmp_path / "vx.json"
        spec = '{"alpha": [1.0], "k": [0], "beta": [5.0], "l": [0], "gamma": [0.3, 0]}'
        code = run(["vertex", "--spec", spec, "--out", str(out)])
        assert code == 0
        rows = json.loads(out.read_text())
        assert rows[0]["value"] == [1.0, 0.0]

    def test_validate_cross_check(self, tmp_path):
        out = tmp_path / "vx.json"
        code = run(["vertex", "--spec", self.SPEC, "--validate",
                    "--cutoff-m", "100000", "--out", str(out)])
        assert code == 0
        rows = {r["check"]: r for r in json.loads(out.read_text())}
        assert rows["regularized_vs_product"]["pass"]

    def test_malformed_spec_cites_constraint(self, tmp_path, capsys):
        spec = '{"alpha": [1.0], "k": [2], "beta": [5.0], "l": [0], "gamma": [0.3, 0]}'
        code = run(["vertex", "--spec", spec])
        assert code == 2
        assert "sum k_i = 0" in capsys.readouterr().err
