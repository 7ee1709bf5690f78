import pytest

from ddnnf.cli import main

FORMULA = "(a & b) | (c & d)\n"


@pytest.fixture
def workspace(tmp_path):
    (tmp_path / "f.bool").write_text(FORMULA)
    return tmp_path


def _run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def _full_pipeline(workspace, capsys):
    base = workspace / "f.bool"
    assert main([
        "tseitin", str(base)]) == 0
    assert main([
        "compile", str(workspace / "f.cnf"), "--order", "5"]) == 0
    assert main([
        "prune", str(workspace / "f.nnf"),
        "--tvars", str(workspace / "f.tvars")]) == 0
    capsys.readouterr()


class TestTseitin:
    def test_writes_three_files(self, workspace, capsys):
        code, out, _ = _run(capsys, "tseitin", str(workspace / "f.bool"))
        assert code == 0
        cnf_text = (workspace / "f.cnf").read_text()
        assert cnf_text.startswith("p cnf 6 7")
        assert (workspace / "f.tvars").read_text().startswith("t 2")
        assert "a 1" in (workspace / "f.map").read_text()

    def test_idempotent(self, workspace, capsys):
        _run(capsys, "tseitin", str(workspace / "f.bool"))
        first = (workspace / "f.cnf").read_bytes()
        _run(capsys, "tseitin", str(workspace / "f.bool"))
        assert (workspace / "f.cnf").read_bytes() == first

    def test_missing_file(self, workspace, capsys):
        code, _, err = _run(capsys, "tseitin", str(workspace / "nope.bool"))
        assert code == 1
        assert err.startswith("file error:")

    def test_parse_error_prefix(self, workspace, capsys):
        bad = workspace / "bad.bool"
        bad.write_text("a &&& b")
        code, _, err = _run(capsys, "tseitin", str(bad))
        assert code == 1
        assert err.startswith("parse error:")


class TestCompilePruneCount:
    def test_pipeline_and_count(self, workspace, capsys):
        _full_pipeline(workspace, capsys)
        code, out, _ = _run(capsys, "count", str(workspace / "f.pruned.nnf"))
        assert code == 0
        assert out.strip() == "7"

    def test_prune_report_sidecar(self, workspace, capsys):
        _full_pipeline(workspace, capsys)
        report = (workspace / "f.pruned.nnf.report").read_text()
        entries = dict(line.split("=") for line in report.strip().splitlines())
        assert entries["before"] == "16"
        assert int(entries["after_t"]) < int(entries["after_p"]) < 16
        assert int(entries["artifacts"]) >= 1

    def test_prune_modes_ordered(self, workspace, capsys):
        _full_pipeline(workspace, capsys)
        nnf = workspace / "f.nnf"
        code, out, _ = _run(
            capsys, "prune", str(nnf), "--mode", "p",
            "-o", str(workspace / "p.nnf"))
        assert code == 0
        code, out_t, _ = _run(
            capsys, "prune", str(nnf), "--mode", "t",
            "-o", str(workspace / "t.nnf"))
        assert code == 0
        code, stats_p, _ = _run(capsys, "stats", str(workspace / "p.nnf"))
        code, stats_t, _ = _run(capsys, "stats", str(workspace / "t.nnf"))
        size_p = int(stats_p.split()[0].split("=")[1])
        size_t = int(stats_t.split()[0].split("=")[1])
        assert size_t <= size_p

    def test_tvars_travel_inside_nnf(self, workspace, capsys):
        # compile embeds the sidecar, so prune works without --tvars
        _run(capsys, "tseitin", str(workspace / "f.bool"))
        _run(capsys, "compile", str(workspace / "f.cnf"), "--order", "5")
        code, out, _ = _run(capsys, "prune", str(workspace / "f.nnf"))
        assert code == 0
        assert "artifacts=" in out

    def test_count_true_circuit(self, tmp_path, capsys):
        nnf = tmp_path / "t.nnf"
        nnf.write_text("nnf 1 0 4\nA 0\n")
        code, out, _ = _run(capsys, "count", str(nnf))
        assert code == 0
        assert out.strip() == "16"

    def test_compile_heuristics(self, workspace, capsys):
        _run(capsys, "tseitin", str(workspace / "f.bool"))
        for extra in (
            ["--heuristic", "dyn"],
            ["--heuristic", "random", "--seed", "5"],
            ["--seed", "9"],  # bare seed selects the seeded-random order
        ):
            code, _, _ = _run(capsys, "compile", str(workspace / "f.cnf"), *extra)
            assert code == 0
            code, out, _ = _run(capsys, "count", str(workspace / "f.nnf"))
            assert out.strip() == "7"

    def test_rerun_is_idempotent(self, workspace, capsys):
        _full_pipeline(workspace, capsys)
        first = (workspace / "f.pruned.nnf").read_bytes()
        _full_pipeline(workspace, capsys)
        assert (workspace / "f.pruned.nnf").read_bytes() == first


class TestDetect:
    def test_detect_roundtrip(self, workspace, capsys):
        _run(capsys, "tseitin", str(workspace / "f.bool"))
        code, out, _ = _run(
            capsys, "detect", str(workspace / "f.cnf"),
            "-o", str(workspace / "detected.tvars"))
        assert code == 0
        assert (workspace / "detected.tvars").read_text() == (
            workspace / "f.tvars").read_text()


class TestWmc:
    def test_weighted_count(self, workspace, capsys):
        _full_pipeline(workspace, capsys)
        weights = workspace / "w.txt"
        weights.write_text(
            "w 1 0.5\nw -1 0.5\nw 2 0.5\nw -2 0.5\n"
            "w 3 0.5\nw -3 0.5\nw 4 0.5\nw -4 0.5\n"
        )
        code, out, _ = _run(
            capsys, "wmc", str(workspace / "f.pruned.nnf"),
            "--weights", str(weights))
        assert code == 0
        assert abs(float(out.strip()) - 0.4375) < 1e-12

    def test_exact_mode(self, workspace, capsys):
        _full_pipeline(workspace, capsys)
        weights = workspace / "w.txt"
        weights.write_text("w 1 1/2\nw -1 1/2\n")
        code, out, _ = _run(
            capsys, "wmc", str(workspace / "f.pruned.nnf"),
            "--weights", str(weights), "--exact")
        assert code == 0
        assert out.strip() == "7/2"


class TestVerify:
    def test_formula_input(self, workspace, capsys):
        code, out, _ = _run(capsys, "verify", str(workspace / "f.bool"))
        assert code == 0
        assert "FAIL" not in out
        assert "ok model bijection (formula vs encoded CNF)" in out

    def test_cnf_input(self, workspace, capsys):
        _run(capsys, "tseitin", str(workspace / "f.bool"))
        code, out, _ = _run(capsys, "verify", str(workspace / "f.cnf"),
                            "--tvars", str(workspace / "f.tvars"))
        assert code == 0
        assert "ok artifact flags match tautology oracle" in out

    def test_nnf_input(self, workspace, capsys):
        _full_pipeline(workspace, capsys)
        code, out, _ = _run(capsys, "verify", str(workspace / "f.nnf"),
                            "--tvars", str(workspace / "f.tvars"))
        assert code == 0

    def test_oracle_bound_error_prefix(self, workspace, capsys, monkeypatch):
        monkeypatch.setenv("DDNNF_ORACLE_MAX_VARS", "2")
        code, _, err = _run(capsys, "verify", str(workspace / "f.bool"))
        assert code == 1
        assert err.startswith("oracle error:")


class TestBench:
    def test_csv_to_stdout_and_file(self, tmp_path, capsys):
        out_path = tmp_path / "report.csv"
        code, out, _ = _run(
            capsys, "bench", "--family", "noisy_or", "--sizes", "2..4",
            "-o", str(out_path))
        assert code == 0
        lines = out_path.read_text().splitlines()
        assert lines[0].startswith("instance,size,ddnnf")
        assert len(lines) == 4
        assert "noisy_or_n3" in out

    def test_sizes_comma_list(self, capsys):
        code, out, _ = _run(capsys, "bench", "--family", "overlap", "--sizes", "2,3")
        assert code == 0
        assert "overlap_n3" in out


def test_usage_error_exit_code(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2
