"""Tests for the command-line entry point."""

import pytest

from hypersketch.core.errors import EXIT_INPUT_ERROR, EXIT_OK, EXIT_VERIFICATION_FAILED
from main import main

SPLIT_A = "n 6 r 3\n+ 0,1\n+ 1,2\n+ 0,2\n+ 2,3 2\n"
SPLIT_B = "n 6 r 3\n+ 3,4\n+ 4,5\n+ 3,5\n+ 0,4,5\n"


@pytest.fixture()
def cfg(fixtures_dir):
    return ["--config", str(fixtures_dir / "small.env")]


@pytest.fixture()
def stream(fixtures_dir):
    return str(fixtures_dir / "joined_triangles_stream.txt")


class TestEncodeDecode:
    """encode -> merge -> decode -> verify."""

    def test_full_cycle(self, tmp_path, cfg, stream, fixtures_dir, capsys):
        bank = tmp_path / "stream.bank"
        sparsifier = tmp_path / "sparsifier.txt"
        assert main(["encode", stream, "-o", str(bank), *cfg]) == EXIT_OK
        assert main(["decode", str(bank), "-o", str(sparsifier), *cfg]) == EXIT_OK
        assert sparsifier.read_text().startswith("n 6 r 3 eps 1/2")
        hypergraph = str(fixtures_dir / "joined_triangles.txt")
        assert main(["verify", hypergraph, str(sparsifier), "--kcuts", *cfg]) == EXIT_OK
        assert "ok True" in capsys.readouterr().out

    def test_merge_equals_joint_encoding(self, tmp_path, cfg, fixtures_dir):
        (tmp_path / "a.txt").write_text(SPLIT_A)
        (tmp_path / "b.txt").write_text(SPLIT_B)
        for name in ("a", "b"):
            assert main(["encode", str(tmp_path / f"{name}.txt"), "-o", str(tmp_path / f"{name}.bank"), *cfg]) == 0
        merged = tmp_path / "merged.bank"
        assert main(["merge", str(tmp_path / "a.bank"), str(tmp_path / "b.bank"), "-o", str(merged), *cfg]) == 0
        whole = tmp_path / "whole.bank"
        assert main(["encode", str(fixtures_dir / "joined_triangles.txt"), "-o", str(whole), *cfg]) == 0
        assert merged.read_bytes() == whole.read_bytes()

    def test_decode_with_wrong_seed(self, tmp_path, cfg, stream):
        bank = tmp_path / "stream.bank"
        assert main(["encode", stream, "-o", str(bank), *cfg]) == EXIT_OK
        assert main(["decode", str(bank), *cfg, "--seed", "01"]) == EXIT_INPUT_ERROR

    def test_bad_vertex(self, tmp_path, cfg, fixtures_dir):
        bad = str(fixtures_dir / "bad_vertex.txt")
        assert main(["encode", bad, "-o", str(tmp_path / "x.bank"), *cfg]) == EXIT_INPUT_ERROR

    def test_strict_stream_rejects_early_delete(self, tmp_path, cfg):
        path = tmp_path / "early.txt"
        path.write_text("n 4 r 2\n- 0,1\n+ 0,1\n")
        out = str(tmp_path / "x.bank")
        assert main(["encode", str(path), "-o", out, *cfg]) == EXIT_INPUT_ERROR
        assert main(["encode", str(path), "-o", out, "--lenient", *cfg]) == EXIT_OK

    def test_missing_file(self, tmp_path, cfg):
        assert main(["decode", str(tmp_path / "absent.bank"), *cfg]) == EXIT_INPUT_ERROR

    def test_invalid_eps(self, tmp_path, cfg, stream):
        assert main(["encode", stream, "-o", str(tmp_path / "x.bank"), *cfg, "--eps", "2"]) == EXIT_INPUT_ERROR

    def test_r_max_may_widen_the_header(self, tmp_path, cfg, stream):
        out = str(tmp_path / "x.bank")
        assert main(["encode", stream, "-o", out, "--r-max", "4", *cfg]) == EXIT_OK
        assert main(["encode", stream, "-o", out, "--r-max", "2", *cfg]) == EXIT_INPUT_ERROR

    def test_kappa_override(self, tmp_path, cfg, stream):
        bank = tmp_path / "stream.bank"
        assert main(["encode", stream, "-o", str(bank), "--kappa", "12", *cfg]) == EXIT_OK
        assert main(["decode", str(bank), "--kappa", "12", *cfg]) == EXIT_OK
        assert main(["encode", stream, "-o", str(bank), "--kappa", "0", *cfg]) == EXIT_INPUT_ERROR


class TestVerify:
    def test_missing_edges_fail(self, tmp_path, cfg, fixtures_dir, capsys):
        sparsifier = tmp_path / "thin.txt"
        sparsifier.write_text("n 6 r 3 eps 1/2 eps_star 1/32 seed -\ne 0,1 1 0\n")
        code = main(["verify", str(fixtures_dir / "joined_triangles.txt"), str(sparsifier), *cfg])
        assert code == EXIT_VERIFICATION_FAILED
        assert "ok False" in capsys.readouterr().out


class TestOracle:
    def test_phi_and_strengths(self, cfg, fixtures_dir, capsys):
        code = main(["oracle", str(fixtures_dir / "joined_triangles.txt"), "--census", "1", *cfg])
        assert code == EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert lines[0].startswith("phi ")
        assert sum(1 for line in lines if line.startswith("strength ")) == 8
        assert any(line.startswith("kcuts t=1 count=") for line in lines)
        assert "min_2cut 2 side 1" in lines

    def test_two_cut_cap_skips_enumeration(self, cfg, fixtures_dir, capsys):
        code = main(["oracle", str(fixtures_dir / "joined_triangles.txt"), "--two-cut-cap", "4", *cfg])
        assert code == EXIT_OK
        assert not any(line.startswith("min_2cut") for line in capsys.readouterr().out.splitlines())


class TestMpcSim:
    def test_report(self, tmp_path, cfg, stream, capsys):
        bank = tmp_path / "coord.bank"
        code = main(["mpc-sim", stream, "--shards", "3", "--no-decode", "--bank-out", str(bank), *cfg])
        assert code == EXIT_OK
        first = capsys.readouterr().out.splitlines()[0]
        assert first.startswith("machines ")
        assert first.endswith("schedule owner shards 3")
        assert bank.stat().st_size > 0

    def test_tiny_budget(self, cfg, stream):
        assert main(["mpc-sim", stream, "--shards", "2", "--budget", "16", *cfg]) == 3

    def test_shards_must_be_positive(self, cfg, stream):
        assert main(["mpc-sim", stream, "--shards", "0", *cfg]) == EXIT_INPUT_ERROR


class TestSelftest:
    def test_single_check(self, cfg, capsys):
        assert main(["selftest", "--only", "oracle-consistency", "--trials", "2", "--n", "4", *cfg]) == EXIT_OK
        out = capsys.readouterr().out
        assert "PASS oracle-consistency" in out
        assert "1/1 checks passed" in out
