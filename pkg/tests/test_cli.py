import json

import pytest

from rankdec.cli import main, parse_fraction
from fractions import Fraction


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# ---------------------------------------------------------------
# fraction flags
# ---------------------------------------------------------------


def test_parse_fraction():
    assert parse_fraction("1/2") == Fraction(1, 2)
    assert parse_fraction("3") == Fraction(3)
    for bad in ("0.5", "a/b", "1/0"):
        with pytest.raises(Exception):
            parse_fraction(bad)


# ---------------------------------------------------------------
# count
# ---------------------------------------------------------------


def test_count_ball_volume(capsys):
    code, out, _ = run_cli(capsys, "count", "--q", "2", "--m", "2", "--n", "2", "--rho", "1/2")
    assert code == 0
    assert out.strip().splitlines()[-1] == "10"


def test_count_grassmann(capsys):
    code, out, _ = run_cli(capsys, "count", "--q", "2", "--grassmann", "4", "2")
    assert code == 0
    assert out.strip().splitlines()[-1] == "35"


def test_count_rank(capsys):
    code, out, _ = run_cli(capsys, "count", "--q", "2", "--m", "2", "--n", "2", "--rank", "1")
    assert code == 0
    assert out.strip().splitlines()[-1] == "9"


def test_count_usage_errors(capsys):
    code, _, err = run_cli(capsys, "count", "--q", "2")
    assert code == 1 and err
    code, _, err = run_cli(capsys, "count", "--q", "2", "--m", "2", "--n", "2", "--rho", "0.5")
    assert code == 1 and "fraction" in err


def test_decimal_rho_rejected(capsys):
    code, _, err = run_cli(capsys, "count", "--q", "2", "--m", "2", "--n", "2", "--rho", "0.25")
    assert code == 1


# ---------------------------------------------------------------
# sample
# ---------------------------------------------------------------


def test_sample_matrix_deterministic(capsys):
    args = ("sample", "--kind", "matrix", "--q", "2", "--m", "2", "--n", "2", "--seed", "42")
    code, out1, _ = run_cli(capsys, *args)
    assert code == 0
    code, out2, _ = run_cli(capsys, *args)
    assert out1 == out2
    assert "2 2 2" in out1
    assert '"seed":42' in out1


def test_sample_fresh_seed_is_echoed(capsys):
    code, out, _ = run_cli(capsys, "sample", "--kind", "matrix", "--q", "2", "--m", "2", "--n", "2")
    assert code == 0
    config = json.loads(out.splitlines()[0].removeprefix("config "))
    assert isinstance(config["seed"], int)


def test_sample_subspace(capsys):
    code, out, _ = run_cli(capsys, "sample", "--kind", "subspace", "--q", "2", "--m", "3",
                           "--s", "1", "--seed", "1")
    assert code == 0
    assert out.splitlines()[1].startswith("2 1 3")


def test_sample_validation(capsys):
    code, _, err = run_cli(capsys, "sample", "--kind", "ball", "--q", "2", "--m", "2", "--n", "2")
    assert code == 1  # missing --rho


# ---------------------------------------------------------------
# chain
# ---------------------------------------------------------------


def test_chain_certificate(tmp_path, capsys):
    setfile = tmp_path / "s.txt"
    setfile.write_text("".join(f"{b:08b}\n" for b in range(256)))
    code, out, _ = run_cli(capsys, "chain", str(setfile), "--q", "2", "--c", "2", "--seed", "1")
    assert code == 0
    lines = out.splitlines()
    assert lines[1] == "guarantee 2"
    length = int(lines[2].split()[1])
    assert length >= 2
    assert len(lines) == 4 + length


def test_chain_bad_file(tmp_path, capsys):
    setfile = tmp_path / "s.txt"
    setfile.write_text("01x0\n")
    code, _, err = run_cli(capsys, "chain", str(setfile), "--q", "2", "--c", "2")
    assert code == 1 and "digits" in err


# ---------------------------------------------------------------
# check-ld
# ---------------------------------------------------------------

CODE_TEXT = """2 2 2 2 linear
2 2 2
1 0
0 1
2 2 2
0 1
1 1
"""


def test_check_ld_exhaustive(tmp_path, capsys):
    codefile = tmp_path / "c.txt"
    codefile.write_text(CODE_TEXT)
    code, out, _ = run_cli(capsys, "check-ld", str(codefile), "--rho", "1/2", "--L", "3",
                           "--exhaustive")
    assert code == 0
    assert "list-decodable true" in out


def test_check_ld_monte_carlo(tmp_path, capsys):
    codefile = tmp_path / "c.txt"
    codefile.write_text(CODE_TEXT)
    code, out, _ = run_cli(capsys, "check-ld", str(codefile), "--rho", "1/2", "--L", "3",
                           "--centers", "50", "--seed", "3")
    assert code == 0
    assert "max-list-size" in out and "within-bound true" in out


def test_check_ld_missing_mode(tmp_path, capsys):
    codefile = tmp_path / "c.txt"
    codefile.write_text(CODE_TEXT)
    code, _, err = run_cli(capsys, "check-ld", str(codefile), "--rho", "1/2", "--L", "1")
    assert code == 1


# ---------------------------------------------------------------
# experiment
# ---------------------------------------------------------------


def test_experiment_writes_outputs(tmp_path, capsys):
    out_csv = tmp_path / "r.csv"
    code, out, _ = run_cli(
        capsys, "experiment", "--id", "lemma41", "--q", "2", "--m", "2", "--n", "2",
        "--rho", "1/2", "--center", "zero", "--trials", "50", "--seed", "7",
        "--out", str(out_csv), "--threads", "1",
    )
    assert code == 0
    assert out_csv.exists()
    assert (tmp_path / "r.summary.json").exists()
    assert out.startswith("config ")
    config = json.loads(out.splitlines()[0].removeprefix("config "))
    assert config["master_seed"] == 7


def test_experiment_byte_identical_outputs(tmp_path, monkeypatch, capsys):
    # identical (config, seed) must give identical bytes, whatever --threads;
    # the relative --out path keeps the echoed config identical across runs
    def once(subdir, threads):
        d = tmp_path / subdir
        d.mkdir()
        monkeypatch.chdir(d)
        code, _, _ = run_cli(
            capsys, "experiment", "--id", "claim42", "--q", "2", "--m", "4", "--n", "1",
            "--d1", "2", "--d2", "2", "--alpha", "1/2", "--trials", "200", "--seed", "5",
            "--out", "r.csv", "--threads", str(threads),
        )
        assert code == 0
        return (d / "r.csv").read_bytes(), (d / "r.summary.json").read_bytes()

    assert once("a", 1) == once("b", 2)


def test_experiment_config_file_with_flag_override(tmp_path, capsys):
    cfg_file = tmp_path / "cfg.json"
    cfg_file.write_text(json.dumps({
        "experiment": "lemma43", "q": 2, "m": 2, "n": 2, "rho": "1/2",
        "ell": 2, "span_factor": 2, "trials": 10, "master_seed": 1,
    }))
    code, out, _ = run_cli(capsys, "experiment", "--config", str(cfg_file),
                           "--trials", "20", "--threads", "1")
    assert code == 0
    config = json.loads(out.splitlines()[0].removeprefix("config "))
    assert config["trials"] == 20  # flag wins over file


def test_experiment_fresh_seed_echoed(tmp_path, capsys):
    code, out, _ = run_cli(
        capsys, "experiment", "--id", "lemma43", "--q", "2", "--m", "2", "--n", "2",
        "--rho", "1/2", "--ell", "2", "--span-factor", "2", "--trials", "5", "--threads", "1",
    )
    assert code == 0
    config = json.loads(out.splitlines()[0].removeprefix("config "))
    assert config["master_seed"] >= 0


def test_experiment_validation_exit_code(capsys):
    code, _, err = run_cli(capsys, "experiment", "--id", "lemma41", "--q", "2",
                           "--m", "2", "--n", "2", "--trials", "5", "--threads", "1")
    assert code == 1 and err


def test_experiment_guard_exit_code(capsys):
    code, _, err = run_cli(
        capsys, "experiment", "--id", "lemma43", "--q", "2", "--m", "21", "--n", "21",
        "--rho", "1/2", "--ell", "21", "--span-factor", "2", "--trials", "1", "--threads", "1",
    )
    assert code == 2


def test_unknown_flag_exits_one(capsys):
    code, _, err = run_cli(capsys, "count", "--q", "2", "--frobnicate")
    assert code == 1 and "usage" in err.lower()
