import io
import subprocess
import sys

import pytest
from hypothesis import given
from hypothesis import strategies as st

from secdof import cli
from secdof.config import ExperimentConfig, format_config, parse_config
from secdof.errors import IndivisibleStreams, ParseError
from secdof.scenario import Scheme, SystemConfig

MINIMAL = "kind = MAC\nK = 2\nM = 5\nN = 3\nNE = 2\n"


def run(args):
    out, err = io.StringIO(), io.StringIO()
    code = cli.main(args, out=out, err=err)
    return code, out.getvalue(), err.getvalue()


def write(tmp_path, text, name="exp.cfg"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


# -- parsing ---------------------------------------------------------------
def test_minimal_doc_gets_defaults():
    exp = parse_config(MINIMAL)
    assert exp.system == SystemConfig.mac(2, 5, 3, 2)
    assert exp.system.alpha == 0.5 and exp.system.scheme is Scheme.AUTO
    assert exp.trials == 50 and exp.seed == 0 and exp.p_db == (30.0, 60.0, 5.0)
    assert exp.eavesdroppers == 1 and exp.out is None
    assert exp.policy.p_db == (30.0, 35.0, 40.0, 45.0, 50.0, 55.0, 60.0)


def test_comments_and_ic_defaults():
    exp = parse_config("# interference channel\nkind = IC  # two users\nM = 4\nNE = 2\n")
    assert exp.system == SystemConfig.ic(4, 2)


def test_indivisible_streams():
    with pytest.raises(IndivisibleStreams):
        parse_config("kind = MAC\nK = 2\nM = 4\nN = 4\nNE = 3\n")


@pytest.mark.parametrize(
    "extra, line",
    [
        ("p_db = 60:30:5\n", 6),
        ("p_db = 30:60:0\n", 6),
        ("p_db = 30:60\n", 6),
        ("colour = blue\n", 6),
        ("K = 3\n", 6),
        ("trials = many\n", 6),
        ("trials = 0\n", 6),
        ("no equals sign\n", 6),
        ("kind = BC\n", 6),
    ],
)
def test_parse_errors_carry_line_numbers(extra, line):
    with pytest.raises(ParseError) as info:
        parse_config(MINIMAL + extra)
    assert info.value.line == line
    assert str(info.value).startswith(f"line {line}:")


def test_missing_key():
    with pytest.raises(ParseError, match="NE"):
        parse_config("kind = MAC\nK = 2\nM = 5\nN = 3\n")


valid_experiments = st.builds(
    lambda K, M, N, alpha, seed, trials, eav, start, span, step: ExperimentConfig(
        SystemConfig.mac(K, M, N, K, alpha=alpha),
        (float(start), float(start + span), float(step)),
        trials,
        seed,
        eav,
    ),
    K=st.integers(2, 3),
    M=st.integers(4, 8),
    N=st.integers(1, 8),
    alpha=st.floats(0.01, 0.99),
    seed=st.integers(0, 2**31),
    trials=st.integers(1, 500),
    eav=st.integers(1, 4),
    start=st.integers(-10, 40),
    span=st.integers(10, 60),
    step=st.sampled_from([1, 2.5, 5]),
)


@given(valid_experiments)
def test_round_trip(exp):
    assert parse_config(format_config(exp)) == exp


def test_round_trip_with_output_and_scheme():
    exp = parse_config(MINIMAL + "scheme = aligned\nout = result.csv\n")
    assert parse_config(format_config(exp)) == exp


# -- subcommands -----------------------------------------------------------
def test_bound_above_n(tmp_path):
    code, out, _ = run(["bound", write(tmp_path, MINIMAL)])
    assert code == 0
    assert "upper_bound=3\n" in out and "regime=AboveN" in out
    assert "achievable=3" in out and "scheme=nullspace" in out


def test_bound_reports_infeasible_without_failing(tmp_path):
    code, out, _ = run(["bound", write(tmp_path, "kind = MAC\nK = 2\nM = 3\nN = 5\nNE = 2\n")])
    assert code == 0 and "upper_bound=4" in out and "achievable=infeasible" in out


def test_sweep_csv_schema(tmp_path):
    code, out, _ = run(["sweep", write(tmp_path, MINIMAL + "trials = 5\nseed = 7\n")])
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == cli.CSV_HEADER
    assert len(lines) == 1 + 7 + 1
    assert all(len(row.split(",")) == 4 and row.endswith(",5") for row in lines[1:-1])
    assert lines[-1].startswith("# slope=") and " stderr=" in lines[-1] and lines[-1].endswith(" upper_bound=3")


def test_sweep_twice_byte_identical(tmp_path):
    cfg = write(tmp_path, MINIMAL + "trials = 10\nseed = 7\n")
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(["sweep", cfg, "--out", str(a)])[0] == 0
    assert run(["sweep", cfg, "--out", str(b), "--workers", "2"])[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_sweep_out_key_writes_file_only(tmp_path):
    target = tmp_path / "r.csv"
    code, out, err = run(["sweep", write(tmp_path, MINIMAL + f"trials = 3\nout = {target}\n")])
    assert code == 0 and out == "" and err == ""
    assert target.read_text().startswith(cli.CSV_HEADER)


def test_sweep_infeasible_exit_2_names_constraint(tmp_path):
    cfg = write(tmp_path, "kind = MAC\nK = 2\nM = 3\nN = 5\nNE = 2\nscheme = aligned\n")
    code, out, err = run(["sweep", cfg])
    assert code == 2 and out == ""
    assert "binding constraint: NE <= L(L(M-N)+M)" in err


def test_exit_1_on_config_errors(tmp_path):
    assert run(["bound", write(tmp_path, MINIMAL + "bogus = 1\n")])[0] == 1
    assert run(["bound", str(tmp_path / "missing.cfg")])[0] == 1
    code, _, err = run(["sweep", write(tmp_path, MINIMAL + "scheme = hybrid\n")])
    assert code == 1 and "does not fit regime" in err


def test_exit_3_on_numerical_failure(tmp_path, monkeypatch):
    from secdof import secrecy
    from secdof.errors import NotPSD

    def broken(*args, **kwargs):
        raise NotPSD("negative eigenvalue")

    monkeypatch.setattr(secrecy, "sweep", broken)
    code, _, err = run(["sweep", write(tmp_path, MINIMAL)])
    assert code == 3 and "numerical failure" in err


def test_validate_pass_and_fail(tmp_path, monkeypatch):
    cfg = write(tmp_path, MINIMAL)
    code, out, _ = run(["validate", cfg])
    assert code == 0 and out.rstrip().endswith("failed=0")
    assert all(line.startswith(("PASS", "passed=")) for line in out.splitlines())

    from secdof import validation

    monkeypatch.setattr(validation, "check_binning", lambda: iter([("forced", False, "")]))
    code, out, _ = run(["validate", cfg])
    assert code == 4 and "FAIL forced" in out and "failed=1" in out


def test_validate_infeasible_exit_2(tmp_path):
    assert run(["validate", write(tmp_path, "kind = MAC\nK = 2\nM = 3\nN = 5\nNE = 2\n")])[0] == 2


def test_binning_demo(tmp_path):
    code, out, _ = run(["binning"])
    assert code == 0
    ratio = float(out.split("equivocation_ratio=")[1].split()[0])
    assert ratio >= 0.9
    assert "R_t=" in out and "R_s=" in out


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "secdof", "bound", write(tmp_path, MINIMAL)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0 and "regime=AboveN" in proc.stdout
