import io
import math

import pytest

from lienard.cli import JobConfig, main, read_config, run


def _run(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_check_builtin(capsys):
    code, out, _ = _run(["check", "--system", "eq48"], capsys)
    assert code == 0 and out.strip() == "holds=true k=1 residual=0"


def test_check_not_integrable_exit_code(capsys):
    code, out, _ = _run(["check", "--f", "[1]", "--g", "[0, 0, 1]"], capsys)
    assert code == 1 and out.startswith("holds=false")


def test_usage_errors(capsys):
    assert _run([], capsys)[0] == 2
    assert _run(["solve", "--f", "[1]", "--g", "[2, 3]"], capsys)[0] == 2
    assert _run(["kernel-eval"], capsys)[0] == 2
    assert _run(["check", "--f", "[1, x]", "--g", "[1]"], capsys)[0] == 2


def test_numerical_error_exit_code(capsys):
    # f(-1) = 0 for eq48
    code, _, err = _run(["solve", "--system", "eq48", "--x0", "-1", "--xdot0", "1"], capsys)
    assert code == 3 and "numerical error" in err


def test_construct(capsys):
    code, out, _ = _run(["construct", "--f", "[1, 1]", "--k", "1", "--C1", "1"], capsys)
    assert code == 0 and out.startswith("g = ")
    assert "3/2" in out and "1/2" in out


def test_solve_csv_is_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        assert _run(["solve", "--system", "gvdp", "--out", str(path), "--n-samples", "32"], capsys)[0] == 0
    assert a.read_bytes() == b.read_bytes()
    lines = a.read_text().splitlines()
    assert lines[0] == "w,x,t,xdot" and len(lines) > 32
    w, x, t, v = (float(s) for s in lines[1].split(","))
    assert all(math.isfinite(q) or math.isinf(q) for q in (w, x, t, v))


def test_solve_w_range_and_plot(tmp_path, capsys):
    svg = tmp_path / "x.svg"
    code, out, _ = _run(["solve", "--system", "eq48", "--w-range", "0.5,5", "--n-samples", "16",
                         "--plot", str(svg)], capsys)
    assert code == 0 and len(out.splitlines()) >= 17
    text = svg.read_text()
    assert text.startswith("<?xml") and "<polyline" in text and text.rstrip().endswith("</svg>")


def test_verify_and_sweep(capsys):
    code, out, _ = _run(["verify", "--system", "eq53"], capsys)
    assert code == 0 and out.startswith("PASS")
    code, out, _ = _run(["sweep", "--system", "eq48", "--vary", "k=0.5,2", "--n-samples", "64"], capsys)
    rows = out.splitlines()
    assert code == 0 and rows[0].startswith("k,max_abs_x_error") and len(rows) == 3


def test_kernel_eval(capsys):
    code, out, _ = _run(["kernel-eval", "--k", "1", "--w", "0.5,1", "--G0", "1,0,0,1"], capsys)
    assert code == 0
    assert "G0=0.709275411" in out and out.count("\n") == 5


def test_config_file_with_flag_override(tmp_path, capsys):
    cfg = tmp_path / "job.cfg"
    cfg.write_text("# eq48 job\ncommand = check\nsystem = eq48\nk = 2\n")
    assert read_config(cfg)["k"] == "2"
    code, out, _ = _run(["--config", str(cfg)], capsys)
    assert code == 0 and "k=2" in out
    code, out, _ = _run(["--config", str(cfg), "check", "--k", "3"], capsys)
    assert code == 0 and "k=3" in out


def test_config_rejects_unknown_key(tmp_path, capsys):
    cfg = tmp_path / "job.cfg"
    cfg.write_text("command = check\nbogus = 1\n")
    assert _run(["--config", str(cfg)], capsys)[0] == 2


def test_run_unknown_command():
    assert run(JobConfig("nope"), io.StringIO()) == 2
