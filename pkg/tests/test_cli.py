import math
import subprocess
import sys

import numpy as np
import pytest

from intervalkit.cli import main
from intervalkit.io import read_csv


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


# --- eval ---------------------------------------------------------------------------

def test_eval_table_row(capsys):
    code, out, _ = run(capsys, "eval", "[−2,−1]*[1,2]")
    assert code == 0
    ends, cr = out.splitlines()
    lo, hi = (float(v) for v in ends.strip("[]").split(","))
    assert lo == pytest.approx(-3.87, abs=0.01) and hi == pytest.approx(-0.63, abs=0.01)
    assert cr.startswith("<") and ";" in cr


def test_eval_with_x(capsys):
    code, out, _ = run(capsys, "eval", "x-x", "--x", "[5,9]")
    assert code == 0 and out.splitlines() == ["[-1,1]", "<0;1>"]


def test_eval_real_and_t(capsys):
    code, out, _ = run(capsys, "eval", "sin(t)", "--t", "0.5")
    assert code == 0 and float(out) == math.sin(0.5)


@pytest.mark.parametrize("argv, code, needle", [
    (["eval", "[2,1]"], 2, ""),
    (["eval", "x -"], 2, "offset 3"),
    (["eval", "x"], 3, ""),
    (["eval", "[1,2]/[-1,1]"], 3, ""),
    (["eval", "1", "--x", "3"], 2, ""),
    (["eval"], 2, ""),
    (["frobnicate"], 2, ""),
])
def test_eval_errors(capsys, argv, code, needle):
    got, _, err = run(capsys, *argv)
    assert got == code
    assert needle in err


# --- diff -----------------------------------------------------------------------------

def test_diff_at(capsys):
    code, out, _ = run(capsys, "diff", "[t, t^2+1]", "--at", "0")
    assert code == 0
    cr = out.splitlines()[1]
    c, w = (float(v) for v in cr.strip("<>").split(";"))
    assert c == pytest.approx(0.5, abs=1e-9) and w == pytest.approx(math.exp(-1), abs=1e-9)


def test_diff_gh(capsys):
    code, out, _ = run(capsys, "diff", "--gh", "[t, t^2+1]", "--at", "0")
    lo, hi = (float(v) for v in out.strip().strip("[]").split(","))
    assert code == 0 and abs(lo) < 1e-9 and hi == pytest.approx(1, abs=1e-9)


def test_diff_switching(capsys):
    code, out, _ = run(capsys, "diff", "--switching", "[x^2/2, 1+x^2/2+2*sin(x)^2]",
                       "--domain", "0", str(2 * math.pi))
    pts = [float(v) for v in out.split()]
    assert code == 0 and len(pts) == 3
    assert np.allclose(pts, [math.pi / 2, math.pi, 1.5 * math.pi], atol=1e-8)


def test_diff_switching_needs_domain(capsys):
    code, _, _ = run(capsys, "diff", "--switching", "[t, t^2+1]")
    assert code == 2


def test_diff_grid(capsys):
    code, out, _ = run(capsys, "diff", "[t, t^2+1]", "--grid", "0.1", "0.9", "5")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "t,d_l,d_r,d_c,d_w" and len(lines) == 6
    t, *_, dc, dw = (float(v) for v in lines[1].split(","))
    assert dc == pytest.approx(t + 0.5, abs=1e-8)
    assert dw == pytest.approx(math.exp((2 * t - 1) / (t * t - t + 1)), abs=1e-8)


def test_diff_nondifferentiable(capsys):
    code, _, err = run(capsys, "diff", "[-abs(t), abs(t)+1]", "--at", "0")
    assert code == 3 and "disagree" in err


# --- integrate ---------------------------------------------------------------------------

def test_integrate_examples(capsys):
    code, out, _ = run(capsys, "integrate", "<t+1/2; exp((2*t-1)/(t^2-t+1))>", "0", "1")
    lo, hi = (float(v) for v in out.splitlines()[0].strip("[]").split(","))
    assert code == 0 and abs(lo) < 1e-9 and hi == pytest.approx(2, abs=1e-9)
    code, out, _ = run(capsys, "integrate", "[-1,1]", "0", "3")
    assert out.splitlines()[0] == "[-1,1]"
    code, out, _ = run(capsys, "integrate", "[t^2, 2*t+1]*(-1)", "0", "1", "-v")
    c, w = (float(v) for v in out.splitlines()[1].strip("<>").split(";"))
    rho = 2 + math.log(2) - 2 * math.sqrt(2) * math.atanh(math.sqrt(2) / 2)
    assert c == pytest.approx(-7 / 6, abs=1e-9) and w == pytest.approx(math.exp(rho), rel=1e-9)
    assert "evaluations" in out


def test_integrate_bad_range(capsys):
    assert run(capsys, "integrate", "[0,1]", "1", "0")[0] == 2


# --- solve / compare ------------------------------------------------------------------------

RATIONAL = '''rhs = "[1,2]*t/(1+x^2)"
t0 = 0
t_end = 4
x0 = "[-1,1]"
'''


def _write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_solve_rational_final_row(tmp_path, capsys):
    cfg = _write(tmp_path, "rational.toml", RATIONAL)
    code, out, _ = run(capsys, "solve", str(cfg), "--out", str(tmp_path / "o"))
    assert code == 0 and "method: rk4" in out and "runtime_s" in out
    tr = read_csv(tmp_path / "o" / "rational.csv")
    t = 4.0
    xi = 0.5 * np.cbrt(9 * t ** 2 + np.sqrt(81 * t ** 4 + 64))
    ln2 = math.log(2)
    eta = 0.5 * np.cbrt(-6 * t ** 2 * ln2 + 2 * np.sqrt(16 + 9 * t ** 4 * ln2 ** 2))
    u, w = xi - 1 / xi, math.exp(eta - 1 / eta)
    assert abs(tr.lo[-1] - (u - w)) <= 1e-6 and abs(tr.hi[-1] - (u + w)) <= 1e-6
    assert (tmp_path / "o" / "rational_summary.txt").read_text() == out


def test_solve_zero_rhs_constant(tmp_path, capsys):
    cfg = _write(tmp_path, "z.toml", 'rhs = "[-1,1]"\nt0 = 0\nt_end = 1\nx0 = "[2,3]"\nstep = 0.1\n')
    assert run(capsys, "solve", str(cfg))[0] == 0
    tr = read_csv(tmp_path / "z.csv")
    assert np.all(tr.lo == 2) and np.all(tr.hi == 3)


def test_solve_is_byte_deterministic(tmp_path, capsys):
    cfg = _write(tmp_path, "r.toml", RATIONAL + "step = 0.01\n")
    run(capsys, "solve", str(cfg), "--out", str(tmp_path / "a"))
    run(capsys, "solve", str(cfg), "--out", str(tmp_path / "b"))
    assert (tmp_path / "a" / "r.csv").read_bytes() == (tmp_path / "b" / "r.csv").read_bytes()


def test_solve_gh_writes_four_files(tmp_path, capsys):
    cfg = _write(tmp_path, "gh.toml", '''rhs = "smul(sin(t), x)"
t0 = 0
t_end = 6
x0 = "[1,2]"
method = "gh_branch"
step = 0.01
[gh]
switch_times = ["pi"]
branches = "all"
''')
    code, out, _ = run(capsys, "solve", str(cfg))
    assert code == 0 and "branches_kept: 4" in out
    assert len(list(tmp_path.glob("gh_*.csv"))) == 4


def test_solve_gh_reports_discarded(tmp_path, capsys):
    cfg = _write(tmp_path, "lin.toml", '''rhs = "smul(-1, x) + smul([1,2], t)"
t0 = 0
t_end = 3
x0 = "[0,1]"
method = "gh_branch"
[gh]
switch_times = [1.0]
''')
    code, out, _ = run(capsys, "solve", str(cfg))
    assert code == 0 and out.count("discarded:") == 2


def test_solve_errors(tmp_path, capsys):
    assert run(capsys, "solve", str(tmp_path / "missing.toml"))[0] == 2
    bad = _write(tmp_path, "bad.toml", RATIONAL + "wat = 1\n")
    assert run(capsys, "solve", str(bad))[0] == 2
    sing = _write(tmp_path, "sing.toml",
                  'rhs = "x/(t-1)"\nt0 = 0\nt_end = 2\nx0 = "[1,2]"\nstep = 0.25\n')
    code, _, err = run(capsys, "solve", str(sing))
    assert code == 4 and "t=1.0" in err
    pic = _write(tmp_path, "pic.toml", RATIONAL + 'method = "picard"\n[picard]\nmax_iter = 1\n')
    assert run(capsys, "solve", str(pic))[0] == 4


def test_compare_round_trip_and_outputs(tmp_path, capsys):
    cfg = _write(tmp_path, "r.toml", RATIONAL + "step = 0.01\n")
    sw = _write(tmp_path, "s.toml", RATIONAL + 'step = 0.01\nmethod = "param_sweep"\n')
    run(capsys, "solve", str(cfg))
    run(capsys, "solve", str(sw))
    a, b = tmp_path / "r.csv", tmp_path / "s.csv"
    code, out, _ = run(capsys, "compare", str(a), str(a))
    assert code == 0 and out.splitlines()[1].split()[2] == "0"
    svg, rows = tmp_path / "o.svg", tmp_path / "rows.csv"
    code, out, _ = run(capsys, "compare", str(a), str(b), str(a), "--svg", str(svg),
                       "--csv-out", str(rows))
    lines = out.splitlines()
    assert code == 0 and len(lines) == 4
    assert math.isfinite(float(lines[1].split()[2]))
    assert svg.read_text().count("<polyline") == 6
    assert rows.read_text().splitlines()[0] == "t,lo_0,hi_0,lo_1,hi_1,lo_2,hi_2"


def test_compare_errors(tmp_path, capsys):
    a = _write(tmp_path, "a.toml", RATIONAL + "step = 0.1\n")
    b = _write(tmp_path, "b.toml", RATIONAL + "step = 0.05\n")
    run(capsys, "solve", str(a))
    run(capsys, "solve", str(b))
    assert run(capsys, "compare", str(tmp_path / "a.csv"), str(tmp_path / "b.csv"))[0] == 5
    assert run(capsys, "compare", str(tmp_path / "nope.csv"))[0] == 2


def test_selftest_subset(capsys):
    code, out, _ = run(capsys, "selftest", "--only", "1", "2")
    assert code == 0
    assert out.count("PASS") == 2 and "2/2 criteria passed" in out


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "intervalkit", "eval", "[1,2]+[1,2]"],
                       capture_output=True, text=True, check=False)
    assert r.returncode == 0
    assert r.stdout.splitlines()[0] == "[2.75,3.25]"
