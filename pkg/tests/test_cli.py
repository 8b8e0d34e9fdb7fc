import io
import json
import subprocess
import sys

import pytest

from fibersis.cli import main


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


ALPHA8 = ("--matrix", "MATRIX", "--margin", "9")


@pytest.fixture
def alpha8(tmp_path):
    path = tmp_path / "alpha.txt"
    path.write_text("1 2\n1 8\n")
    return ["--matrix", str(path), "--margin", "9"]


def test_bounds_alpha(alpha8):
    assert run("bounds", *alpha8, "--method", "lp") == (0, "0 9\n")
    assert run("bounds", *alpha8, "--method", "ip") == (0, "1 9\n")
    assert run("bounds", *alpha8, "--prefix", "3") == (1, "EMPTY\n")
    assert run("bounds", *alpha8, "--prefix", "1") == (0, "1 1\n")


def test_bounds_independence():
    code, text = run("bounds", "--model", "indep:2,2", "--margin", "1,1,1,1")
    assert (code, text) == (0, "0 1\n")
    code, _ = run("bounds", "--model", "indep:2,2", "--margin", "1,1,1,1", "--cell", "2")
    assert code == 2


def test_matrix_file_and_vector_file(tmp_path):
    (tmp_path / "b.txt").write_text("1 1\n1 1\n")
    code, text = run("enumerate", "--model", "indep:2,2", "--margin", str(tmp_path / "b.txt"))
    assert (code, text) == (0, "2\n")


def test_enumerate_list_and_check(alpha8):
    assert run("enumerate", *alpha8, "--list") == (0, "2\n1,1\n9,0\n")
    assert run("enumerate", *alpha8, "--check", "1,1") == (0, "IN_FIBER\n")
    assert run("enumerate", *alpha8, "--check", "2,1") == (1, "NOT_IN_FIBER\n")


def test_enumerate_empty_and_budget():
    assert run("enumerate", "--model", "indep:2,2", "--margin", "2,0,0,1") == (1, "0\n")
    code, _ = run("enumerate", "--model", "indep:4,4", "--margin", "30,30,30,30,30,30,30,30", "--budget", "10")
    assert code == 3


def test_sample_lines_round_trip(alpha8):
    code, text = run("sample", *alpha8, "--method", "lp", "--samples", "40", "--seed", "3")
    assert code == 0
    lines = text.splitlines()
    assert len(lines) == 40
    accepted = [l for l in lines if not l.startswith("REJECTED@")]
    assert accepted and len(accepted) < 40
    for line in accepted:
        table, weight = line.split()
        assert weight == "10"
        assert run("enumerate", *alpha8, "--check", table) == (0, "IN_FIBER\n")
    for line in lines:
        if line.startswith("REJECTED@"):
            assert line.split()[0] == "REJECTED@1"


def test_sample_free_never_rejects():
    code, text = run("sample", "--model", "bilogit:2,2", "--table", "1,2,0,1,1,0,2,1",
                     "--sampler", "free", "--samples", "50")
    assert code == 0 and "REJECTED" not in text and len(text.splitlines()) == 50


def test_sample_free_empty_fiber():
    code, _ = run("sample", "--model", "indep:2,2", "--margin", "2,0,0,1", "--sampler", "free")
    assert code == 1


def test_estimate_json():
    code, text = run("estimate", "--model", "indep:2,2", "--margin", "1,1,1,1", "--samples", "30", "--seed", "5")
    assert code == 0
    record = json.loads(text)
    assert record == {"estimate": 2.0, "log10_estimate": pytest.approx(0.30103), "stderr": 0.0,
                      "rejections": 0, "N": 30, "seed": 5}


def test_estimate_zero_count():
    code, text = run("estimate", "--model", "unilogit:3", "--margin", "1,2,1,0,1", "--samples", "10")
    record = json.loads(text)
    assert code == 0 and record["estimate"] == 0 and record["log10_estimate"] is None
    assert record["rejections"] == 10


def test_estimate_cell_order_and_workers():
    base = ("estimate", "--model", "unilogit:4", "--table", "2,1,3,1,1,2,0,2", "--samples", "60")
    assert run(*base, "--workers", "2") == run(*base)
    code, text = run(*base, "--cell-order", "7,6,5,4,3,2,1,0")
    assert code == 0 and json.loads(text)["estimate"] > 0


def test_semigroup_output():
    assert run("semigroup", "--model", "indep:2,2", "--box", "3") == (0, "SATURATED\n")


def test_semigroup_matrix_file(tmp_path):
    path = tmp_path / "m.txt"
    path.write_text("1 2\n2 3\n")
    assert run("semigroup", "--matrix", str(path), "--box", "8") == (0, "1\nNOT-SATURATED\n")


def test_generate():
    code, text = run("generate", "--option", "2", "--model", "unilogit:5", "--count", "3", "--margins", "--seed", "1")
    assert code == 0
    lines = text.splitlines()
    assert len(lines) == 3
    for line in lines:
        table, margin = line.split()
        assert len(table.split(",")) == 10 and len(margin.split(",")) == 7
    assert run("generate", "--k", "7", "--seed", "4") == run("generate", "--k", "7", "--seed", "4")
    assert run("generate", "--k", "7", "--margins")[0] == 2
    assert run("generate")[0] == 2


def test_experiment_csv():
    code, text = run("experiment", "--option", "1", "2", "--models", "unilogit:5", "bilogit:2,3",
                     "--samples", "5", "--tables", "3", "--seed", "2")
    assert code == 0
    lines = text.splitlines()
    assert lines[0] == "option,model,levels,time_sec,reject_tables"
    assert len(lines) == 5
    assert lines[1].startswith("1,univariate,5,") and lines[4].startswith('2,bivariate,"2,3",')


def test_usage_errors():
    assert run("bounds", "--model", "indep:2,2")[0] == 2
    assert run("bounds", "--model", "indep:2,2", "--margin", "1,1")[0] == 2
    assert run("bounds", "--model", "nope:3", "--margin", "1")[0] == 2
    assert run("bounds", "--model", "indep:2,2", "--margin", "1,1,1,1", "--table", "1,0,0,1")[0] == 2
    assert run("sample", "--model", "indep:2,2", "--margin", "1,1,1,1", "--samples", "0")[0] == 2
    with pytest.raises(SystemExit) as info:
        run("bounds", "--method", "simplex")
    assert info.value.code == 2


def test_identical_invocations_identical_output():
    argv = ("sample", "--model", "unilogit:5", "--table", "1,0,2,0,3,0,1,0,0,2", "--samples", "25", "--seed", "9")
    assert run(*argv) == run(*argv)


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "fibersis", "enumerate", "--model", "indep:2,2",
                           "--margin", "1,1,1,1"], capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and proc.stdout == "2\n"
