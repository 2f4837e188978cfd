import csv
import io
from pathlib import Path

import pytest

from pointerlab import formats
from pointerlab.cli import CSV_HEADER, UsageError, main, parse_sizes
from pointerlab.config import (
    ConfigError, LabConfig, derive_seed, dumps_config, load_config, loads_config,
)
from pointerlab.functions import all_one_columns
from pointerlab.measures import dump_table, or_table, parity_table

ROOT = Path(__file__).resolve().parents[1]


# ---------------------------------------------------------------- config

def test_config_roundtrip():
    for cfg in (LabConfig(), LabConfig(eps=0.01, inject_errors=True, max_reps=4, C0=2.5)):
        assert loads_config(dumps_config(cfg)) == cfg


def test_shipped_config_is_default():
    assert load_config(ROOT / "lab.conf") == LabConfig()


def test_config_comments_and_partial():
    cfg = loads_config("# constants\n\neps = 0.1  # looser\ninject_errors = yes\n")
    assert cfg.eps == 0.1 and cfg.inject_errors and cfg.c_grover == 1.0


@pytest.mark.parametrize("text", ["eps 0.1", "nope = 1", "eps = abc", "eps = 2",
                                  "inject_errors = maybe", "max_reps = 0", "c_grover = -1"])
def test_config_errors(text):
    with pytest.raises(ConfigError):
        loads_config(text)


def test_derive_seed():
    assert derive_seed(1, "a", 2) == derive_seed(1, "a", 2)
    assert derive_seed(1, "a", 2) != derive_seed(1, "a", 3)
    assert 0 <= derive_seed("x") < 2 ** 63


def test_parse_sizes():
    assert parse_sizes("8x4,16x8x2") == [(8, 4, 1), (16, 8, 2)]
    with pytest.raises(UsageError):
        parse_sizes("8by4")
    with pytest.raises(UsageError):
        parse_sizes("")


# ---------------------------------------------------------------- cli

def run(args, capsys):
    code = main([str(a) for a in args])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_gen_eval_roundtrip(tmp_path, capsys):
    f = tmp_path / "x.txt"
    assert run(["gen", "--family", "f", "--n", 16, "--m", 8, "--sign", "pos", "--seed", 7,
                "--out", f], capsys)[0] == 0
    assert run(["eval", f], capsys)[:2] == (0, "1\n")
    assert run(["gen", "--family", "f", "--n", 16, "--m", 8, "--sign", "neg", "--out", f],
               capsys)[0] == 0
    assert run(["eval", f], capsys)[1] == "0\n"


def test_gen_h_marked_columns(tmp_path, capsys):
    f = tmp_path / "h.txt"
    run(["gen", "--family", "h", "--k", 3, "--n", 8, "--m", 8, "--sign", "pos", "--out", f],
        capsys)
    x = formats.load_instance(f.read_text())
    assert len(all_one_columns(x)) == 3


def test_gen_g_odd_m_rejected(capsys):
    code, _, err = run(["gen", "--family", "g", "--n", 4, "--m", 5], capsys)
    assert code == 2 and "even" in err


def test_gen_infeasible(capsys):
    assert run(["gen", "--family", "f", "--n", 1, "--m", 8], capsys)[0] != 0


def test_eval_truncated(tmp_path, capsys):
    f = tmp_path / "x.txt"
    run(["gen", "--family", "f", "--n", 8, "--m", 4, "--out", f], capsys)
    text = f.read_text()
    f.write_text(text[: len(text) // 2])
    assert run(["eval", f], capsys)[0] == 2
    assert run(["eval", tmp_path / "missing.txt"], capsys)[0] == 2


def test_eval_all_zero(tmp_path, capsys):
    f = tmp_path / "z.txt"
    lines = ["f 2 2 1"] + [f"{i} {j} 0 - - -" for i in (1, 2) for j in (1, 2)]
    f.write_text("\n".join(lines) + "\n")
    assert run(["eval", f], capsys)[1] == "0\n"


def _rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_run_csv(tmp_path, capsys):
    f = tmp_path / "x.txt"
    run(["gen", "--family", "g", "--n", 8, "--m", 8, "--out", f], capsys)
    code, out, _ = run(["run", "--algorithm", "qe_g", "--instance", f, "--trials", 3], capsys)
    assert code == 0 and out.splitlines()[0] == ",".join(CSV_HEADER)
    rows = _rows(out)
    assert len(rows) == 3 and all(r["output"] == r["truth"] == "1" for r in rows)


def test_run_wrong_family(tmp_path, capsys):
    f = tmp_path / "x.txt"
    run(["gen", "--family", "g", "--n", 8, "--m", 8, "--out", f], capsys)
    assert run(["run", "--algorithm", "r0_f", "--instance", f], capsys)[0] == 2
    assert run(["run", "--algorithm", "zzz", "--instance", f], capsys)[0] == 2


def test_sweep_r0_zero_error(capsys):
    code, out, _ = run(["sweep", "--algorithm", "r0_f", "--sizes", "16x8,32x16,64x32",
                        "--trials", 100, "--sign", "mix", "--seed", 3], capsys)
    rows = _rows(out)
    assert code == 0 and len(rows) == 300
    assert all(r["output"] == r["truth"] for r in rows)
    assert {r["truth"] for r in rows} == {"0", "1"}


def test_sweep_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        run(["sweep", "--algorithm", "q_f", "--sizes", "16x8", "--trials", 5, "--seed", 9,
             "--garbage", "random", "--out", path], capsys)
    assert a.read_bytes() == b.read_bytes()


def test_sweep_unknown_algorithm(capsys):
    assert run(["sweep", "--algorithm", "bogus", "--sizes", "8x4"], capsys)[0] == 2


def test_adversary_report(capsys):
    code, out, _ = run(["adversary", "--strategy", "column-major", "--m", 4], capsys)
    assert code == 0
    assert "undetermined_through 16" in out and "target 15" in out and "holds yes" in out
    assert "# negative witness, evaluate = 0" in out
    assert "# positive witness, evaluate = 1" in out


def test_potential_report(capsys):
    code, out, _ = run(["potential", "--variant", "g-lower", "--n", 8, "--m", 8,
                        "--samples", 200], capsys)
    assert code == 0 and "I_0 0\n" in out and "bound 0.500000" in out


def test_measure(tmp_path, capsys):
    f = tmp_path / "or3.txt"
    f.write_text(dump_table(or_table(3)))
    assert run(["measure", f], capsys)[1] == "D 3\nC0 3\nC1 1\ndeg 3\n"
    f.write_text(dump_table(parity_table(4)))
    out = run(["measure", f], capsys)[1]
    assert "D 4\n" in out and "deg 4\n" in out


def test_measure_oversize(tmp_path, capsys):
    f = tmp_path / "big.txt"
    f.write_text("25 2\n0\n")
    assert run(["measure", f], capsys)[0] == 3


def test_bad_config_flag(tmp_path, capsys):
    cfg = tmp_path / "c.conf"
    cfg.write_text("eps = 7\n")
    assert run(["sweep", "--algorithm", "r0_f", "--sizes", "8x4", "--config", cfg], capsys)[0] == 2


def test_config_changes_cost(tmp_path, capsys):
    cfg = tmp_path / "c.conf"
    cfg.write_text("c_exact = 2.0\n")
    base = _rows(run(["sweep", "--algorithm", "qe_g", "--sizes", "8x8", "--trials", 2],
                     capsys)[1])
    scaled = _rows(run(["sweep", "--algorithm", "qe_g", "--sizes", "8x8", "--trials", 2,
                        "--config", cfg], capsys)[1])
    assert [2 * float(r["cost_units"]) for r in base] == [float(r["cost_units"]) for r in scaled]
