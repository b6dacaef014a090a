"""Command-line behaviour: output and exit status."""

import json

import pytest

from conftest import PROGRAMS
from sess2gts.cli import main

SYSTEM_TARGET = ("(new v,w)((new d,e)w!<d,e>.e?(service,quit).service!<>.d!<3>.e?(b).0"
                 " | w?(t,u).(new service,quit)u!<service,quit>."
                 "(service?().t?(i).u!<i==3>.0 + quit?().0))")


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_check_system(capsys):
    code, out, _ = run(capsys, "check", PROGRAMS / "system.sp")
    assert code == 0
    assert out.startswith("typed:") and "T-Res" in out


def test_check_derivation(capsys):
    code, out, _ = run(capsys, "check", PROGRAMS / "server.sp", "--derivation")
    assert code == 0 and "T-Offer" in out


def test_encode_system_pinned(capsys):
    code, out, _ = run(capsys, "encode", PROGRAMS / "system.sp", "--phi", "z=v,w",
                       "--phi", "c=d,e", "--phi", "x=t,u", "--label-names")
    assert code == 0
    assert out.splitlines()[0] == SYSTEM_TARGET


def test_encode_open_program_prints_gamma(capsys, tmp_path):
    ann = tmp_path / "ann.json"
    code, out, _ = run(capsys, "encode", PROGRAMS / "server.sp", "--phi", "x=t,u",
                       "--ann-out", ann)
    assert code == 0
    assert any(line.startswith("gamma: ") for line in out.splitlines())
    assert isinstance(json.loads(ann.read_text()), dict)


def test_lin_race(capsys):
    code, out, _ = run(capsys, "lin", PROGRAMS / "race.gt")
    assert code == 1
    assert out.startswith("false(") and "u" in out


def test_lin_worked_environment(capsys):
    code, out, _ = run(capsys, "lin", PROGRAMS / "delta_encoded.gt")
    assert (code, out.strip()) == (0, "true")


def test_wf(capsys):
    assert run(capsys, "wf", PROGRAMS / "delta_encoded.gt")[0] == 0


def test_trace_arity_error(capsys):
    code, out, _ = run(capsys, "trace", PROGRAMS / "arity.gp")
    assert code == 1 and "ERROR: arity" in out


def test_gcheck_replicated_nil(capsys):
    code, out, _ = run(capsys, "gcheck", PROGRAMS / "repl_nil.gp")
    assert code == 0 and out.startswith("typed:")


def test_reduce_steps(capsys):
    code, out, _ = run(capsys, "reduce", PROGRAMS / "system.sp", "--steps", "2")
    assert code == 0 and "--[com z]-->" in out


def test_sub(capsys):
    assert run(capsys, "sub", "&{a: end}", "&{a: end, b: end}")[0] == 0
    assert run(capsys, "sub", "(+){a: end}", "(+){a: end, b: end}")[0] == 1


def test_sim(capsys):
    code, out, _ = run(capsys, "sim", "--theorem", "foc", "--cases", "3", "--choice-free")
    assert code == 0 and "3 passed" in out


def test_fuzz_output_reparses(capsys, tmp_path):
    code, out, _ = run(capsys, "fuzz", "--seed", "4")
    assert code == 0
    prog = tmp_path / "p.sp"
    prog.write_text(out)
    assert run(capsys, "check", prog)[0] == 0


def test_parse_error_exit(capsys, tmp_path):
    bad = tmp_path / "bad.sp"
    bad.write_text("x+!<.0")
    code, _, err = run(capsys, "parse", bad)
    assert code == 2 and "1:5" in err


def test_missing_file(capsys):
    code, _, err = run(capsys, "check", "/nonexistent/file.sp")
    assert code == 2 and "cannot read" in err


def test_bad_bound(capsys):
    code, _, err = run(capsys, "--bound", "depth=x", "lin", PROGRAMS / "race.gt")
    assert code == 2


def test_usage_error(capsys):
    assert run(capsys, "frobnicate")[0] == 2


@pytest.mark.parametrize("name", ["client.sp", "server.sp"])
def test_open_programs_check(capsys, name):
    assert run(capsys, "check", PROGRAMS / name)[0] == 0
