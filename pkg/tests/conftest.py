from pathlib import Path

from hypothesis import HealthCheck, settings

from sess2gts.parser import parse

PROGRAMS = Path(__file__).resolve().parent.parent / "programs"

settings.register_profile("repo", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")

SERVICE = "?<int>.!<bool>.end"
SERVER_TYPE = f"&{{service: {SERVICE}, quit: end}}"
CLIENT = "c- <<service.c-!<3>.c-?(b).0"
SERVER = "x+ >>{service: x+?(i).x+!<i==3>.0, quit: 0}"
SYSTEM = ("(new z)((new c)z+!<c+>.c- <<service.c-!<3>.c-?(b).0"
          " | z-?(x).x >>{service: x?(i).x!<i==3>.0, quit: 0})")


def sp(text):
    return parse("session-proc", text)


def gp(text):
    return parse("generic-proc", text)


def st(text):
    return parse("session-type", text)


def pt(text):
    return parse("process-type", text)


def env(text):
    return parse("type-env", text)


# acceptance criteria record their verdicts here; printed after the run
CRITERIA: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(CRITERIA):
        ok, detail = CRITERIA[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
