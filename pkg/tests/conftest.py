import os
import sys

from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", deadline=None, max_examples=500, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(mod.RESULTS):
        checks = mod.RESULTS[number]
        verdict = "PASS" if all(ok for _, ok in checks) else "FAIL"
        detail = "; ".join(label if ok else f"{label} [failed]" for label, ok in checks)
        terminalreporter.write_line(f"criterion {number:2d}: {verdict}  {detail}")
        for note in mod.INFO.get(number, []):
            terminalreporter.write_line(f"              info: {note}")
