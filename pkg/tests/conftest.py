import numpy as np
import pytest

from ratpencil import RationalFunction


def two_pole():
    return RationalFunction([-0.1, -2.1], [0.5, 0.5])


def eight_pole():
    z = [0.9, -0.9, 0.9j, -0.9j, 1.1, -1.1, 1.1j, -1.1j]
    return RationalFunction(z, np.arange(1, 9))


def four_pole():
    return RationalFunction([0.2, 0.5, 2, 50], [1, 1, 1, 1])


EXAMPLES = {"two_pole": two_pole, "eight_pole": eight_pole, "four_pole": four_pole}


@pytest.fixture(params=sorted(EXAMPLES))
def example(request):
    return EXAMPLES[request.param]()


def pytest_terminal_summary(terminalreporter):
    lines = []
    for outcome in ("passed", "failed"):
        for rep in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance.py::test_criterion_" not in nodeid or rep.when != "call":
                continue
            n = int(nodeid.split("test_criterion_")[1].split("_")[0])
            detail = ""
            for name, text in rep.sections:
                if "stdout" in name:
                    detail = text.strip().splitlines()[-1] if text.strip() else ""
            lines.append((n, "PASS" if outcome == "passed" else "FAIL", detail))
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for n, word, detail in sorted(lines):
        terminalreporter.write_line(f"criterion {n:2d}: {word}  {detail}")


def random_pencil_spec(rng, max_order=4, min_sep=0.3):
    """Random well-separated spec: inside, outside or generic, M <= max_order."""
    from ratpencil import PencilSpec

    M = int(rng.integers(1, max_order + 1))
    side = rng.choice(["inside", "outside", "generic"])
    while True:
        if side == "outside":
            z = rng.uniform(1.2, 3.0, M) * np.exp(2j * np.pi * rng.random(M))
            pts = 1 / z
        else:
            hi = 0.95 if side == "inside" else 1.5
            z = pts = rng.uniform(0.1, hi, M) * np.exp(2j * np.pi * rng.random(M))
        d = np.abs(pts[:, None] - pts[None, :]) + 10 * np.eye(M)
        if d.min() >= min_sep * (0.3 if side == "outside" else 1):
            break
    g = rng.uniform(0.5, 2.0, M) * np.exp(2j * np.pi * rng.random(M))
    if side == "outside":
        return PencilSpec.outside(z, g)
    if side == "inside":
        return PencilSpec.inside(z, g)
    return PencilSpec.generic(z, g)
