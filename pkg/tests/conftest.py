import random

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from aminescreen.chem import parse_smiles
from aminescreen.errors import SmilesError

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# building blocks for random valid molecules: chains, rings and N/O decorations
_ATOMS = ["C", "C", "C", "N", "O", "C(C)", "C(O)", "N(C)", "C(=O)"]


def random_smiles(rng: random.Random, max_len: int = 8) -> str:
    """A random connected acyclic or monocyclic SMILES that parses."""
    while True:
        s = _draw(rng, max_len)
        try:
            parse_smiles(s)
        except SmilesError:
            continue
        return s


def _draw(rng, max_len):
    n = rng.randint(1, max_len)
    parts = [rng.choice(_ATOMS) for _ in range(n)]
    if n >= 4 and rng.random() < 0.3:
        i = rng.randrange(0, n - 3)
        parts[i] = parts[i][0] + "1" + parts[i][1:]
        j = rng.randrange(i + 2, n)
        parts[j] = parts[j][0] + "1" + parts[j][1:]
    if "N" not in "".join(parts) and rng.random() < 0.7:
        parts.append("N")
    return "".join(parts)


@pytest.fixture
def rng():
    return np.random.RandomState(0)


# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES: dict[int, str] = {}


def record_criterion(number: int, ok: bool, detail: str) -> None:
    line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES[number] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])
