from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

from kronrho.exactla import FieldSpec

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

FP = FieldSpec.prime()
QQ = FieldSpec.rationals()


@pytest.fixture(params=["q", "fp"], ids=["Q", "Fp"])
def field(request):
    return QQ if request.param == "q" else FP


def naive_rank(rows, p=None):
    """Textbook elimination on lists of ints/Fractions; the test-side oracle."""
    m = [[Fraction(x) if p is None else int(x) % p for x in r] for r in rows]
    rank, col = 0, 0
    ncols = len(m[0]) if m else 0
    while rank < len(m) and col < ncols:
        piv = next((i for i in range(rank, len(m)) if m[i][col] != 0), None)
        if piv is None:
            col += 1
            continue
        m[rank], m[piv] = m[piv], m[rank]
        inv = 1 / m[rank][col] if p is None else pow(m[rank][col], -1, p)
        m[rank] = [x * inv if p is None else x * inv % p for x in m[rank]]
        for i in range(len(m)):
            if i != rank and m[i][col] != 0:
                f = m[i][col]
                m[i] = [a - f * b if p is None else (a - f * b) % p
                        for a, b in zip(m[i], m[rank])]
        rank += 1
        col += 1
    return rank


def to_lists(a):
    return [[int(x) if not isinstance(x, Fraction) else x for x in row] for row in a]


def hilbert_series(N, n):
    """Coefficients of 1/(1 - N t + t^2) by series division."""
    c = []
    for k in range(n + 1):
        c.append((1 if k == 0 else 0) + (N * c[k - 1] if k >= 1 else 0) - (c[k - 2] if k >= 2 else 0))
    return c


def pytest_terminal_summary(terminalreporter):
    lines = []
    for key in ("passed", "failed"):
        for rep in terminalreporter.stats.get(key, []):
            for name, value in getattr(rep, "user_properties", []):
                if name == "criterion" and rep.when == "call":
                    lines.append(value)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
