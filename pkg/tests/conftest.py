import math

import numpy as np
from hypothesis import strategies as st

from heyde.distributions import FiniteDist
from heyde.groups import FiniteAbelianGroup, Homomorphism


@st.composite
def groups(draw, max_order: int = 48, max_rank: int = 3):
    moduli = []
    order = 1
    for _ in range(draw(st.integers(1, max_rank))):
        n = draw(st.integers(2, 8))
        if order * n > max_order:
            break
        moduli.append(n)
        order *= n
    if not moduli:
        moduli = [draw(st.integers(2, 8))]
    return FiniteAbelianGroup(moduli)


@st.composite
def homomorphisms(draw, source, target=None):
    """A random well-defined homomorphism ``source -> target``."""
    target = source if target is None else target
    m = np.zeros((target.rank, source.rank), dtype=np.int64)
    for i, mi in enumerate(target.moduli):
        for j, nj in enumerate(source.moduli):
            step = mi // math.gcd(mi, nj)
            m[i, j] = step * draw(st.integers(0, mi - 1))
    return Homomorphism(source, target, m)


@st.composite
def elements(draw, group):
    return tuple(draw(st.integers(0, n - 1)) for n in group.moduli)


@st.composite
def dists(draw, group, positive: bool = False):
    lo = 0.01 if positive else 0.0
    w = draw(st.lists(st.floats(lo, 1.0), min_size=group.order, max_size=group.order))
    w = np.asarray(w)
    if w.sum() <= 0:
        w[0] = 1.0
    return FiniteDist(group, w / w.sum())


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
