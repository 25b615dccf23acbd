from itertools import permutations

import numpy as np
import pytest

from sumsetlab.corpus import CORPUS_SPECS, corpus_group, corpus_groups
from sumsetlab.groups import FiniteGroup


@pytest.fixture(scope="session")
def corpus():
    return corpus_groups()


@pytest.fixture(scope="session", params=CORPUS_SPECS)
def corpus_member(request):
    return corpus_group(request.param)


@pytest.fixture(scope="session")
def alternating_5():
    """A5 built from even permutations: the smallest non-solvable group."""
    elems = [p for p in permutations(range(5)) if _parity(p) == 0]
    elems.sort()
    identity = elems.index(tuple(range(5)))
    elems[0], elems[identity] = elems[identity], elems[0]
    index = {p: i for i, p in enumerate(elems)}
    n = len(elems)
    op = np.zeros((n, n), dtype=np.int32)
    for i, p in enumerate(elems):
        for j, q in enumerate(elems):
            op[i, j] = index[tuple(p[q[k]] for k in range(5))]
    inv = np.argmax(op == 0, axis=1).astype(np.int32)
    return FiniteGroup(order=n, op=op, identity=0, inv=inv, label="alternating:5")


def _parity(perm):
    flips = sum(
        1
        for i in range(len(perm))
        for j in range(i + 1, len(perm))
        if perm[i] > perm[j]
    )
    return flips % 2
