"""Brute-force enumeration of 0/1 solutions, used as a test oracle."""

from __future__ import annotations

import math
from functools import reduce

import numpy as np

from ..errors import TooLarge
from ..polytope import Relation, VertexSet
from .model import MipModel

MAX_FREE_BINARIES = 24
_CHUNK = 1 << 16


def _int_rows(model: MipModel):
    A, b, rel = [], [], []
    for c in model.constraints:
        den = reduce(math.lcm, (q.denominator for q in c.coeffs), c.rhs.denominator)
        A.append([int(q * den) for q in c.coeffs])
        b.append(int(c.rhs * den))
        rel.append(c.relation)
    return A, b, rel


def enumerate_binary_solutions(model: MipModel) -> VertexSet | None:
    """All feasible 0/1 assignments in lexicographic order.

    Every variable must be BINARY or fixed.  Returns ``None`` when nothing
    is feasible (a vertex set cannot be empty).
    """
    free = []
    fixed = {}
    for k, v in enumerate(model.variables):
        if v.is_fixed:
            fixed[k] = v.lower
        elif v.is_binary:
            free.append(k)
        else:
            raise ValueError(f"variable {v.name} is neither binary nor fixed")
    if len(free) > MAX_FREE_BINARIES:
        raise TooLarge(f"{len(free)} free binaries exceed the enumeration guard of {MAX_FREE_BINARIES}")
    A, b, rel = _int_rows(model)
    n = model.n
    fixed_ok = all(v.denominator == 1 for v in fixed.values())
    big = max((abs(a) for row in A for a in row), default=0) * max(n, 1)
    use_numpy = fixed_ok and big < 2**60 and max((abs(x) for x in b), default=0) < 2**60
    out = []
    total = 1 << len(free)
    if use_numpy and A:
        Am = np.array(A, dtype=np.int64)
        bm = np.array(b, dtype=np.int64)
        base = np.zeros(n, dtype=np.int64)
        for k, v in fixed.items():
            base[k] = int(v)
        le = np.array([r is Relation.LE for r in rel])
        ge = np.array([r is Relation.GE for r in rel])
        eq = np.array([r is Relation.EQ for r in rel])
        nf = len(free)
        for start in range(0, total, _CHUNK):
            idx = np.arange(start, min(total, start + _CHUNK), dtype=np.int64)
            # first free variable is the most significant bit -> lexicographic order
            bits = (idx[:, None] >> np.arange(nf - 1, -1, -1, dtype=np.int64)) & 1
            X = np.tile(base, (len(idx), 1))
            X[:, free] = bits
            lhs = X @ Am.T
            ok = np.all((lhs <= bm) | ~le, axis=1)
            ok &= np.all((lhs >= bm) | ~ge, axis=1)
            ok &= np.all((lhs == bm) | ~eq, axis=1)
            out.extend(X[ok].tolist())
    else:
        for code in range(total):
            x = [fixed.get(k, 0) for k in range(n)]
            for pos, k in enumerate(free):
                x[k] = (code >> (len(free) - 1 - pos)) & 1
            if all(c.is_satisfied(x) for c in model.constraints):
                out.append(x)
    if not out:
        return None
    return VertexSet(out, n)
