"""ATSP instances and the TSPLIB FULL_MATRIX reader."""

from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from ..errors import DimensionMismatch, UnsupportedFormat


@dataclass(frozen=True)
class AtspInstance:
    """Cost matrix ``costs[i-1][j-1] = c_ij`` on nodes 1..n; the diagonal is ignored."""

    name: str
    costs: tuple[tuple, ...]

    def __post_init__(self):
        rows = tuple(tuple(r) for r in self.costs)
        n = len(rows)
        if n < 3:
            raise ValueError("an ATSP instance needs at least 3 nodes")
        for i, r in enumerate(rows):
            if len(r) != n:
                raise ValueError("cost matrix must be square")
            for j, c in enumerate(r):
                if i != j and not math.isfinite(c):
                    raise ValueError(f"cost c_{i + 1}{j + 1} is not finite")
        object.__setattr__(self, "costs", rows)

    @property
    def n(self) -> int:
        return len(self.costs)

    def c(self, i: int, j: int):
        return self.costs[i - 1][j - 1]

    def tour_cost(self, order) -> object:
        n = len(order)
        return sum(self.c(order[k], order[(k + 1) % n]) for k in range(n))


_REQUIRED = {
    "TYPE": "ATSP",
    "EDGE_WEIGHT_TYPE": "EXPLICIT",
    "EDGE_WEIGHT_FORMAT": "FULL_MATRIX",
}


def _number(tok: str):
    try:
        return int(tok)
    except ValueError:
        try:
            return float(tok)
        except ValueError:
            raise UnsupportedFormat(f"non-numeric token {tok!r} in EDGE_WEIGHT_SECTION") from None


def parse_tsplib_atsp(text: str) -> AtspInstance:
    """Parse a TSPLIB ATSP file with an explicit full matrix."""
    header = {}
    lines = text.splitlines()
    k = 0
    while k < len(lines):
        line = lines[k].strip()
        k += 1
        if not line:
            continue
        if line.startswith("EDGE_WEIGHT_SECTION"):
            break
        if line == "EOF":
            raise DimensionMismatch("file ends before EDGE_WEIGHT_SECTION")
        key, sep, value = line.partition(":")
        if not sep:
            raise UnsupportedFormat(f"unrecognised header line {line!r}")
        header[key.strip().upper()] = value.strip()
    else:
        raise UnsupportedFormat("no EDGE_WEIGHT_SECTION")
    for key, want in _REQUIRED.items():
        got = header.get(key, "").upper()
        if got != want:
            raise UnsupportedFormat(f"{key} must be {want}, got {got or 'nothing'}")
    try:
        n = int(header["DIMENSION"])
    except (KeyError, ValueError):
        raise UnsupportedFormat("missing or bad DIMENSION") from None
    tokens = []
    for line in lines[k:]:
        s = line.strip()
        if s == "EOF":
            break
        if s and s[0].isalpha():
            break  # another section starts (e.g. DISPLAY_DATA_SECTION)
        tokens.extend(s.split())
    if len(tokens) != n * n:
        raise DimensionMismatch(f"expected {n * n} matrix entries for DIMENSION {n}, found {len(tokens)}")
    vals = [_number(t) for t in tokens]
    costs = [vals[r * n:(r + 1) * n] for r in range(n)]
    return AtspInstance(header.get("NAME", "unnamed"), costs)


def format_tsplib_atsp(inst: AtspInstance) -> str:
    out = [f"NAME: {inst.name}", "TYPE: ATSP", f"DIMENSION: {inst.n}",
           "EDGE_WEIGHT_TYPE: EXPLICIT", "EDGE_WEIGHT_FORMAT: FULL_MATRIX", "EDGE_WEIGHT_SECTION"]
    out.extend(" ".join(str(c) for c in row) for row in inst.costs)
    out.append("EOF")
    return "\n".join(out) + "\n"


def read_tsplib_atsp(path) -> AtspInstance:
    return parse_tsplib_atsp(Path(path).read_text())


def load_bundled(name: str) -> AtspInstance:
    """Load an instance shipped in ``facetlab/data`` (``br17``)."""
    fname = name if name.endswith(".atsp") else name + ".atsp"
    text = resources.files("facetlab").joinpath("data", fname).read_text()
    return parse_tsplib_atsp(text)


def load_instance(spec: str) -> AtspInstance:
    """A path if it exists, otherwise the name of a bundled instance."""
    p = Path(spec)
    if p.exists():
        return read_tsplib_atsp(p)
    try:
        return load_bundled(p.name)
    except FileNotFoundError:
        raise FileNotFoundError(f"no such instance file or bundled instance: {spec}") from None
