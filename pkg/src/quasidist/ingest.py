"""Nodal displacement CSV ingest and 1-norm deformation magnitudes.

Input format::

    # optional comment lines
    node_id,ux,uy,uz
    1,0.0,0.0,0.0
    2,1.0,-2.0,0.5

LF and CRLF line endings are accepted. Blank lines are ignored.
"""

import io
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ParseError

HEADER = ("node_id", "ux", "uy", "uz")


@dataclass(frozen=True)
class NodeDisplacement:
    node_id: int
    ux: float
    uy: float
    uz: float


@dataclass(frozen=True, eq=False)
class DisplacementField:
    """One design case: node ids and an ``(N, 3)`` displacement array."""

    case_id: str
    node_ids: np.ndarray
    displacements: np.ndarray

    def __post_init__(self):
        ids = np.asarray(self.node_ids, dtype=np.int64)
        disp = np.asarray(self.displacements, dtype=np.float64)
        if disp.ndim != 2 or disp.shape[1] != 3 or ids.shape != (disp.shape[0],):
            raise ParseError("displacements must be (N, 3) with one node id per row")
        if ids.shape[0] < 2:
            raise ParseError(f"a field needs at least 2 nodes, got {ids.shape[0]}")
        if not np.all(np.isfinite(disp)):
            raise ParseError("displacement components must be finite")
        if np.unique(ids).size != ids.size:
            raise ParseError("duplicate node_id in field")
        ids.setflags(write=False)
        disp.setflags(write=False)
        object.__setattr__(self, "node_ids", ids)
        object.__setattr__(self, "displacements", disp)

    @property
    def n_total(self):
        return int(self.node_ids.shape[0])

    @property
    def nodes(self):
        return [
            NodeDisplacement(int(i), float(x), float(y), float(z))
            for i, (x, y, z) in zip(self.node_ids, self.displacements)
        ]

    @classmethod
    def from_nodes(cls, case_id, nodes):
        nodes = list(nodes)
        return cls(
            case_id,
            np.array([n.node_id for n in nodes], dtype=np.int64),
            np.array([[n.ux, n.uy, n.uz] for n in nodes], dtype=np.float64).reshape(-1, 3),
        )


@dataclass(frozen=True, eq=False)
class DeformationMagnitudes:
    values: np.ndarray
    v_min: float
    v_max: float
    zero_count: int

    @property
    def n_total(self):
        return int(self.values.shape[0])


def parse_displacement_csv(source, case_id="case"):
    """Parse a displacement export.

    Parameters
    ----------
    source : str, bytes, path-like or binary/text file object
        Strings are treated as CSV text, `Path` objects as file names.
    case_id : str
        Label stored on the returned field.

    Raises
    ------
    ParseError
        On a bad header, malformed row (with its 1-based line number),
        duplicate node id, non-finite component or fewer than 2 rows.
    """
    if isinstance(source, Path):
        source = source.read_bytes()
    if isinstance(source, bytes):
        text = source.decode("utf-8")
    elif isinstance(source, str):
        text = source
    else:
        data = source.read()
        text = data.decode("utf-8") if isinstance(data, bytes) else data
    if text.startswith("\ufeff"):
        text = text[1:]

    ids, rows, seen = [], [], {}
    header_seen = False
    for lineno, raw in enumerate(io.StringIO(text, newline=None), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = [f.strip() for f in line.split(",")]
        if not header_seen:
            if tuple(fields) != HEADER:
                raise ParseError(f"expected header {','.join(HEADER)!r}, got {line!r}", lineno)
            header_seen = True
            continue
        if len(fields) != 4:
            raise ParseError(f"expected 4 fields, got {len(fields)}", lineno)
        try:
            node_id = int(fields[0])
            comps = [float(f) for f in fields[1:]]
        except ValueError:
            raise ParseError(f"malformed row {line!r}", lineno) from None
        if node_id < 1:
            raise ParseError(f"node_id must be positive, got {node_id}", lineno)
        if not all(math.isfinite(c) for c in comps):
            raise ParseError(f"non-finite component in {line!r}", lineno)
        if node_id in seen:
            raise ParseError(f"duplicate node_id {node_id} (first seen at line {seen[node_id]})", lineno)
        seen[node_id] = lineno
        ids.append(node_id)
        rows.append(comps)

    if not header_seen:
        raise ParseError("missing header")
    if len(rows) < 2:
        raise ParseError(f"need at least 2 node rows, got {len(rows)}")
    return DisplacementField(case_id, np.array(ids, dtype=np.int64), np.array(rows, dtype=np.float64))


def read_displacement_csv(path, case_id=None):
    """Read a CSV file; `case_id` defaults to the file name stem."""
    path = Path(path)
    return parse_displacement_csv(path.read_bytes(), case_id=case_id or path.stem)


def format_displacement_csv(field):
    """Serialize a field with shortest round-trip float formatting."""
    out = [",".join(HEADER)]
    for node_id, (x, y, z) in zip(field.node_ids.tolist(), field.displacements.tolist()):
        out.append(f"{node_id},{x!r},{y!r},{z!r}")
    return "\n".join(out) + "\n"


def displacement_norm(v):
    """1-norm ``|ux| + |uy| + |uz|`` of a displacement."""
    if isinstance(v, NodeDisplacement):
        return abs(v.ux) + abs(v.uy) + abs(v.uz)
    ux, uy, uz = v
    return abs(ux) + abs(uy) + abs(uz)


def field_magnitudes(field):
    """1-norm of every node, in node order, plus extremes and zero count."""
    d = np.abs(field.displacements)
    # summed left to right so each value matches displacement_norm exactly
    values = d[:, 0] + d[:, 1] + d[:, 2]
    values.setflags(write=False)
    return DeformationMagnitudes(
        values=values,
        v_min=float(values.min()),
        v_max=float(values.max()),
        zero_count=int(np.count_nonzero(values == 0.0)),
    )
