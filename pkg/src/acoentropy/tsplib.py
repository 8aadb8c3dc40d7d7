"""Reading and writing the EUC_2D subset of the TSPLIB format."""

from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

# Heuristic cap for coincident cities (d_ij == 0, i != j).
MIN_DISTANCE = 1e-6
MAX_HEURISTIC = 1.0 / MIN_DISTANCE

BUNDLED = ("pr107", "pr136", "d198", "pr226", "d493")


class TsplibError(ValueError):
    """Base class for instance parse failures."""

    def __init__(self, message: str, lineno: int | None = None, line: str | None = None):
        if lineno is not None:
            message = f"line {lineno}: {message}: {line!r}"
        super().__init__(message)
        self.lineno = lineno
        self.line = line


class HeaderError(TsplibError):
    pass


class UnsupportedEdgeWeightType(TsplibError):
    pass


class CoordinateCountError(TsplibError):
    pass


class CoordinateValueError(TsplibError):
    pass


@dataclass(frozen=True)
class Instance:
    name: str
    dimension: int
    coords: tuple[tuple[float, float], ...]
    edge_weight_type: str = "EUC_2D"
    comment: str = ""

    def __post_init__(self):
        if self.dimension != len(self.coords):
            raise CoordinateCountError(
                f"dimension {self.dimension} but {len(self.coords)} coordinates"
            )
        if self.dimension < 3:
            raise HeaderError(f"dimension must be at least 3, got {self.dimension}")
        if self.edge_weight_type != "EUC_2D":
            raise UnsupportedEdgeWeightType(
                f"unsupported EDGE_WEIGHT_TYPE {self.edge_weight_type}"
            )

    @property
    def n(self) -> int:
        return self.dimension


_HEADER_KEYS = {"NAME", "TYPE", "COMMENT", "DIMENSION", "EDGE_WEIGHT_TYPE"}


def _split_key(line: str) -> tuple[str, str]:
    if ":" in line:
        key, _, value = line.partition(":")
        return key.strip().upper(), value.strip()
    key, _, value = line.partition(" ")
    return key.strip().upper(), value.strip()


def parse_instance(text: str) -> Instance:
    """Parse a TSPLIB document.

    Node ids ``1..n`` become internal indices ``0..n-1``; rows may appear in
    any order but every id must occur exactly once.
    """
    header: dict[str, str] = {}
    rows: dict[int, tuple[float, float]] = {}
    in_coords = False
    section_seen = False
    section_lineno = 0

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.upper() == "EOF":
            break
        if in_coords:
            parts = line.split()
            if len(parts) != 3:
                # A keyword after the section ends it; anything else is bad data.
                if parts[0].rstrip(":").upper() in _HEADER_KEYS or parts[0].upper().endswith("_SECTION"):
                    in_coords = False
                else:
                    raise CoordinateValueError("expected '<id> <x> <y>'", lineno, raw)
            else:
                try:
                    node = int(parts[0])
                    x, y = float(parts[1]), float(parts[2])
                except ValueError:
                    raise CoordinateValueError("non-numeric coordinate", lineno, raw) from None
                if not (math.isfinite(x) and math.isfinite(y)):
                    raise CoordinateValueError("non-finite coordinate", lineno, raw)
                if node in rows:
                    raise CoordinateValueError(f"duplicate node id {node}", lineno, raw)
                rows[node] = (x, y)
                continue
        if line.upper().startswith("NODE_COORD_SECTION"):
            in_coords = True
            section_seen = True
            section_lineno = lineno
            continue
        key, value = _split_key(line)
        if key not in _HEADER_KEYS:
            raise HeaderError(f"unknown keyword {key}", lineno, raw)
        if key == "TYPE" and value.upper() != "TSP":
            raise HeaderError(f"TYPE must be TSP, got {value}", lineno, raw)
        if key == "EDGE_WEIGHT_TYPE" and value.upper() != "EUC_2D":
            raise UnsupportedEdgeWeightType(f"unsupported EDGE_WEIGHT_TYPE {value}", lineno, raw)
        if key == "DIMENSION":
            try:
                int(value)
            except ValueError:
                raise HeaderError("DIMENSION is not an integer", lineno, raw) from None
        header[key] = value

    for required in ("DIMENSION", "EDGE_WEIGHT_TYPE"):
        if required not in header:
            raise HeaderError(f"missing {required}")
    if not section_seen:
        raise HeaderError("missing NODE_COORD_SECTION")

    n = int(header["DIMENSION"])
    if len(rows) != n:
        raise CoordinateCountError(
            f"DIMENSION is {n} but {len(rows)} coordinate rows follow",
            section_lineno,
            "NODE_COORD_SECTION",
        )
    if sorted(rows) != list(range(1, n + 1)):
        raise CoordinateCountError(f"node ids are not 1..{n}", section_lineno, "NODE_COORD_SECTION")

    return Instance(
        name=header.get("NAME", ""),
        dimension=n,
        coords=tuple(rows[i] for i in range(1, n + 1)),
        edge_weight_type=header["EDGE_WEIGHT_TYPE"].upper(),
        comment=header.get("COMMENT", ""),
    )


def format_instance(inst: Instance) -> str:
    """Serialize back to TSPLIB text; ``parse_instance`` inverts this exactly."""
    lines = [f"NAME : {inst.name}"]
    if inst.comment:
        lines.append(f"COMMENT : {inst.comment}")
    lines += [
        "TYPE : TSP",
        f"DIMENSION : {inst.dimension}",
        f"EDGE_WEIGHT_TYPE : {inst.edge_weight_type}",
        "NODE_COORD_SECTION",
    ]
    lines += [f"{i} {x!r} {y!r}" for i, (x, y) in enumerate(inst.coords, start=1)]
    lines.append("EOF")
    return "\n".join(lines) + "\n"


def load_instance(path: str | Path) -> Instance:
    return parse_instance(Path(path).read_text())


def bundled_instance(name: str) -> Instance:
    """Load one of the TSPLIB instances shipped with the package."""
    if name not in BUNDLED:
        raise KeyError(f"no bundled instance {name!r}; have {', '.join(BUNDLED)}")
    text = resources.files("acoentropy").joinpath("data", f"{name}.tsp").read_text()
    return parse_instance(text)


def nint(x: float) -> int:
    # TSPLIB nint: (int)(x + 0.5)
    return int(math.floor(x + 0.5))


def distance(inst: Instance, i: int, j: int) -> int:
    n = inst.dimension
    if not (0 <= i < n and 0 <= j < n):
        raise IndexError(f"city index out of range for n={n}: ({i}, {j})")
    (xi, yi), (xj, yj) = inst.coords[i], inst.coords[j]
    return nint(math.sqrt((xi - xj) ** 2 + (yi - yj) ** 2))


def build_distance_matrix(inst: Instance) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(dist, eta)``: integer EUC_2D distances and ``eta = 1/d``.

    The diagonal of ``eta`` is 0 (never used); coincident distinct cities get
    ``MAX_HEURISTIC``.
    """
    xy = np.asarray(inst.coords, dtype=float)
    dx = xy[:, 0, None] - xy[None, :, 0]
    dy = xy[:, 1, None] - xy[None, :, 1]
    dist = np.floor(np.sqrt(dx * dx + dy * dy) + 0.5).astype(np.int64)
    np.fill_diagonal(dist, 0)

    eta = 1.0 / np.maximum(dist, MIN_DISTANCE)
    np.fill_diagonal(eta, 0.0)
    dist.setflags(write=False)
    eta.setflags(write=False)
    return dist, eta
