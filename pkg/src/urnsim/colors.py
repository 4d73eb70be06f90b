"""Color spaces: finite indices, integer lattices, phased points and the
hexagonal (honeycomb) lattice.

Hex colors carry exact integer coordinates (a, b) in the basis
e1 = (1, 0), e2 = (-1/2, sqrt(3)/2); reals only appear when converting for
statistics. e2 is the primitive complex cube root of unity, so the three
unit increments e1, e2, -e1-e2 sum to zero.
"""

import math
from dataclasses import dataclass

from .errors import ColorOutOfSpace

HEX_E1 = (1.0, 0.0)
HEX_E2 = (-0.5, math.sqrt(3.0) / 2.0)


@dataclass(frozen=True)
class FiniteIdx:
    id: int


@dataclass(frozen=True)
class Lattice:
    coords: tuple


@dataclass(frozen=True)
class Phased:
    coords: tuple
    phase: int


@dataclass(frozen=True)
class Hex:
    a: int
    b: int


Color = FiniteIdx | Lattice | Phased | Hex


def to_point(color) -> tuple:
    """Real-coordinate embedding of a color, used by the statistics layer."""
    if isinstance(color, FiniteIdx):
        return (float(color.id),)
    if isinstance(color, Lattice):
        return tuple(float(c) for c in color.coords)
    if isinstance(color, Phased):
        return tuple(float(c) for c in color.coords)
    if isinstance(color, Hex):
        return (
            color.a * HEX_E1[0] + color.b * HEX_E2[0],
            color.a * HEX_E1[1] + color.b * HEX_E2[1],
        )
    raise TypeError(f"not a color: {color!r}")


def hex_partition(color: Hex) -> int:
    """Partition class of a honeycomb vertex: 1 or 2.

    Walk increments from class 1 shift a+b by +1 mod 3 and from class 2 by
    -1 mod 3, so class 1 vertices have (a+b) % 3 == 0 and class 2 vertices
    (a+b) % 3 == 1. Residue 2 points belong to the ambient triangular
    lattice but are not honeycomb vertices.
    """
    r = (color.a + color.b) % 3
    if r == 0:
        return 1
    if r == 1:
        return 2
    raise ColorOutOfSpace(f"{color} is not a vertex of the hexagonal lattice")


def color_to_json(color) -> dict:
    if isinstance(color, FiniteIdx):
        return {"kind": "finite", "id": color.id}
    if isinstance(color, Lattice):
        return {"kind": "lattice", "coords": list(color.coords)}
    if isinstance(color, Phased):
        return {"kind": "phased", "coords": list(color.coords), "phase": color.phase}
    if isinstance(color, Hex):
        return {"kind": "hex", "a": color.a, "b": color.b}
    raise TypeError(f"not a color: {color!r}")


def color_from_json(obj: dict):
    kind = obj.get("kind")
    if kind == "finite":
        return FiniteIdx(int(obj["id"]))
    if kind == "lattice":
        return Lattice(tuple(int(c) for c in obj["coords"]))
    if kind == "phased":
        return Phased(tuple(float(c) for c in obj["coords"]), int(obj["phase"]))
    if kind == "hex":
        return Hex(int(obj["a"]), int(obj["b"]))
    raise ValueError(f"unknown color kind: {kind!r}")
