"""Built-in polytope fixtures and the JSON input formats.

Polytope JSON: {"name": str, "vertices": [[int, ...], ...]} with an
optional "coarsen": N for sublattice views.  Complex JSON:
{"points": {id: [int, ...]}, "cells": [{"vertices": [ids]}],
"boundary_cells": [cell indices]}.
"""

from __future__ import annotations

import json
from importlib import resources

from . import complexes
from .geometry import Polytope

__all__ = ["FIXTURES", "load_fixture", "polytope_from_json", "complex_from_json", "load_input"]

FIXTURES = (
    "segment_0_2",
    "segment_1_2",
    "segment_1_3",
    "unimodular_simplex_1",
    "unimodular_simplex_2",
    "unimodular_simplex_3",
    "unit_square",
    "unit_cube",
    "reflexive_square",
    "reflexive_cube",
    "dilated_triangle",
    "reeve_simplex",
)

# full h*-oracle suite members (everything with exact expected vectors)
HSTAR_EXPECTED = {
    "segment_0_2": (1, 1),
    "segment_1_2": (1, 0),
    "segment_1_3": (1, 1),
    "unimodular_simplex_1": (1, 0),
    "unimodular_simplex_2": (1, 0, 0),
    "unimodular_simplex_3": (1, 0, 0, 0),
    "unit_square": (1, 1, 0),
    "unit_cube": (1, 4, 1, 0),
    "reflexive_square": (1, 6, 1),
    "reflexive_cube": (1, 23, 23, 1),
    "dilated_triangle": (1, 3, 0),
    "reeve_simplex": (1, 0, 1, 0),
}


def polytope_from_json(data: dict) -> Polytope:
    if "vertices" not in data or not data["vertices"]:
        raise ValueError("polytope JSON needs a nonempty 'vertices' list")
    return Polytope(data["vertices"], name=data.get("name", ""))


def complex_from_json(data: dict) -> complexes.LatticeComplex:
    return complexes.from_json(data)


def load_fixture(name: str) -> Polytope:
    if name not in FIXTURES:
        raise KeyError(f"unknown fixture {name!r}; known: {', '.join(FIXTURES)}")
    text = resources.files("conealg.data").joinpath(f"{name}.json").read_text()
    return polytope_from_json(json.loads(text))


def fixture_json(name: str) -> dict:
    text = resources.files("conealg.data").joinpath(f"{name}.json").read_text()
    return json.loads(text)


def load_input(path: str):
    """Polytope or complex from a JSON file, by schema sniffing."""
    with open(path) as f:
        try:
            data = json.load(f)
        except json.JSONDecodeError as e:
            raise ValueError(f"{path}:{e.lineno}: {e.msg}") from e
    if "vertices" in data:
        return polytope_from_json(data)
    if "cells" in data:
        return complex_from_json(data)
    raise ValueError(f"{path}: neither a polytope nor a complex JSON object")
