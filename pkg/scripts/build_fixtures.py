"""Regenerate the shipped fixture scenes under src/hilbmod/fixtures/."""
from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from hilbmod.extensions import canonical_extension
from hilbmod.fdcstar import FdAlgebra
from hilbmod.hmod import HModule
from hilbmod.linking import rotated_automorphism
from hilbmod.scene import Scene, emit_scene

OUT = Path(__file__).resolve().parents[1] / "src" / "hilbmod" / "fixtures"


def kol17() -> Scene:
    s = Scene(settings={"tol": 1e-9, "seed": 0})
    s.algebras["B"] = FdAlgebra((1, 1))
    s.modules["E"] = HModule(s.algebras["B"], (2, 2))
    s._module_bases["E"] = "B"
    E = s.modules["E"]
    gen = E.flatten([np.array([[1], [0]]), np.zeros((2, 1))])
    s.subspaces["K"] = ("E", gen.reshape(1, -1))
    return s


def fixture_b() -> Scene:
    s = Scene(settings={"tol": 1e-9, "seed": 0})
    s.algebras["B"] = FdAlgebra((2,))
    s.modules["E"] = HModule(s.algebras["B"], (1,))
    s._module_bases["E"] = "B"
    E = s.modules["E"]
    s.subspaces["X"] = ("E", E.flatten([np.array([[1, 0]])]).reshape(1, -1))
    s.subspaces["whole"] = ("E", np.eye(E.dim, dtype=complex))
    s.subspaces["zero"] = ("E", np.zeros((0, E.dim), dtype=complex))
    s.maps["id"] = ("E", "E", _identity(E))
    return s


def fixture_c() -> Scene:
    s = Scene(settings={"tol": 1e-9, "seed": 0})
    s.algebras["B"] = FdAlgebra((2, 1))
    s.modules["E"] = HModule(s.algebras["B"], (1, 0))
    s._module_bases["E"] = "B"
    E = s.modules["E"]
    s.subspaces["whole"] = ("E", np.eye(E.dim, dtype=complex))
    s.maps["id"] = ("E", "E", _identity(E))
    return s


def fixture_d() -> Scene:
    s = Scene(settings={"tol": 1e-9, "seed": 0})
    B = FdAlgebra((2, 1))
    E = HModule(B, (1, 1))
    seq = canonical_extension(E, {1})
    s.algebras.update({"B": B, "A": seq.G.base, "C": seq.F.base})
    s.modules.update({"E": E, "G": seq.G, "F": seq.F})
    s._module_bases.update({"E": "B", "G": "A", "F": "C"})
    s.subspaces["K"] = ("E", E.flatten([np.zeros((1, 2)), np.ones((1, 1))]).reshape(1, -1))
    s.maps["v"] = ("G", "E", seq.v)
    s.maps["u"] = ("E", "F", seq.u)
    s.sequences["ext"] = {"G": "G", "E": "E", "F": "F", "v": "v", "u": "u"}
    return s


def rotated() -> Scene:
    s = Scene(settings={"tol": 1e-9, "seed": 0})
    s.algebras["B"] = FdAlgebra((1,))
    s.modules["E"] = HModule(s.algebras["B"], (1,))
    s._module_bases["E"] = "B"
    _, phi = rotated_automorphism((1,), math.pi / 4)
    end = ("linking", "E", False)
    s.maps["rotation"] = (end, end, phi)
    return s


def _identity(E):
    from hilbmod.subspace import LinearMap

    return LinearMap.identity(E)


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    for name, build in (("kol17", kol17), ("fixture-b", fixture_b), ("fixture-c", fixture_c),
                        ("fixture-d", fixture_d), ("rotated-automorphism", rotated)):
        (OUT / f"{name}.json").write_text(emit_scene(build()))
        print("wrote", name)


if __name__ == "__main__":
    main()
