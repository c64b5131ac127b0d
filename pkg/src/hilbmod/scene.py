"""JSON scene files: named algebras, modules, subspaces, maps and sequences.

Complex numbers are written as ``[re, im]`` pairs and matrices row-major.
A scene looks like::

    {
      "settings":   {"tol": 1e-9, "seed": 0},
      "algebras":   {"B": {"block_dims": [1, 1]}},
      "modules":    {"E": {"base": "B", "multiplicities": [2, 2]}},
      "subspaces":  {"K": {"parent": "E", "generators": [[block, block]]}},
      "maps":       {"v": {"source": "E", "target": "E", "matrix": [[...]]}},
      "sequences":  {"s": {"G": "G", "E": "E", "F": "F", "v": "v", "u": "u"}}
    }

A generator is a list of blocks, each block a list of rows of ``[re, im]``.
A map end may also be ``{"linking": "E", "reduced": true}``, meaning the
(reduced) linking algebra of module E.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .core import DEFAULT_TOL, HilbmodError, StructuralError
from .extensions import ExactSequence
from .fdcstar import FdAlgebra
from .hmod import HModule
from .linking import LinkingAlgebra
from .subspace import LinearMap, Subspace, from_rows

SECTIONS = ("settings", "algebras", "modules", "subspaces", "maps", "sequences")


class SceneError(HilbmodError):
    """Base class for scene problems; ``where`` locates the offending field."""

    def __init__(self, where: str, msg: str):
        super().__init__(f"{where}: {msg}")
        self.where = where


class SceneSyntaxError(SceneError):
    pass


class DanglingReferenceError(SceneError):
    pass


class DimensionMismatchError(SceneError):
    pass


@dataclass
class Scene:
    settings: dict = field(default_factory=dict)
    algebras: dict = field(default_factory=dict)
    modules: dict = field(default_factory=dict)
    subspaces: dict = field(default_factory=dict)  # name -> (parent name, generator rows)
    maps: dict = field(default_factory=dict)  # name -> (source end, target end, LinearMap)
    sequences: dict = field(default_factory=dict)  # name -> dict of names
    _module_bases: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def tol(self) -> float:
        return float(self.settings.get("tol", DEFAULT_TOL))

    @property
    def seed(self) -> int:
        return int(self.settings.get("seed", 0))

    def space(self, name: str):
        if name in self.algebras:
            return self.algebras[name]
        if name in self.modules:
            return self.modules[name]
        raise DanglingReferenceError(name, "no algebra or module of that name")

    def subspace(self, name: str, tol: float | None = None) -> Subspace:
        if name not in self.subspaces:
            raise DanglingReferenceError(f"subspaces.{name}", "no such subspace")
        parent, rows = self.subspaces[name]
        return from_rows(self.space(parent), rows, self.tol if tol is None else tol)

    def linear_map(self, name: str) -> LinearMap:
        if name not in self.maps:
            raise DanglingReferenceError(f"maps.{name}", "no such map")
        return self.maps[name][2]

    def map_ends(self, name: str):
        """Source and target specs: a space name or ("linking", module, reduced)."""
        src, tgt, _ = self.maps[name]
        return src, tgt

    def sequence(self, name: str) -> ExactSequence:
        if name not in self.sequences:
            raise DanglingReferenceError(f"sequences.{name}", "no such sequence")
        s = self.sequences[name]
        return ExactSequence(self.modules[s["G"]], self.modules[s["E"]], self.modules[s["F"]],
                             self.linear_map(s["v"]), self.linear_map(s["u"]))

    def to_dict(self) -> dict:
        out = {"settings": dict(self.settings)}
        out["algebras"] = {k: {"block_dims": list(a.block_dims)} for k, a in self.algebras.items()}
        out["modules"] = {
            k: {"base": self._name_of_algebra(m.base, k), "multiplicities": list(m.multiplicities)}
            for k, m in self.modules.items()
        }
        out["subspaces"] = {
            k: {"parent": p, "generators": [encode_element(self.space(p), r) for r in rows]}
            for k, (p, rows) in self.subspaces.items()
        }
        out["maps"] = {
            k: {"source": _end_json(s), "target": _end_json(t), "matrix": encode_matrix(m.matrix)}
            for k, (s, t, m) in self.maps.items()
        }
        out["sequences"] = {k: dict(v) for k, v in self.sequences.items()}
        return out

    def _name_of_algebra(self, alg, module_name):
        names = self._module_bases.get(module_name)
        if names is not None:
            return names
        for k, a in self.algebras.items():
            if a == alg:
                return k
        raise StructuralError(f"base algebra of module {module_name} is not registered")

    def __eq__(self, other) -> bool:
        return isinstance(other, Scene) and self.to_dict() == other.to_dict()


def _end_json(end):
    if isinstance(end, tuple):
        return {"linking": end[1], "reduced": end[2]}
    return end


# -- complex encodings -------------------------------------------------------


def encode_complex(z) -> list:
    z = complex(z)
    return [float(z.real) + 0.0, float(z.imag) + 0.0]


def encode_matrix(mat) -> list:
    mat = np.asarray(mat)
    return [[encode_complex(z) for z in row] for row in mat]


def encode_element(space, vec) -> list:
    """A coordinate vector as a list of blocks of [re, im] matrices."""
    return [encode_matrix(b) for b in space.unflatten(np.asarray(vec))]


def _decode_complex(x, where):
    if (not isinstance(x, list) or len(x) != 2
            or not all(isinstance(t, (int, float)) and not isinstance(t, bool) for t in x)):
        raise SceneSyntaxError(where, f"expected a complex number [re, im], got {json.dumps(x)[:40]}")
    return complex(x[0], x[1])


def decode_matrix(data, where, shape=None) -> np.ndarray:
    if not isinstance(data, list) or not all(isinstance(r, list) for r in data):
        raise SceneSyntaxError(where, "expected a matrix: a list of rows")
    rows = [[_decode_complex(x, f"{where}[{i}][{j}]") for j, x in enumerate(r)] for i, r in enumerate(data)]
    widths = {len(r) for r in rows}
    if len(widths) > 1:
        raise DimensionMismatchError(where, f"ragged matrix with row lengths {sorted(widths)}")
    ncols = widths.pop() if widths else (shape[1] if shape else 0)
    mat = np.array(rows, dtype=complex).reshape(len(rows), ncols)
    if shape is not None and mat.shape != tuple(shape) and not (mat.size == 0 and shape[0] * shape[1] == 0):
        raise DimensionMismatchError(where, f"shape {mat.shape}, expected {tuple(shape)}")
    return mat.reshape(shape) if shape is not None else mat


def decode_element(space, data, where) -> np.ndarray:
    if not isinstance(data, list):
        raise SceneSyntaxError(where, "expected a list of blocks")
    if len(data) != len(space.shapes):
        raise DimensionMismatchError(where, f"{len(data)} blocks, expected {len(space.shapes)}")
    blocks = [decode_matrix(b, f"{where}[{k}]", s) for k, (b, s) in enumerate(zip(data, space.shapes))]
    return space.flatten(blocks)


# -- parsing -----------------------------------------------------------------


def _obj(data, where) -> dict:
    if not isinstance(data, dict):
        raise SceneSyntaxError(where, f"expected an object, got {type(data).__name__}")
    return data


def _field(entry: dict, key: str, where: str):
    if key not in entry:
        raise SceneSyntaxError(where, f"missing field '{key}'")
    return entry[key]


def _int_list(data, where, low: int) -> tuple[int, ...]:
    if not isinstance(data, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in data):
        raise SceneSyntaxError(where, "expected a list of integers")
    if any(x < low for x in data):
        raise SceneSyntaxError(where, f"entries must be at least {low}")
    return tuple(data)


def parse_scene(text: str) -> Scene:
    """Parse and validate a scene; every problem raises a located SceneError."""
    if not text.strip():
        return Scene()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SceneSyntaxError(f"line {exc.lineno}, column {exc.colno}", exc.msg) from None
    return scene_from_dict(data)


def scene_from_dict(data) -> Scene:
    data = _obj(data, "scene")
    unknown = sorted(set(data) - set(SECTIONS))
    if unknown:
        raise SceneSyntaxError("scene", f"unknown sections {unknown}")
    scene = Scene()

    settings = _obj(data.get("settings", {}), "settings")
    for key, val in settings.items():
        if key == "tol" and not (isinstance(val, (int, float)) and val > 0):
            raise SceneSyntaxError("settings.tol", "must be a positive number")
        if key == "seed" and not (isinstance(val, int) and val >= 0):
            raise SceneSyntaxError("settings.seed", "must be a nonnegative integer")
        if key not in ("tol", "seed"):
            raise SceneSyntaxError(f"settings.{key}", "unknown setting")
    scene.settings = dict(settings)

    for name, entry in _obj(data.get("algebras", {}), "algebras").items():
        where = f"algebras.{name}"
        dims = _int_list(_field(_obj(entry, where), "block_dims", where), f"{where}.block_dims", 1)
        scene.algebras[name] = FdAlgebra(dims)

    for name, entry in _obj(data.get("modules", {}), "modules").items():
        where = f"modules.{name}"
        entry = _obj(entry, where)
        base = _field(entry, "base", where)
        if base not in scene.algebras:
            raise DanglingReferenceError(f"{where}.base", f"undefined algebra '{base}'")
        mults = _int_list(_field(entry, "multiplicities", where), f"{where}.multiplicities", 0)
        if len(mults) != scene.algebras[base].r:
            raise DimensionMismatchError(
                f"{where}.multiplicities",
                f"{len(mults)} multiplicities for an algebra with {scene.algebras[base].r} blocks",
            )
        if name in scene.algebras:
            raise SceneSyntaxError(where, "name already used by an algebra")
        scene.modules[name] = HModule(scene.algebras[base], mults)
        scene._module_bases[name] = base

    for name, entry in _obj(data.get("subspaces", {}), "subspaces").items():
        where = f"subspaces.{name}"
        entry = _obj(entry, where)
        parent = _field(entry, "parent", where)
        if parent not in scene.algebras and parent not in scene.modules:
            raise DanglingReferenceError(f"{where}.parent", f"undefined algebra or module '{parent}'")
        space = scene.space(parent)
        gens = _field(entry, "generators", where)
        if not isinstance(gens, list):
            raise SceneSyntaxError(f"{where}.generators", "expected a list of elements")
        rows = [decode_element(space, g, f"{where}.generators[{i}]") for i, g in enumerate(gens)]
        scene.subspaces[name] = (parent, np.array(rows, dtype=complex).reshape(len(rows), space.dim))

    for name, entry in _obj(data.get("maps", {}), "maps").items():
        where = f"maps.{name}"
        entry = _obj(entry, where)
        src_spec, src = _map_end(scene, _field(entry, "source", where), f"{where}.source")
        tgt_spec, tgt = _map_end(scene, _field(entry, "target", where), f"{where}.target")
        mat = decode_matrix(_field(entry, "matrix", where), f"{where}.matrix", (tgt.dim, src.dim))
        scene.maps[name] = (src_spec, tgt_spec, LinearMap(src, tgt, mat))

    for name, entry in _obj(data.get("sequences", {}), "sequences").items():
        where = f"sequences.{name}"
        entry = _obj(entry, where)
        names = {}
        for key in ("G", "E", "F"):
            ref = _field(entry, key, where)
            if ref not in scene.modules:
                raise DanglingReferenceError(f"{where}.{key}", f"undefined module '{ref}'")
            names[key] = ref
        for key, (src, tgt) in (("v", ("G", "E")), ("u", ("E", "F"))):
            ref = _field(entry, key, where)
            if ref not in scene.maps:
                raise DanglingReferenceError(f"{where}.{key}", f"undefined map '{ref}'")
            s, t, _ = scene.maps[ref]
            if s != names[src] or t != names[tgt]:
                raise DimensionMismatchError(
                    f"{where}.{key}", f"map '{ref}' goes {s} -> {t}, expected {names[src]} -> {names[tgt]}")
            names[key] = ref
        extra = sorted(set(entry) - {"G", "E", "F", "v", "u"})
        if extra:
            raise SceneSyntaxError(where, f"unknown fields {extra}")
        scene.sequences[name] = names
    return scene


def _map_end(scene: Scene, end, where):
    if isinstance(end, str):
        if end not in scene.algebras and end not in scene.modules:
            raise DanglingReferenceError(where, f"undefined algebra or module '{end}'")
        return end, scene.space(end)
    end = _obj(end, where)
    mod = _field(end, "linking", where)
    if mod not in scene.modules:
        raise DanglingReferenceError(f"{where}.linking", f"undefined module '{mod}'")
    reduced = end.get("reduced", True)
    if not isinstance(reduced, bool):
        raise SceneSyntaxError(f"{where}.reduced", "expected true or false")
    return ("linking", mod, reduced), LinkingAlgebra(scene.modules[mod], reduced).carrier


def emit_scene(scene: Scene) -> str:
    """Serialize with one line per named entry."""
    data = scene.to_dict()
    parts = []
    for section in SECTIONS:
        body = data[section]
        if section == "settings":
            parts.append(f'  "settings": {json.dumps(body)}')
            continue
        if not body:
            parts.append(f'  "{section}": {{}}')
            continue
        lines = [f"    {json.dumps(k)}: {json.dumps(v)}" for k, v in body.items()]
        parts.append(f'  "{section}": {{\n' + ",\n".join(lines) + "\n  }")
    return "{\n" + ",\n".join(parts) + "\n}\n"


def load_scene(path) -> Scene:
    with open(path, encoding="utf-8") as fh:
        return parse_scene(fh.read())


__all__ = [
    "DanglingReferenceError",
    "DimensionMismatchError",
    "Scene",
    "SceneError",
    "SceneSyntaxError",
    "decode_matrix",
    "emit_scene",
    "encode_complex",
    "encode_element",
    "encode_matrix",
    "load_scene",
    "parse_scene",
    "scene_from_dict",
]
