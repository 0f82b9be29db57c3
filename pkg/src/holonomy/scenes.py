"""Scene files: JSON descriptions of a group, cover, cocycle and named paths.

Schema (all numbers decimal, matrices as row-major arrays of [re, im] pairs):

    {
      "group":    {"kind": "U1"|"SU2"|"SO3"|"Un"|"GLn", "n": int},
      "manifold": {"kind": "PlaneR2"|"SphereS2"|"TorusT2"|"CircleS1"},
      "cocycle": {
        "cover": "two_caps"|"plane_grid"|"plane_single",
        "forms": [{"set": id or "*", "preset": ..., "params": {...}}, ...],
        "transitions": [{"i": id, "j": id, "preset": ..., "params": {...}}]
      },
      "gauge":    optional gauge spec {"preset": ..., "params": {...}},
      "morphism": optional {"h": {set id: gauge spec}, "target": cocycle block},
      "paths":    {name: {"preset": ..., "params": {...}, "waypoints": [...]}},
      "solver":   {"base_steps": int, "tol": float, "max_refinements": int},
      "seed":     int
    }

Form presets: zero, monopole(k, hemisphere), constant(mats), polynomial(terms),
pure_gauge(a, b).  Transition presets: identity, monopole_phase(k),
constant(mat).  Gauge presets: phase(k), phase_poly(coeffs),
su2_exp_poly(coeffs, direction), su2_product(a, b), constant(mat), identity.
Path presets: equator, latitude(theta0, phi0, turns), meridian(phi0),
segment(a, b), circle(center, radius, turns), waypoints.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path as FsPath

import numpy as np

from .connection import (
    GaugeFunction,
    LocalConnectionForm,
    constant_form,
    constant_gauge,
    identity_gauge,
    monopole_form,
    phase_gauge,
    phase_poly_gauge,
    polynomial_form,
    pure_gauge_form,
    su2_exp_poly_gauge,
    su2_product_gauge,
    zero_form,
)
from .descent import CocycleMorphism, DifferentialCocycle, complete_transitions
from .errors import SceneError
from .geometry import (
    Cover,
    Manifold,
    Path,
    circle_path,
    equator_path,
    latitude_path,
    meridian_path,
    plane_grid_cover,
    segment_path,
    single_set_plane_cover,
    two_caps_cover,
    waypoint_path,
)
from .groups import GroupElement, GroupSpec
from .solver import SolverConfig


@dataclass(frozen=True)
class Scene:
    """A parsed scene: everything the CLI commands operate on."""

    group: GroupSpec
    manifold: Manifold
    cover: Cover
    cocycle: DifferentialCocycle
    paths: dict
    solver: SolverConfig
    seed: int
    gauge: GaugeFunction | None = None
    morphism: tuple | None = None  # (CocycleMorphism, target DifferentialCocycle)

    def path(self, name: str) -> Path:
        try:
            return self.paths[name]
        except KeyError:
            raise SceneError(
                f"scene has no path {name!r}; available: {sorted(self.paths)}"
            )


def decode_matrix(obj) -> np.ndarray:
    """Row-major array of [re, im] pairs -> complex matrix."""
    arr = np.asarray(obj, dtype=float)
    if arr.ndim != 3 or arr.shape[-1] != 2:
        raise SceneError("matrix must be a row-major array of [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def encode_matrix(m) -> list:
    m = np.asarray(m, dtype=complex)
    return [[[float(x.real), float(x.imag)] for x in row] for row in m]


def _build_cover(name: str):
    if name == "two_caps":
        return two_caps_cover()
    if name == "plane_grid":
        return plane_grid_cover()
    if name == "plane_single":
        return single_set_plane_cover()
    raise SceneError(f"unknown cover preset {name!r}")


def _build_form(spec, block, set_id, domain) -> LocalConnectionForm:
    preset = block.get("preset")
    params = block.get("params", {})
    if preset == "zero":
        return zero_form(spec, set_id, domain)
    if preset == "monopole":
        return monopole_form(float(params["k"]), str(params["hemisphere"]),
                             set_id, domain)
    if preset == "constant":
        return constant_form(spec, [decode_matrix(m) for m in params["mats"]],
                             set_id, domain)
    if preset == "polynomial":
        terms = [
            (decode_matrix(t["mat"]), int(t["dir"]), int(t["px"]), int(t["py"]))
            for t in params["terms"]
        ]
        return polynomial_form(spec, terms, set_id, domain)
    if preset == "pure_gauge":
        return pure_gauge_form(params["a"], params["b"], set_id, domain)
    raise SceneError(f"unknown connection preset {preset!r}")


def _build_gauge(spec, block) -> GaugeFunction:
    preset = block.get("preset")
    params = block.get("params", {})
    if preset == "identity":
        return identity_gauge(spec)
    if preset in ("phase", "monopole_phase"):
        return phase_gauge(float(params["k"]))
    if preset == "phase_poly":
        return phase_poly_gauge(params["coeffs"])
    if preset == "su2_exp_poly":
        return su2_exp_poly_gauge(params["coeffs"],
                                  str(params.get("direction", "y")))
    if preset == "su2_product":
        return su2_product_gauge(params["a"], params["b"])
    if preset == "constant":
        return constant_gauge(GroupElement(spec, decode_matrix(params["mat"])))
    raise SceneError(f"unknown gauge preset {preset!r}")


def _build_cocycle(spec, block) -> tuple:
    cover = _build_cover(str(block["cover"]))
    forms = {}
    for entry in block.get("forms", []):
        target = entry.get("set", "*")
        ids = cover.ids if target == "*" else [target]
        for sid in ids:
            forms[sid] = _build_form(spec, entry, sid, cover.by_id(sid))
    missing = [sid for sid in cover.ids if sid not in forms]
    if missing:
        raise SceneError(f"no connection form for cover sets {missing}")
    pairs = {}
    for entry in block.get("transitions", []):
        i, j = str(entry["i"]), str(entry["j"])
        cover.by_id(i), cover.by_id(j)
        pairs[(i, j)] = _build_gauge(spec, entry)
    if not pairs:
        # no transitions declared: the local forms glue trivially
        pairs = {
            (i, j): identity_gauge(spec)
            for i in cover.ids for j in cover.ids if i != j
        }
    transitions = complete_transitions(spec, pairs, cover.ids)
    return cover, DifferentialCocycle(cover, spec, forms, transitions)


def _build_path(manifold, block) -> Path:
    preset = block.get("preset")
    params = block.get("params", {})
    if preset == "equator":
        return equator_path()
    if preset == "latitude":
        return latitude_path(float(params["theta0"]),
                             float(params.get("phi0", 0.0)),
                             float(params.get("turns", 1.0)))
    if preset == "meridian":
        return meridian_path(float(params.get("phi0", 0.0)))
    if preset == "segment":
        return segment_path(params["a"], params["b"], manifold)
    if preset == "circle":
        return circle_path(params["center"], float(params["radius"]), manifold,
                           float(params.get("turns", 1.0)))
    if preset == "waypoints":
        return waypoint_path(block["waypoints"], manifold)
    raise SceneError(f"unknown path preset {preset!r}")


def build_scene(doc: dict) -> Scene:
    """Construct all scene objects from a parsed JSON document."""
    try:
        spec = GroupSpec.from_json(doc["group"])
        manifold = Manifold.from_json(doc["manifold"])
        cover, cocycle = _build_cocycle(spec, doc["cocycle"])
        if cover.manifold.kind != manifold.kind:
            raise SceneError("cover and manifold kinds disagree")
        paths = {
            name: _build_path(manifold, blk)
            for name, blk in doc.get("paths", {}).items()
        }
        sol = doc.get("solver", {})
        solver = SolverConfig(
            base_steps=int(sol.get("base_steps", 256)),
            tol=float(sol.get("tol", 1e-9)),
            max_refinements=int(sol.get("max_refinements", 8)),
        )
        gauge = None
        if "gauge" in doc:
            gauge = _build_gauge(spec, doc["gauge"])
        morphism = None
        if "morphism" in doc:
            h = {
                sid: _build_gauge(spec, blk)
                for sid, blk in doc["morphism"]["h"].items()
            }
            _, target = _build_cocycle(spec, doc["morphism"]["target"])
            morphism = (CocycleMorphism(h), target)
        return Scene(spec, manifold, cover, cocycle, paths, solver,
                     int(doc.get("seed", 0)), gauge, morphism)
    except SceneError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise SceneError(f"bad scene document: {exc}") from exc


def _float_repr(x: float) -> str:
    return format(x, ".17g")


def dump_json(doc) -> str:
    """Deterministic JSON with 17-significant-digit decimal floats."""

    def render(obj, indent):
        pad = "  " * indent
        if isinstance(obj, dict):
            if not obj:
                return "{}"
            items = [
                f'{pad}  {json.dumps(str(k))}: {render(v, indent + 1)}'
                for k, v in obj.items()
            ]
            return "{\n" + ",\n".join(items) + f"\n{pad}}}"
        if isinstance(obj, (list, tuple)):
            if not obj:
                return "[]"
            flat = all(not isinstance(v, (dict, list, tuple)) for v in obj)
            if flat:
                return "[" + ", ".join(render(v, indent) for v in obj) + "]"
            items = [f"{pad}  {render(v, indent + 1)}" for v in obj]
            return "[\n" + ",\n".join(items) + f"\n{pad}]"
        if isinstance(obj, bool):
            return "true" if obj else "false"
        if isinstance(obj, (int, np.integer)):
            return str(int(obj))
        if isinstance(obj, (float, np.floating)):
            return _float_repr(float(obj))
        return json.dumps(obj)

    return render(doc, 0) + "\n"


def dump_scene(doc: dict) -> str:
    """Serialize a scene document (see dump_json for number formatting)."""
    return dump_json(doc)


def parse_scene_text(text: str) -> dict:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SceneError(f"scene file is not valid JSON: {exc}") from exc


def resolve_scene(source: str) -> dict:
    """Load a scene document from a file path or a shipped preset name."""
    p = FsPath(source)
    if p.exists():
        return parse_scene_text(p.read_text())
    name = source[:-6] if source.endswith(".scene") else source
    try:
        text = (resources.files("holonomy") / "scenes" / f"{name}.scene").read_text()
    except (FileNotFoundError, ModuleNotFoundError):
        raise SceneError(
            f"{source!r} is neither a readable file nor a shipped preset"
        )
    return parse_scene_text(text)


def load_scene(source: str) -> Scene:
    return build_scene(resolve_scene(source))
