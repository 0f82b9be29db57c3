"""Shipped preset scenes.

Every acceptance check runs from one of these presets; the .scene files in
holonomy/scenes are generated from the dictionaries here, so the JSON files
and the Python builders cannot drift apart.

Catalog:
  trivial           zero U(1) cocycle on the two-cap sphere cover
  monopole_k1/2/3   charge-k monopole potentials with e^{i k phi} transitions
  monopole_corrupt  half-integer-charge forms with an integer transition; the
                    compatibility law fails by exactly (1/2) dphi and the
                    Chern integral sits half way between integers
  su2_poly_bench    polynomial su(2) connection on the plane-grid cover
  su2_poly_bench_u1 the same with all coefficients along sigma_z (abelian)
  pure_gauge_su2    exactly flat A = -(dg) g^{-1} for a non-abelian g
  plane_constant    constant-coefficient su(2) form on the plane
"""

from __future__ import annotations

import numpy as np

_SX = [[0.0, 1.0], [1.0, 0.0]]
_SY_IM = True  # sigma_y is purely imaginary; matrices below are [re, im] pairs


def _mat(m) -> list:
    """Row-major [re, im] encoding of a complex matrix."""
    m = np.asarray(m, dtype=complex)
    return [[[float(x.real), float(x.imag)] for x in row] for row in m]


def _pauli(name: str, coeff: complex) -> list:
    sig = {
        "x": np.array([[0, 1], [1, 0]], dtype=complex),
        "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
        "z": np.array([[1, 0], [0, -1]], dtype=complex),
    }[name]
    return _mat(coeff * sig)


_SPHERE_PATHS = {
    "equator": {"preset": "equator", "params": {}},
    "lat60": {"preset": "latitude", "params": {"theta0": np.pi / 3}},
    "lat90": {"preset": "latitude", "params": {"theta0": np.pi / 2}},
    "lat120": {"preset": "latitude", "params": {"theta0": 2 * np.pi / 3}},
    "lat_small": {"preset": "latitude", "params": {"theta0": np.pi / 6}},
    "meridian": {"preset": "meridian", "params": {"phi0": 0.0}},
    "equator_rev": {"preset": "latitude",
                    "params": {"theta0": np.pi / 2, "turns": -1.0}},
}

SU2_BENCH_TERMS = [
    ("x", 0.40j, 0, 0, 0),
    ("y", 0.30j, 0, 1, 0),
    ("z", 0.25j, 0, 0, 1),
    ("y", 0.35j, 1, 0, 0),
    ("z", 0.30j, 1, 1, 0),
    ("x", 0.20j, 1, 0, 1),
]

_BENCH_LOOP1 = [[0.0, 0.0], [0.8, 0.2], [0.5, 0.9], [-0.3, 0.6], [0.0, 0.0]]
_BENCH_LOOP2 = [[0.0, 0.0], [-0.6, -0.4], [0.2, -0.9], [0.8, -0.3], [0.0, 0.0]]

_PLANE_PATHS = {
    "bench": {
        "preset": "waypoints",
        "params": {},
        "waypoints": [[-1.0, -0.8], [-0.3, 0.5], [0.4, -0.2], [1.0, 0.9]],
    },
    "loop1": {"preset": "waypoints", "params": {}, "waypoints": _BENCH_LOOP1},
    "loop2": {"preset": "waypoints", "params": {}, "waypoints": _BENCH_LOOP2},
    "seg": {"preset": "segment", "params": {"a": [-0.8, -0.5], "b": [0.9, 0.6]}},
    "seg_ne": {"preset": "segment", "params": {"a": [0.1, 0.1], "b": [1.0, 0.9]}},
    "unit_segment": {"preset": "segment", "params": {"a": [0.0, 0.0], "b": [1.0, 0.0]}},
}

PURE_GAUGE_A = [[0.6, 1, 0], [0.3, 0, 1]]
PURE_GAUGE_B = [[0.5, 0, 1], [-0.2, 1, 0]]


def _monopole_scene(k_form: float, k_transition: int) -> dict:
    return {
        "group": {"kind": "U1", "n": 1},
        "manifold": {"kind": "SphereS2"},
        "cocycle": {
            "cover": "two_caps",
            "forms": [
                {"set": "north", "preset": "monopole",
                 "params": {"k": k_form, "hemisphere": "north"}},
                {"set": "south", "preset": "monopole",
                 "params": {"k": k_form, "hemisphere": "south"}},
            ],
            "transitions": [
                {"i": "north", "j": "south", "preset": "monopole_phase",
                 "params": {"k": k_transition}},
            ],
        },
        "gauge": {"preset": "phase", "params": {"k": k_transition}},
        "paths": dict(_SPHERE_PATHS),
        "solver": {"base_steps": 256, "tol": 1e-9, "max_refinements": 8},
        "seed": 42,
    }


def _bench_terms(abelian: bool) -> list:
    out = []
    for name, coeff, d, px, py in SU2_BENCH_TERMS:
        use = "z" if abelian else name
        out.append({"mat": _pauli(use, coeff), "dir": d, "px": px, "py": py})
    return out


def _su2_bench_scene(abelian: bool) -> dict:
    return {
        "group": {"kind": "SU2", "n": 2},
        "manifold": {"kind": "PlaneR2"},
        "cocycle": {
            "cover": "plane_grid",
            "forms": [
                {"set": "*", "preset": "polynomial",
                 "params": {"terms": _bench_terms(abelian)}},
            ],
            "transitions": [],
        },
        "gauge": {"preset": "su2_exp_poly",
                  "params": {"coeffs": [[0.5, 1, 0], [0.3, 0, 1]],
                             "direction": "y"}},
        "paths": dict(_PLANE_PATHS),
        "solver": {"base_steps": 256, "tol": 1e-9, "max_refinements": 8},
        "seed": 42,
    }


def _pure_gauge_scene() -> dict:
    return {
        "group": {"kind": "SU2", "n": 2},
        "manifold": {"kind": "PlaneR2"},
        "cocycle": {
            "cover": "plane_grid",
            "forms": [
                {"set": "*", "preset": "pure_gauge",
                 "params": {"a": PURE_GAUGE_A, "b": PURE_GAUGE_B}},
            ],
            "transitions": [],
        },
        "gauge": {"preset": "su2_product",
                  "params": {"a": PURE_GAUGE_A, "b": PURE_GAUGE_B}},
        "paths": dict(_PLANE_PATHS),
        "solver": {"base_steps": 256, "tol": 1e-9, "max_refinements": 8},
        "seed": 42,
    }


def _plane_constant_scene() -> dict:
    x_mat = np.array([[0, 1], [1, 0]], dtype=complex) * 0.5j \
        + np.array([[0, -1j], [1j, 0]], dtype=complex) * 0.3j
    return {
        "group": {"kind": "SU2", "n": 2},
        "manifold": {"kind": "PlaneR2"},
        "cocycle": {
            "cover": "plane_grid",
            "forms": [
                {"set": "*", "preset": "constant",
                 "params": {"mats": [_mat(x_mat), _mat(np.zeros((2, 2)))]}},
            ],
            "transitions": [],
        },
        "paths": dict(_PLANE_PATHS),
        "solver": {"base_steps": 256, "tol": 1e-9, "max_refinements": 8},
        "seed": 42,
    }


def _trivial_scene() -> dict:
    return {
        "group": {"kind": "U1", "n": 1},
        "manifold": {"kind": "SphereS2"},
        "cocycle": {
            "cover": "two_caps",
            "forms": [
                {"set": "north", "preset": "zero", "params": {}},
                {"set": "south", "preset": "zero", "params": {}},
            ],
            "transitions": [
                {"i": "north", "j": "south", "preset": "identity", "params": {}},
            ],
        },
        "paths": dict(_SPHERE_PATHS),
        "solver": {"base_steps": 256, "tol": 1e-9, "max_refinements": 8},
        "seed": 42,
    }


def scene_dict(name: str) -> dict:
    builders = {
        "trivial": _trivial_scene,
        "monopole_k1": lambda: _monopole_scene(1.0, 1),
        "monopole_k2": lambda: _monopole_scene(2.0, 2),
        "monopole_k3": lambda: _monopole_scene(3.0, 3),
        "monopole_corrupt": lambda: _monopole_scene(1.5, 1),
        "su2_poly_bench": lambda: _su2_bench_scene(False),
        "su2_poly_bench_u1": lambda: _su2_bench_scene(True),
        "pure_gauge_su2": _pure_gauge_scene,
        "plane_constant": _plane_constant_scene,
    }
    try:
        return builders[name]()
    except KeyError:
        raise KeyError(f"unknown preset scene {name!r}")


PRESET_NAMES = (
    "trivial",
    "monopole_k1",
    "monopole_k2",
    "monopole_k3",
    "monopole_corrupt",
    "su2_poly_bench",
    "su2_poly_bench_u1",
    "pure_gauge_su2",
    "plane_constant",
)

#: presets whose cocycle satisfies both descent laws (monopole_corrupt does not)
CONSISTENT_PRESETS = tuple(n for n in PRESET_NAMES if n != "monopole_corrupt")
