"""Report rendering: CSV summary plus matplotlib figures on disk.

Used by the CLI `report` command.  Figures are deterministic for a fixed
scene and seed and are written next to the CSV file.
"""

from __future__ import annotations

import csv
import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .connection import curvature_batch
from .descent import AnchorChoice, factor_path, reconstruct_transport, verify_cocycle
from .geometry import sphere_dphi, sphere_dtheta, sphere_point
from .solver import SolverConfig, integrate_fixed, pullback_1form
from .groups import opnorm
from .wilson import chern_number

_DPI = 150


def _fig_path(csv_path: str, suffix: str) -> str:
    stem, _ = os.path.splitext(csv_path)
    return f"{stem}_{suffix}.png"


def _curvature_grid(scene):
    cover = scene.cover
    if cover.manifold.kind == "SphereS2":
        th = np.linspace(0.05, np.pi - 0.05, 60)
        ph = np.linspace(0.0, 2 * np.pi, 120)
        gt, gp = np.meshgrid(th, ph, indexing="ij")
        pts = sphere_point(gt.ravel(), gp.ravel())
        v, w = sphere_dtheta(pts), sphere_dphi(pts)
        extent = (0.0, 2 * np.pi, np.pi, 0.0)
        labels = ("longitude", "colatitude")
        shape = gt.shape
    else:
        xs = np.linspace(-1.4, 1.4, 80)
        gx, gy = np.meshgrid(xs, xs, indexing="ij")
        pts = np.stack([gx.ravel(), gy.ravel()], axis=-1)
        v = np.broadcast_to(np.array([1.0, 0.0]), pts.shape).copy()
        w = np.broadcast_to(np.array([0.0, 1.0]), pts.shape).copy()
        extent = (-1.4, 1.4, -1.4, 1.4)
        labels = ("x", "y")
        shape = gx.shape

    clear = cover.clearances(pts)
    choice = np.argmax(clear, axis=0)
    vals = np.zeros(len(pts))
    for idx, cset in enumerate(cover.sets):
        mask = choice == idx
        if not np.any(mask):
            continue
        k = curvature_batch(scene.cocycle.form(cset.id), cset, pts[mask],
                            v[mask], w[mask])
        if scene.group.n == 1:
            vals[mask] = k[:, 0, 0].imag
        else:
            vals[mask] = np.linalg.svd(k, compute_uv=False)[..., 0]
    return vals.reshape(shape), extent, labels


def write_report(scene, scene_name: str, cfg: SolverConfig, seed: int,
                 csv_path: str) -> list:
    """Run the scene's standard checks; write CSV and figures, return paths."""
    os.makedirs(os.path.dirname(os.path.abspath(csv_path)) or ".", exist_ok=True)
    files = [csv_path]
    anchors = AnchorChoice.by_clearance(scene.cover)
    rows = [("section", "name", "value")]

    rep = verify_cocycle(scene.cocycle, n_samples=200, seed=seed)
    rows.append(("verify", "max_triple", format(rep.max_triple, ".17g")))
    rows.append(("verify", "max_compat", format(rep.max_compat, ".17g")))
    rows.append(("verify", "pass", str(rep.passed).lower()))

    for name in sorted(scene.paths):
        gamma = scene.paths[name]
        res = reconstruct_transport(factor_path(gamma, scene.cocycle, anchors),
                                    scene.cocycle, cfg)
        if scene.group.n == 1:
            rows.append(("transport", name,
                         format(float(np.angle(res.value.mat[0, 0])), ".17g")))
        else:
            rows.append(("transport", name,
                         format(opnorm(res.value.mat - np.eye(scene.group.n)),
                                ".17g")))

    if scene.group.kind == "U1" and scene.cover.manifold.kind == "SphereS2":
        rows.append(("chern", "value", format(chern_number(scene.cocycle), ".17g")))

    # curvature heatmap
    vals, extent, labels = _curvature_grid(scene)
    fig, ax = plt.subplots(figsize=(5.0, 3.6))
    im = ax.imshow(vals, origin="upper", aspect="auto", extent=extent,
                   cmap="viridis")
    fig.colorbar(im, ax=ax, label="curvature")
    ax.set_xlabel(labels[0])
    ax.set_ylabel(labels[1])
    ax.set_title(f"{scene_name}: curvature")
    fig.tight_layout()
    f = _fig_path(csv_path, "curvature")
    fig.savefig(f, dpi=_DPI)
    plt.close(fig)
    files.append(f)

    # solver convergence on the first single-set path
    conv = _convergence_data(scene)
    if conv is not None:
        pname, ns, errs = conv
        fig, ax = plt.subplots(figsize=(4.4, 3.4))
        ax.loglog(ns, errs, "o-", label=f"path {pname!r}")
        guide = errs[0] * (ns[0] / np.asarray(ns, dtype=float)) ** 4
        ax.loglog(ns, guide, "k--", lw=0.8, label="N^-4 guide")
        ax.set_xlabel("steps N")
        ax.set_ylabel("error vs fine reference")
        ax.legend(fontsize=8)
        ax.set_title(f"{scene_name}: RK4 convergence")
        fig.tight_layout()
        f = _fig_path(csv_path, "convergence")
        fig.savefig(f, dpi=_DPI)
        plt.close(fig)
        files.append(f)
        for n, e in zip(ns, errs):
            rows.append(("convergence", f"N={n}", format(e, ".17g")))

    # transport trace along the first path
    name = sorted(scene.paths)[0] if scene.paths else None
    if name is not None:
        gamma = scene.paths[name]
        tgrid = np.linspace(0.0, 1.0, 17)[1:]
        dist = []
        for t in tgrid:
            res = reconstruct_transport(
                factor_path(gamma.subpath(0.0, float(t)), scene.cocycle, anchors),
                scene.cocycle, cfg)
            dist.append(opnorm(res.value.mat - np.eye(scene.group.n)))
        fig, ax = plt.subplots(figsize=(4.4, 3.4))
        ax.plot(tgrid, dist, "o-")
        ax.set_xlabel("path parameter")
        ax.set_ylabel("|transport - 1|")
        ax.set_title(f"{scene_name}: transport along {name!r}")
        fig.tight_layout()
        f = _fig_path(csv_path, "transport")
        fig.savefig(f, dpi=_DPI)
        plt.close(fig)
        files.append(f)

    with open(csv_path, "w", newline="") as fh:
        csv.writer(fh).writerows(rows)
    return files


def _convergence_data(scene):
    for name in sorted(scene.paths):
        gamma = scene.paths[name]
        ts = np.linspace(0.0, 1.0, 128)
        pts = gamma(ts)
        for cset in scene.cover.sets:
            if float(cset.clearance(pts).min()) > 0.0:
                a = pullback_1form(scene.cocycle.form(cset.id), gamma,
                                   check_domain=False)
                ref = integrate_fixed(a, 0.0, 1.0, 2048, scene.group).mat
                ns = [32, 64, 128, 256]
                errs = [
                    opnorm(integrate_fixed(a, 0.0, 1.0, n, scene.group).mat - ref)
                    for n in ns
                ]
                return name, ns, errs
    return None
