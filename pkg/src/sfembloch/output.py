"""Serialization of dispersion results: CSV, JSON summary and SVG band diagram."""
from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import numpy as np

from .sweep import DispersionResult

COLUMNS = ("path_coordinate", "k_x", "k_y", "mode_index", "omega", "omega_normalized")
_COLUMN_NOTES = (
    "path_coordinate: cumulative path length along the wave-vector path [rad/m]",
    "k_x, k_y: wave vector components [rad/m]",
    "mode_index: branch number, 1-based, ascending frequency at each k",
    "omega: angular frequency [rad/s]",
    "omega_normalized: omega * L_ref / (pi * c_ref)",
)


def _num(x: float) -> str:
    return repr(float(x))


def dispersion_csv(result: DispersionResult, config_hash: str = "") -> str:
    buf = io.StringIO()
    buf.write(f"# c_ref = {_num(result.c_ref)}  (m/s)\n")
    buf.write(f"# L_ref = {_num(result.L_ref)}  (m)\n")
    buf.write(f"# config_hash = {config_hash}\n")
    buf.write(f"# meta = {json.dumps(result.meta, sort_keys=True)}\n")
    for note in _COLUMN_NOTES:
        buf.write(f"# {note}\n")
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(COLUMNS)
    Omega = result.Omega
    for i, ((kx, ky), s) in enumerate(zip(result.kpoints, result.path_s)):
        for j in range(result.n_branches):
            writer.writerow([_num(s), _num(kx), _num(ky), j + 1,
                             _num(result.omegas[i, j]), _num(Omega[i, j])])
    return buf.getvalue()


def write_csv(result: DispersionResult, path, config_hash: str = "") -> Path:
    path = Path(path)
    path.write_text(dispersion_csv(result, config_hash), encoding="utf-8", newline="")
    return path


def read_csv(path) -> DispersionResult:
    header, rows = {}, []
    with open(path, encoding="utf-8", newline="") as fh:
        lines = fh.read().splitlines()
    body = []
    for line in lines:
        if line.startswith("#"):
            key, sep, value = line[1:].partition("=")
            if sep and key.strip() in ("c_ref", "L_ref", "config_hash", "meta"):
                header[key.strip()] = value.strip()
        elif line:
            body.append(line)
    reader = csv.reader(body)
    if tuple(next(reader)) != COLUMNS:
        raise ValueError(f"{path}: unexpected CSV columns")
    rows = [r for r in reader]
    n_modes = max(int(r[3]) for r in rows)
    n_k = len(rows) // n_modes
    data = np.array([[float(r[0]), float(r[1]), float(r[2]), float(r[4])] for r in rows])
    data = data.reshape(n_k, n_modes, 4)
    return DispersionResult(
        kpoints=data[:, 0, 1:3].copy(),
        path_s=data[:, 0, 0].copy(),
        omegas=data[:, :, 3].copy(),
        c_ref=float(header["c_ref"].split()[0]),
        L_ref=float(header["L_ref"].split()[0]),
        meta=json.loads(header.get("meta", "{}")),
    )


def write_json(payload: dict, path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def write_svg(result: DispersionResult, path, analytic=None, title: str = "") -> Path:
    """Band diagram (Omega against xi). ``analytic`` is an optional list of (xi, Omega) curves."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    with matplotlib.rc_context({"svg.hashsalt": "sfembloch"}):
        return _draw_svg(plt, result, Path(path), analytic, title)


def _draw_svg(plt, result, path, analytic, title):
    fig, ax = plt.subplots(figsize=(5, 5))
    if analytic:
        for xi, Om in analytic:
            ax.plot(xi, Om, ":", color="0.4", lw=1)
    ax.plot(result.xi, result.Omega, "-", color="C0", lw=1.2)
    ax.set_xlim(result.xi[0], result.xi[-1])
    ax.set_ylim(0, float(np.nanmax(result.Omega)) * 1.02)
    ax.set_xlabel(r"$\xi = s L_{ref}/\pi$")
    ax.set_ylabel(r"$\Omega = \omega L_{ref}/(\pi c_{ref})$")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path
