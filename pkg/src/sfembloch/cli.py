"""Command-line entry point: ``sfembloch <subcommand> --config FILE``."""
from __future__ import annotations

import argparse
import csv
import io
import os
import sys
from pathlib import Path

import numpy as np

from . import analytic, output
from .basis import gauss_legendre_quadrature, gll_quadrature, monomial_exactness, runge_study
from .cellmesh import Bilayer, Homogeneous
from .config import RunConfig, parse_config
from .elasticity import wave_speeds
from .errors import ReportError, SfemBlochError
from .sweep import PathSpec, compare_to_oracle, compute_dispersion, oracle_for

THREADS_ENV = "SFEMBLOCH_THREADS"


def _threads(arg) -> int:
    if arg is not None:
        return arg
    raw = os.environ.get(THREADS_ENV)
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            raise SfemBlochError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    return 1


def run_dispersion(cfg: RunConfig, threads: int = 1):
    cell = cfg.cell()
    path = PathSpec.for_cell(cell, cfg.path, cfg.samples)
    return compute_dispersion(cell, cfg.nx, cfg.ny, cfg.element_spec(), cfg.lumping_mode,
                              path, cfg.n_modes, threads)


def _oracle_report(cfg: RunConfig, result):
    try:
        oracle = oracle_for(cfg.cell())
        return compare_to_oracle(result, oracle)
    except ReportError:
        return None


def analytic_curves(cfg: RunConfig, result):
    """Closed-form curves as (xi, Omega) pairs on the result's axes, or None."""
    cell = cfg.cell()
    ky = result.kpoints[:, 1]
    if np.any(result.kpoints[:, 0] != 0):
        return None
    scale = result.L_ref / (np.pi * result.c_ref)
    top = float(result.omegas.max())
    if isinstance(cell.layout, Homogeneous):
        _, rows = analytic.homogeneous_curves(wave_speeds(cell.layout.material), cell.d_b, ky,
                                              omega_max=top)
        return [(result.xi, w * scale) for w in rows]
    if isinstance(cell.layout, Bilayer):
        curves = []
        for wave in ("P", "S"):
            spec = analytic.BilayerSpec.from_materials(cell.layout.bottom, cell.layout.top, cell.d_b, wave)
            for seg in analytic.bilayer_branches(spec, top, 4000).segments:
                curves.append((seg[:, 0] * result.L_ref / np.pi, seg[:, 1] * scale))
        return curves
    return None


def cmd_dispersion(cfg: RunConfig, out: Path, threads: int, svg: bool) -> int:
    out.mkdir(parents=True, exist_ok=True)
    result = run_dispersion(cfg, threads)
    written = []
    if "csv" in cfg.formats:
        written.append(output.write_csv(result, out / "dispersion.csv", cfg.digest))
    summary = {
        "config": cfg.to_ini(),
        "config_hash": cfg.digest,
        "normalization": {"c_ref": result.c_ref, "L_ref": result.L_ref,
                          "Omega": "omega*L_ref/(pi*c_ref)", "xi": "s*L_ref/pi"},
        "meta": result.meta,
        "n_kpoints": len(result.kpoints),
        "n_branches": result.n_branches,
    }
    report = _oracle_report(cfg, result)
    if report is not None:
        summary["oracle"] = report.to_dict()
    if "json" in cfg.formats:
        written.append(output.write_json(summary, out / "summary.json"))
    if svg or "svg" in cfg.formats:
        written.append(output.write_svg(result, out / "dispersion.svg", analytic_curves(cfg, result),
                                        title=result.meta["element"]))
    for p in written:
        print(p)
    return 0


def cmd_compare(cfg: RunConfig, out: Path, threads: int, svg: bool) -> int:
    out.mkdir(parents=True, exist_ok=True)
    result = run_dispersion(cfg, threads)
    report = compare_to_oracle(result, oracle_for(cfg.cell()))
    label = "max relative error" if report.kind == "relative" else "max Rayleigh residual"
    lines = [f"# {result.meta['element']}, {cfg.layout} cell, lumping={cfg.lumping}",
             f"branch,{label.replace(' ', '_')},median"]
    for j, (mx, md) in enumerate(zip(report.branch_max, report.branch_median), start=1):
        lines.append(f"{j},{mx:.6e},{md:.6e}")
    text = "\n".join(lines) + "\n"
    (out / "compare.csv").write_text(text, encoding="utf-8")
    output.write_json({"config_hash": cfg.digest, "meta": result.meta, **report.to_dict()},
                      out / "compare.json")
    sys.stdout.write(text)
    return 0


def cmd_analytic(cfg: RunConfig, out: Path, threads: int, svg: bool) -> int:
    out.mkdir(parents=True, exist_ok=True)
    cell = cfg.cell()
    c_ref = wave_speeds(cell.reference_material)[1]
    d = cell.d_b
    k = np.linspace(0.0, np.pi / (2 * d), cfg.samples)
    omega_max = 4.0 * np.pi * c_ref / (2 * d)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    if isinstance(cell.layout, Homogeneous):
        w.writerow(("speed", "n", "m", "k", "omega"))
        labels, rows = analytic.homogeneous_curves(wave_speeds(cell.layout.material), d, k,
                                                   omega_max=omega_max)
        for (c, n, m), row in zip(labels, rows):
            for kk, ww in zip(k, row):
                w.writerow((repr(c), n, m, repr(float(kk)), repr(float(ww))))
    elif isinstance(cell.layout, Bilayer):
        w.writerow(("wave", "segment", "k", "omega"))
        gaps = []
        for wave in ("P", "S"):
            spec = analytic.BilayerSpec.from_materials(cell.layout.bottom, cell.layout.top, d, wave)
            bands = analytic.bilayer_branches(spec, omega_max, 4000)
            gaps += [(wave, lo, hi) for lo, hi in bands.gaps]
            for s, seg in enumerate(bands.segments):
                for kk, ww in seg:
                    w.writerow((wave, s, repr(float(kk)), repr(float(ww))))
        output.write_json({"gaps": [{"wave": g[0], "omega_lo": g[1], "omega_hi": g[2]} for g in gaps]},
                          out / "analytic_gaps.json")
    else:
        raise ReportError(f"no closed-form dispersion relation for a {cfg.layout} cell")
    (out / "analytic.csv").write_text(buf.getvalue(), encoding="utf-8", newline="")
    print(out / "analytic.csv")
    return 0


def cmd_runge(args) -> int:
    errs = runge_study(10, 2001)
    print("family,max_abs_error")
    for family, e in errs.items():
        print(f"{family},{e:.6e}")
    return 0


def cmd_quadcheck(args) -> int:
    print("rule,points,max_exact_degree,first_failing_degree,error_at_failure")
    for M in range(1, 10):
        n = M + 1
        for label, rule, exact_to in (("gauss_lobatto", gll_quadrature(M), 2 * n - 3),
                                      ("gauss_legendre", gauss_legendre_quadrature(n), 2 * n - 1)):
            rows = monomial_exactness(rule, exact_to + 1)
            ok = -1
            for p, q, e in rows:
                if abs(q - e) >= 1e-12:
                    break
                ok = p
            p, q, e = rows[exact_to + 1]
            print(f"{label},{n},{ok},{p},{abs(q - e):.3e}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sfembloch",
                                     description="Dispersion curves of 2D phononic crystal cells.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, needs_config, helptext in (
            ("dispersion", True, "compute a band diagram"),
            ("compare", True, "compare a band diagram with the closed-form oracle"),
            ("analytic", True, "emit closed-form dispersion curves"),
            ("runge", False, "degree-10 interpolation error of the Runge function"),
            ("quadcheck", False, "monomial exactness of the GLL and Gauss-Legendre rules")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--config", required=needs_config, type=Path)
        p.add_argument("--out", type=Path, default=None, help="output directory")
        p.add_argument("--threads", type=int, default=None, help=f"worker threads (env {THREADS_ENV})")
        p.add_argument("--svg", action="store_true", help="also write an SVG band diagram")
    return parser


_CONFIG_COMMANDS = {"dispersion": cmd_dispersion, "compare": cmd_compare, "analytic": cmd_analytic}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "runge":
            return cmd_runge(args)
        if args.command == "quadcheck":
            return cmd_quadcheck(args)
        cfg = parse_config(args.config)
        out = args.out or Path(cfg.directory)
        return _CONFIG_COMMANDS[args.command](cfg, out, _threads(args.threads), args.svg)
    except SfemBlochError as exc:
        print(f"sfembloch {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
