"""affevo command line.

Every command prints a JSON report on stdout (``curvature`` without ``--out``
prints the jet table as CSV instead).  With ``--out DIR`` the artifacts are
written into DIR: CSV/JSON/SVG/OBJ files plus matplotlib PNG figures unless
``--no-figures`` is given.

Exit codes: 0 success, 2 usage, 3 inflexion rejection, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import export, oracle
from .affine import AffineJetTable, affine_jets
from .curves import INFLEXION_THRESHOLD, CurveSpec, bracket, parse_curve_arg, sample_curve
from .discriminant import (
    build_discriminant_mesh,
    cusp_line_verticality_check,
    versality_diagnostics,
)
from .errors import AffevoError, InflexionError
from .evolutoid import (
    TOL_CLASS,
    TOL_ROOT,
    Kind,
    alpha_born,
    check_alpha,
    cusp_third_derivative_check,
    evolutoid_curve,
    singular_points,
)

log = logging.getLogger("affevo")

EXIT_OK, EXIT_USAGE, EXIT_INFLEXION, EXIT_NUMERICAL = 0, 2, 3, 4


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    curve: CurveSpec
    samples: int = 1024
    alpha: float | None = None
    alphas: np.ndarray | None = None
    out: Path | None = None
    tol_root: float = TOL_ROOT
    tol_class: float = TOL_CLASS
    tol_inflexion: float = INFLEXION_THRESHOLD
    verify: bool = False
    figures: bool = True
    alpha_tol: float = 1e-8


# --- argument types -----------------------------------------------------------------


def _positive(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not (v > 0 and np.isfinite(v)):
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return v


def _alpha(text: str) -> float:
    try:
        return check_alpha(float(text))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def parse_alpha_range(text: str) -> np.ndarray:
    """``lo:hi:step`` -> lo, lo + step, ... up to hi (inclusive within round-off)."""
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"alpha range must be lo:hi:step, got {text!r}")
    try:
        lo, hi, step = (float(p) for p in parts)
    except ValueError:
        raise UsageError(f"alpha range must be numeric, got {text!r}") from None
    if not step > 0:
        raise UsageError("alpha range step must be positive")
    if not hi > lo:
        raise UsageError(f"empty alpha range {text!r}")
    check_alpha(lo)
    check_alpha(hi)
    n = int(np.floor((hi - lo) / step + 1e-9)) + 1
    # rounding keeps grid values like 0.3 free of accumulated step error
    return np.minimum(np.round(lo + step * np.arange(n), 12), hi)


# --- commands ----------------------------------------------------------------------


def _jets(cfg: RunConfig) -> AffineJetTable:
    return affine_jets(sample_curve(cfg.curve, cfg.samples), threshold=cfg.tol_inflexion)


def _write(cfg: RunConfig, name: str, text: str, files: list[str]) -> None:
    export.write_text(cfg.out / name, text)
    files.append(name)


def _figure(cfg: RunConfig, name: str, files: list[str], draw) -> None:
    if not cfg.figures:
        return
    from . import plotting

    draw(plotting, cfg.out / name)
    files.append(name)


def verify_jets(jets: AffineJetTable) -> dict:
    dt = 2 * np.pi / jets.n
    s_t = np.cbrt(jets.kappa)
    mu_s_fd = oracle.fd_derivative(jets.mu, 1, dt) / s_t
    return {
        "normalization_max": float(np.abs(bracket(jets.gamma_s, jets.gamma_ss) - 1).max()),
        "structure_residual_max": float(np.abs(jets.gamma_sss + jets.mu[:, None] * jets.gamma_s).max()),
        "mu_s_fd_vs_spectral_max": float(np.abs(mu_s_fd - jets.mu_s).max()),
    }


def cmd_curvature(cfg: RunConfig) -> dict | str:
    jets = _jets(cfg)
    csv = export.jets_csv(jets)
    if cfg.out is None:
        if cfg.verify:
            sys.stderr.write(export.dumps({"verification": verify_jets(jets)}))
        return csv
    files: list[str] = []
    _write(cfg, "jets.csv", csv, files)
    report = {
        "samples": jets.n,
        "affine_length": jets.length,
        "mu_min": float(jets.mu.min()),
        "mu_max": float(jets.mu.max()),
        "min_abs_kappa": float(np.abs(jets.kappa).min()),
        "orientation_reversed": bool(jets.flipped),
    }

    def draw(plotting, path):
        import matplotlib.pyplot as plt

        with plt.rc_context(plotting.STYLE):
            fig, ax = plt.subplots(figsize=(5, 3))
            ax.plot(jets.s, jets.mu, color=plotting.EVO_COLOR, lw=1.0)
            ax.set_xlabel("affine arclength s")
            ax.set_ylabel(r"$\mu$")
            plotting._save(fig, path)

    _figure(cfg, "curvature.png", files, draw)
    if cfg.verify:
        report["verification"] = verify_jets(jets)
    report["files"] = files
    return report


def verify_envelope(jets: AffineJetTable, alpha: float, records, ds: float = 1e-4,
                    stride: int = 8) -> dict:
    nodes = range(0, jets.n, stride)
    exact = evolutoid_curve(jets, alpha).X
    errs, skipped = [], 0
    for i in nodes:
        try:
            P = oracle.envelope_by_intersection(jets, alpha, ds, [i])[0]
        except oracle.ParallelLinesError:
            skipped += 1
            continue
        errs.append(float(np.hypot(*(P - exact[i]))))
    out = {"intersection_ds": ds, "intersection_max_error": max(errs) if errs else None,
           "intersection_nodes_skipped": skipped}
    cusp = []
    for r in records:
        if r.kind is not Kind.A2:
            continue
        num, closed = cusp_third_derivative_check(jets, r.s0, alpha)
        cusp.append({"s": r.s0, "fd": num, "closed_form": closed,
                     "relative_error": abs(num - closed) / max(abs(closed), 1e-300)})
    out["cusp_third_derivative"] = cusp
    out["dense_sign_changes"] = oracle.sign_change_count(jets, alpha)
    return out


def _singularities(cfg: RunConfig, jets: AffineJetTable):
    return singular_points(jets, cfg.alpha, tol_root=cfg.tol_root, tol_class=cfg.tol_class)


def cmd_singularities(cfg: RunConfig) -> dict:
    jets = _jets(cfg)
    records = _singularities(cfg, jets)
    report = export.singularity_report(cfg.alpha, records)
    files: list[str] = []
    if cfg.verify and cfg.alpha > 0:
        report["verification"] = verify_envelope(jets, cfg.alpha, records)
    if cfg.out is not None:
        _write(cfg, "singularities.json", export.dumps(report), files)
        report["files"] = files
    return report


def cmd_evolutoid(cfg: RunConfig) -> dict:
    jets = _jets(cfg)
    curve = evolutoid_curve(jets, cfg.alpha)
    records = _singularities(cfg, jets)
    report = export.singularity_report(cfg.alpha, records)
    if cfg.verify and cfg.alpha > 0:
        report["verification"] = verify_envelope(jets, cfg.alpha, records)
    if cfg.out is None:
        return report
    files: list[str] = []
    _write(cfg, "evolutoid.svg", export.evolutoid_svg(jets, curve, records), files)
    _write(cfg, "singularities.json", export.dumps(report), files)
    _figure(cfg, "evolutoid.png", files,
            lambda plotting, path: plotting.plot_evolutoid(jets, curve, records, path))
    report["files"] = files
    return report


def cmd_sweep(cfg: RunConfig) -> dict:
    jets = _jets(cfg)
    levels, rows = [], ["alpha,count,A2,A3,degenerate"]
    for a in cfg.alphas:
        records = singular_points(jets, float(a), tol_root=cfg.tol_root, tol_class=cfg.tol_class)
        kinds = [r.kind for r in records]
        counts = [kinds.count(k) for k in (Kind.A2, Kind.A3, Kind.DEGENERATE)]
        rows.append(",".join([export.fmt(a), str(len(records)), *map(str, counts)]))
        level = {"alpha": float(a), "count": len(records),
                 "singularities": [r.to_dict() for r in records]}
        if cfg.verify:
            level["dense_sign_changes"] = oracle.sign_change_count(jets, float(a))
        levels.append(level)
    report = {"levels": levels}
    if cfg.out is not None:
        files: list[str] = []
        _write(cfg, "sweep.csv", "\n".join(rows) + "\n", files)
        _write(cfg, "sweep.json", export.dumps(report), files)
        counts = [lv["count"] for lv in levels]
        _figure(cfg, "sweep.png", files,
                lambda plotting, path: plotting.plot_sweep(cfg.alphas, counts, path))
        report["files"] = files
    return report


def verify_discriminant(jets: AffineJetTable, mesh) -> dict:
    a_lo, a_hi = float(mesh.alphas[0]), float(mesh.alphas[-1])
    n_alpha = max(256, 4 * mesh.alphas.size)
    scan = oracle.dense_scan_g(jets, max(512, jets.n), n_alpha, a_lo, a_hi)
    tails = []
    for r in mesh.swallowtails:
        entry = {"alpha": r.alpha0, "s": r.s0,
                 "count_change": oracle.count_change_across(jets, r.alpha0)}
        if 0 < r.alpha0 < 1:
            d = versality_diagnostics(jets, None, r.alpha0, t=r.t0)
            closed = d.alpha_detJbar_closed
            entry["alpha_detJbar_relative_error"] = abs(r.alpha0 * d.detJbar - closed) / abs(closed)
        tails.append(entry)
    vert = [cusp_line_verticality_check(jets, e) for e in mesh.cuspidal_edges]
    return {
        "dense_scan_births": scan.births,
        "swallowtails": tails,
        "min_verticality": min(vert) if vert else None,
    }


def cmd_discriminant(cfg: RunConfig) -> dict:
    jets = _jets(cfg)
    if cfg.alphas.size < 2:
        raise UsageError("the discriminant needs at least two alpha levels")
    mesh = build_discriminant_mesh(jets, float(cfg.alphas[0]), float(cfg.alphas[-1]),
                                   cfg.alphas.size)
    report = export.discriminant_report(mesh)
    if cfg.verify:
        report["verification"] = verify_discriminant(jets, mesh)
    if cfg.out is not None:
        files: list[str] = []
        _write(cfg, "discriminant.obj", export.discriminant_obj(mesh), files)
        _write(cfg, "discriminant.json", export.dumps(report), files)
        _figure(cfg, "discriminant.png", files,
                lambda plotting, path: plotting.plot_discriminant(mesh, path))
        report["files"] = files
    return report


def cmd_alpha_born(cfg: RunConfig) -> dict:
    jets = _jets(cfg)
    res = alpha_born(jets, alpha_tol=cfg.alpha_tol)
    report = {"alpha_star": res.alpha, "s_star": res.s, "t_star": res.t,
              "polished": res.polished, "bracket": list(res.bracket)}
    if cfg.verify:
        scan = oracle.dense_scan_g(jets, max(512, jets.n), 512)
        if scan.births:
            first = scan.births[0]
            cell = (first - (scan.alphas[1] - scan.alphas[0]), first)
            ok = cell[0] <= res.alpha <= cell[1] + cfg.alpha_tol
        else:
            cell, ok = None, res.alpha >= 1.0 - 1e-6
        report["verification"] = {"dense_scan_births": scan.births,
                                  "dense_scan_cell": list(cell) if cell else None,
                                  "consistent": bool(ok)}
    if cfg.out is not None:
        files: list[str] = []
        _write(cfg, "alpha_born.json", export.dumps(report), files)
        report["files"] = files
    return report


COMMANDS = {
    "curvature": cmd_curvature,
    "evolutoid": cmd_evolutoid,
    "singularities": cmd_singularities,
    "sweep": cmd_sweep,
    "discriminant": cmd_discriminant,
    "alpha-born": cmd_alpha_born,
}
NEEDS_ALPHA = {"evolutoid", "singularities"}
NEEDS_RANGE = {"sweep", "discriminant"}
DEFAULT_RANGE = {"sweep": "0:1:0.05", "discriminant": "0:1:0.01"}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--curve", required=True,
                        help="ellipse:a,b | circle:r | sigma[:phase] | figure-eight | JSON | @file.json")
    common.add_argument("--samples", type=int, default=1024, help="grid size, a power of two")
    common.add_argument("--alpha", type=_alpha, help="slope parameter in [0, 1]")
    common.add_argument("--alpha-range", metavar="LO:HI:STEP", help="inclusive alpha grid for sweep/discriminant")
    common.add_argument("--out", type=Path, help="directory for written artifacts")
    common.add_argument("--verify", action="store_true", help="append oracle cross-checks")
    common.add_argument("--tol-root", type=_positive, default=TOL_ROOT,
                        help="root width in the curve parameter")
    common.add_argument("--tol-class", type=_positive, default=TOL_CLASS,
                        help="relative threshold separating A2, A3, degenerate")
    common.add_argument("--tol-inflexion", type=_positive, default=INFLEXION_THRESHOLD,
                        help="reject curves with min |kappa| below this")
    common.add_argument("--alpha-tol", type=_positive, default=1e-8, help="alpha-born bisection width")
    common.add_argument("--no-figures", action="store_true", help="skip matplotlib PNGs")
    common.add_argument("-v", "--verbose", action="count", default=0)

    parser = argparse.ArgumentParser(prog="affevo", description="Affine evolutoids of closed plane curves.")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "curvature": "affine arclength and curvature jets (CSV)",
        "evolutoid": "evolutoid at one alpha (SVG + JSON)",
        "singularities": "singular points at one alpha (JSON)",
        "sweep": "singular-point counts across an alpha range",
        "discriminant": "discriminant surface mesh (OBJ + JSON)",
        "alpha-born": "first alpha with a singular evolutoid",
    }
    for name, text in helps.items():
        sub.add_parser(name, parents=[common], help=text)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(curve=parse_curve_arg(args.curve), samples=args.samples, out=args.out,
                    tol_root=args.tol_root, tol_class=args.tol_class,
                    tol_inflexion=args.tol_inflexion, verify=args.verify,
                    figures=not args.no_figures, alpha_tol=args.alpha_tol)
    if args.command in NEEDS_ALPHA:
        if args.alpha is None:
            raise UsageError(f"{args.command} needs --alpha")
        cfg.alpha = args.alpha
    if args.command in NEEDS_RANGE:
        cfg.alphas = parse_alpha_range(args.alpha_range or DEFAULT_RANGE[args.command])
    return cfg


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = config_from_args(args)
        result = COMMANDS[args.command](cfg)
    except InflexionError as exc:
        print(f"affevo: {exc}", file=sys.stderr)
        return EXIT_INFLEXION
    except AffevoError as exc:
        print(f"affevo: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValueError, OSError) as exc:
        print(f"affevo: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        sys.stdout.write(result if isinstance(result, str) else export.dumps(result))
        sys.stdout.flush()
    except BrokenPipeError:
        sys.stderr.close()
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
