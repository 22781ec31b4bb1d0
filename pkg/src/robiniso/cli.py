"""Command-line experiment runner.

Every subcommand writes CSV files, ``certificates.json`` and ``summary.txt``
into the output directory and exits with status 1 when any certified margin
falls below minus its tolerance.  Settings come from an optional JSON config
file; command-line flags override it.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import cone, corpus, domains, fem2d, geometry, radial, spectral, transplant

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_ERROR = 0, 1, 2, 3

BUILTIN_CORPORA = {
    "planar": corpus.planar_corpus,
    "spherical": corpus.spherical_corpus,
    "all": lambda: corpus.planar_corpus() + corpus.spherical_corpus(),
}

DEFAULTS = {
    "out": "robiniso-out",
    "beta": None,
    "K": 0.0,
    "L": None,
    "tol": 1e-9,
    "seed": 0,
    "raster": 512,
    "grid": 256,
    "mesh": "32x128,64x256,128x512",
    "domains": [],
    "corpus": None,
    "lam": None,
    "samples": 5,
    "h": 1e-3,
}


class UsageError(Exception):
    pass


def _fmt(v) -> str:
    return f"{v:.12e}" if isinstance(v, float) else str(v)


class Run:
    """Collects artifacts and the pass/fail state of one subcommand."""

    def __init__(self, out: Path):
        self.out = out
        self.out.mkdir(parents=True, exist_ok=True)
        self.certificates: list[dict] = []
        self.lines: list[str] = []
        self.failed = False

    def csv(self, name: str, header: str, columns: list[str], rows) -> None:
        with open(self.out / name, "w", newline="") as fh:
            fh.write(header + "\n")
            w = csv.writer(fh)
            w.writerow(columns)
            for row in rows:
                w.writerow([_fmt(v) for v in row])

    def certify(self, record: dict, ok: bool) -> None:
        record = dict(record)
        record["ok"] = bool(ok)
        self.certificates.append(record)
        if not ok:
            self.failed = True

    def say(self, line: str) -> None:
        self.lines.append(line)
        print(line)

    def finish(self) -> int:
        with open(self.out / "certificates.json", "w") as fh:
            json.dump(self.certificates, fh, indent=2, sort_keys=True, default=_json_default)
            fh.write("\n")
        status = "FAIL" if self.failed else "PASS"
        self.say(f"overall: {status}")
        with open(self.out / "summary.txt", "w") as fh:
            fh.write("\n".join(self.lines) + "\n")
        return EXIT_FAIL if self.failed else EXIT_OK


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not serialisable: {type(o)}")


def _parse_mesh(text: str) -> tuple[tuple[int, int], ...]:
    try:
        levels = tuple(tuple(int(v) for v in part.lower().split("x")) for part in text.split(","))
    except ValueError as exc:
        raise UsageError(f"bad --mesh {text!r}; expected e.g. 32x128,64x256,128x512") from exc
    if any(len(lv) != 2 or lv[0] < 2 or lv[1] < 8 for lv in levels):
        raise UsageError(f"bad --mesh {text!r}")
    return levels


def _betas(cfg: dict, default) -> list[float]:
    b = cfg["beta"] if cfg["beta"] is not None else default
    b = [float(v) for v in (b if isinstance(b, (list, tuple)) else [b])]
    if not b:
        raise UsageError("no beta values given")
    if any(v >= 0 for v in b):
        raise UsageError("beta values must be negative")
    return b


def _load_domains(cfg: dict, required: bool = True) -> list[domains.Domain]:
    out = []
    if cfg["corpus"]:
        if cfg["corpus"] not in BUILTIN_CORPORA:
            raise UsageError(f"unknown corpus {cfg['corpus']!r}")
        out += BUILTIN_CORPORA[cfg["corpus"]]()
    for path in cfg["domains"]:
        p = Path(path)
        if not p.exists():
            raise UsageError(f"domain file not found: {path}")
        d = domains.Domain.load(p)
        if not d.name:
            d.name = p.stem
        out.append(d)
    if required and not out:
        raise UsageError("empty corpus: pass domain files or --corpus")
    return out


def _check_resolutions(cfg: dict) -> None:
    if cfg["raster"] < 256:
        raise UsageError("--raster must be at least 256")
    if cfg["grid"] < 32:
        raise UsageError("--grid must be at least 32")


# -- subcommands ----------------------------------------------------------------------------


def cmd_disk(cfg: dict, run: Run) -> None:
    K = float(cfg["K"])
    if cfg["L"] is None:
        raise UsageError("disk needs --L")
    disk = geometry.disk_from_perimeter(K, float(cfg["L"]))
    run.say(f"disk K={K:g} L={disk.L:.12g} R={disk.R:.12g} A={disk.A:.12g}")
    for b in _betas(cfg, [-1.0]):
        gs = radial.solve_ground_state(K, disk.R, b)
        rec = {"kind": "disk", "K": K, "L": disk.L, "R": disk.R, "A": disk.A, "beta": b,
               "lambda": gs.lam, "ode_residual": gs.ode_residual}
        line = f"  beta={b:g} lambda={gs.lam:.12g}"
        ok = gs.ode_residual <= cfg["tol"] * 1e3
        if K == 0:
            ora = radial.euclid_disk_oracle(disk.R, b)
            rec["oracle"] = ora
            rec["oracle_gap"] = abs(gs.lam - ora)
            ok = ok and abs(gs.lam - ora) <= 1e-8 * max(1.0, abs(ora))
            line += f" bessel={ora:.12g}"
        run.say(line)
        run.certify(rec, ok)
        run.csv(f"disk_psi_beta{b:g}.csv", radial.PSI_CSV_HEADER, ["t", "psi", "dpsi"],
                zip(gs.t, gs.psi, gs.dpsi))


def cmd_profiles(cfg: dict, run: Run) -> None:
    _check_resolutions(cfg)
    for d in _load_domains(cfg):
        p = domains.compute_profiles(d, grid_n=cfg["grid"], raster_n=cfg["raster"])
        run.csv(f"profiles_{d.name}.csv", domains.PROFILE_CSV_HEADER, ["t", "A", "L"],
                zip(p.t, p.A, p.L))
        disk = transplant.comparison_disk(d)
        rep = domains.check_profile_domination(p, disk)
        deficit = geometry.isoperimetric_deficit(d.perimeter, d.area, d.K)
        rec = {"kind": "profiles", "domain": d.name, "K": d.K, "perimeter": d.perimeter,
               "area": d.area, "in_radius": p.R_M, "deficit": deficit, **rep.as_dict(),
               "meta": p.meta}
        ok = rep.ok and deficit >= -(2 * d.perimeter * p.length_tolerance + 4 * math.pi * p.tolerance)
        run.certify(rec, ok)
        run.say(f"{d.name}: R_M={p.R_M:.6f} margins inradius={rep.inradius_margin:.3e} "
                f"area={rep.inner_area_margin:.3e} length={rep.length_margin:.3e} "
                f"{'ok' if ok else 'FAIL'}")


def _fem_ladder(d: domains.Domain, levels, betas):
    meshes = []
    for nr, na in levels:
        m = fem2d.mesh_star_shaped(d, nr, na)
        meshes.append((m, fem2d.assemble(m)))
    out = {}
    for b in betas:
        out[b] = fem2d.solve_ladder(d, b, ladder=levels, meshes=meshes)
    return meshes, out


def cmd_verify_main(cfg: dict, run: Run) -> None:
    _check_resolutions(cfg)
    doms = _load_domains(cfg)
    betas = _betas(cfg, [-0.5, -1.0, -2.0])
    levels = _parse_mesh(cfg["mesh"]) if cfg["mesh"] else None
    rng = np.random.default_rng(cfg["seed"])
    rows = []
    for d in doms:
        p = domains.compute_profiles(d, grid_n=cfg["grid"], raster_n=cfg["raster"])
        fem = None
        if d.kind == "planar" and levels is not None and len(levels) >= 3:
            _, fem = _fem_ladder(d, levels, betas)
        disk = transplant.comparison_disk(d)
        for b in betas:
            fe = (fem[b][1], fem[b][2]) if fem else None
            c = transplant.theorem_upper_bound(d, b, profiles=p, fem=fe)
            run.certify({"kind": "upper_bound", **c.to_json()}, c.ok)
            rows.append((d.name, b, c.lambda_disk, c.rayleigh,
                         c.lambda_fem if c.lambda_fem is not None else float("nan"),
                         c.margins["disk"], c.tolerances["total"]))
            run.say(f"{d.name} beta={b:g}: lambda_disk={c.lambda_disk:.8f} "
                    f"rayleigh={c.rayleigh:.8f}"
                    + (f" fem={c.lambda_fem:.8f}" if c.lambda_fem is not None else "")
                    + f" {'ok' if c.ok else 'FAIL'}")
        for _ in range(cfg["samples"]):
            psi = transplant.random_cosine_profile(rng, disk.R)
            m = transplant.prop_main_check(p, disk, psi)
            run.certify({"kind": "functional", "domain": d.name, "norm": m.norm,
                         "gradient": m.gradient, "boundary": m.boundary,
                         "norm_tolerance": m.norm_tolerance,
                         "gradient_tolerance": m.gradient_tolerance}, m.ok)
    run.csv("verify_main.csv", "# robiniso verify-main v1",
            ["domain", "beta", "lambda_disk", "rayleigh", "lambda_fem", "margin", "tolerance"], rows)


def cmd_fem(cfg: dict, run: Run) -> None:
    levels = _parse_mesh(cfg["mesh"])
    betas = _betas(cfg, [-1.0])
    rows = []
    for d in _load_domains(cfg):
        if d.kind != "planar":
            raise UsageError(f"fem needs planar domains; {d.name!r} is spherical")
        meshes, res = _fem_ladder(d, levels, betas)
        finest, _ = meshes[-1]
        finest.save(run.out / f"mesh_{d.name}.txt")
        for b in betas:
            results, lam, err = res[b]
            for (nr, na), r in zip(levels, results):
                rows.append((d.name, b, nr, na, r.h_max, r.lam, r.iterations))
            results[-1].to_csv(run.out / f"eigvec_{d.name}_beta{b:g}.csv", finest)
            disk = geometry.disk_from_perimeter(0.0, d.perimeter)
            lam_b = radial.euclid_disk_oracle(disk.R, b)
            rec = {"kind": "fem", "domain": d.name, "beta": b, "lambda_extrap": lam,
                   "error_estimate": err, "lambda_disk": lam_b, "margin": lam_b - lam}
            run.certify(rec, lam_b - lam >= -(err + cfg["tol"]))
            run.say(f"{d.name} beta={b:g}: lambda={lam:.10f} +- {err:.2e} (disk {lam_b:.10f})")
    run.csv("fem.csv", "# robiniso fem ladder v1",
            ["domain", "beta", "n_radial", "n_angular", "h_max", "lambda", "iterations"], rows)


def cmd_cone(cfg: dict, run: Run) -> None:
    _check_resolutions(cfg)
    betas = _betas(cfg, [-1.0])
    if cfg["L"] is not None:
        L = float(cfg["L"])
        for b in betas:
            lam = cone.circular_cone_eigenvalue(L, b)
            self_q = cone.disk_slice_integrals(L).quotient * b * b
            ok = abs(self_q - lam) <= 1e-5 * max(1.0, abs(lam))
            run.certify({"kind": "circular_cone", "L": L, "beta": b, "alpha": cone.half_aperture(L),
                         "eigenvalue": lam, "threshold": cone.essential_threshold(b),
                         "transplant_self": self_q}, ok)
            run.say(f"circular cone L={L:.8g} beta={b:g}: lambda={lam:.12g} "
                    f"threshold={cone.essential_threshold(b):g}")
    doms = _load_domains(cfg, required=cfg["L"] is None)
    rows = []
    for d in doms:
        cs = cone.ConeCrossSection(d, domains.compute_profiles(d, grid_n=cfg["grid"],
                                                                raster_n=cfg["raster"]))
        for b in betas:
            c = cone.cone_rayleigh_upper_bound(cs, b)
            run.certify({"kind": "cone", **c.to_json()}, c.ok)
            rows.append((d.name, b, c.L, c.A, c.quotient, c.circular_value, c.margin))
            run.say(f"{d.name} beta={b:g}: bound={c.quotient:.8f} circular={c.circular_value:.8f}"
                    f" {'ok' if c.ok else 'FAIL'}")
    if rows:
        run.csv("cone.csv", "# robiniso cone bounds v1",
                ["domain", "beta", "L", "A", "quotient", "circular", "margin"], rows)


def cmd_dtn(cfg: dict, run: Run) -> None:
    lams = cfg["lam"] if cfg["lam"] is not None else [-0.25, -1.0, -4.0]
    lams = [float(v) for v in (lams if isinstance(lams, (list, tuple)) else [lams])]
    if any(v >= 0 for v in lams):
        raise UsageError("--lam values must be negative")
    if cfg["L"] is not None:
        K = float(cfg["K"])
        disk = geometry.disk_from_perimeter(K, float(cfg["L"]))
        curve = spectral.SpectralCurve.radial(K, disk.R)
        sig = spectral.dtn_sweep_csv(run.out / "dtn_disk.csv", curve, lams)
        for lam, s in zip(lams, sig):
            back = curve(-s)
            rec = {"kind": "dtn_disk", "K": K, "R": disk.R, "lambda": lam, "sigma": s,
                   "inversion_gap": abs(back - lam)}
            ok = abs(back - lam) <= 1e-6
            if K == 0:
                rec["oracle"] = spectral.disk_dtn_oracle(disk.R, lam)
                ok = ok and abs(rec["oracle"] - s) <= 1e-6
            run.certify(rec, ok)
            run.say(f"disk K={K:g} R={disk.R:.8g} lambda={lam:g}: sigma={s:.12g}")
    doms = _load_domains(cfg, required=cfg["L"] is None)
    levels = _parse_mesh(cfg["mesh"])[:2] if cfg["mesh"] else spectral.DTN_LADDER
    for d in doms:
        for lam in lams:
            r = spectral.dtn_isoperimetric_check(d, lam, ladder=levels)
            run.certify({"kind": "dtn_domain", "domain": d.name, "lambda": lam,
                         "sigma_domain": r.sigma_domain, "sigma_disk": r.sigma_disk,
                         "margin": r.margin, "fem_error": r.fem_error}, r.ok)
            run.say(f"{d.name} lambda={lam:g}: sigma={r.sigma_domain:.8f} "
                    f"disk={r.sigma_disk:.8f} {'ok' if r.ok else 'FAIL'}")


def cmd_weak(cfg: dict, run: Run) -> None:
    h = float(cfg["h"])
    cases = [("disk", spectral.SpectralCurve.radial(0.0, 1.0), None),
             ("hemisphere", spectral.SpectralCurve.radial(1.0, math.pi / 2), None)]
    levels = _parse_mesh(cfg["mesh"]) if cfg["mesh"] else ((32, 128),)
    for d in _load_domains(cfg, required=False):
        if d.kind != "planar":
            raise UsageError("weak-coupling FEM needs planar domains")
        nr, na = levels[0]
        mesh = fem2d.mesh_star_shaped(d, nr, na)
        cases.append((d.name, spectral.SpectralCurve.fem(mesh), spectral.weak_slope(d)))
    rows = []
    for name, curve, exact in cases:
        w = spectral.weak_slope_check(curve, h, exact=exact)
        rows.append((name, w.h, w.fd_slope, w.exact, w.rel_error))
        run.certify({"kind": "weak_coupling", "case": name, **w.__dict__}, w.rel_error <= 0.01)
        run.say(f"{name}: slope={w.fd_slope:.8f} exact={w.exact:.8f} rel={w.rel_error:.2e}")
    run.csv("weak_coupling.csv", "# robiniso weak coupling v1",
            ["case", "h", "fd_slope", "exact", "rel_error"], rows)


def cmd_counterexample(cfg: dict, run: Run) -> None:
    L = float(cfg["L"]) if cfg["L"] is not None else math.pi
    b = _betas(cfg, [-0.01])
    for beta in b:
        rep = spectral.counterexample_caps(L, beta)
        run.certify({"kind": "counterexample", **rep.as_dict()}, rep.ok)
        run.say(f"L={L:.8g} beta={beta:g}: lambda(R={rep.R_big:.6f})={rep.lam_big:.10f} > "
                f"lambda(R={rep.R_small:.6f})={rep.lam_small:.10f} gap={rep.gap:.3e}")


def cmd_export_corpus(cfg: dict, run: Run) -> None:
    for d in _load_domains(cfg):
        d.save(run.out / f"{d.name}.json")
        run.say(f"wrote {d.name}.json")


COMMANDS = {
    "disk": cmd_disk,
    "profiles": cmd_profiles,
    "verify-main": cmd_verify_main,
    "fem": cmd_fem,
    "cone": cmd_cone,
    "dtn": cmd_dtn,
    "weak-coupling": cmd_weak,
    "counterexample": cmd_counterexample,
    "export-corpus": cmd_export_corpus,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="robiniso",
                                 description="Robin eigenvalue isoperimetry experiments")
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("domains", nargs="*", help="domain JSON files")
    ap.add_argument("--config", help="JSON file with default settings")
    ap.add_argument("--out", help="output directory")
    ap.add_argument("--beta", type=float, nargs="+", help="Robin parameters (negative)")
    ap.add_argument("--K", type=float, help="curvature of the model surface (0 or 1)")
    ap.add_argument("--L", type=float, help="perimeter of the disk or cone cross-section")
    ap.add_argument("--lam", type=float, nargs="+", help="energies for the DtN subcommand")
    ap.add_argument("--tol", type=float, help="certificate tolerance")
    ap.add_argument("--seed", type=int, help="seed for randomized test profiles")
    ap.add_argument("--samples", type=int, help="random test profiles per domain")
    ap.add_argument("--raster", type=int, help="raster cells along the longer side")
    ap.add_argument("--grid", type=int, help="profile grid intervals")
    ap.add_argument("--mesh", help="FEM ladder, e.g. 32x128,64x256,128x512")
    ap.add_argument("--corpus", choices=sorted(BUILTIN_CORPORA), help="built-in domain corpus")
    ap.add_argument("--h", type=float, help="step for the weak-coupling difference")
    return ap


def resolve_config(args: argparse.Namespace) -> dict:
    cfg = dict(DEFAULTS)
    if args.config:
        path = Path(args.config)
        if not path.exists():
            raise UsageError(f"config file not found: {path}")
        try:
            loaded = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise UsageError(f"cannot parse config {path}: {exc}") from exc
        unknown = set(loaded) - set(DEFAULTS) - {"command"}
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(loaded)
    for key in DEFAULTS:
        v = getattr(args, key, None)
        if key == "domains":
            if v:
                cfg["domains"] = list(v)
        elif v is not None:
            cfg[key] = v
    return cfg


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        cfg = resolve_config(args)
        run = Run(Path(cfg["out"]))
        COMMANDS[args.command](cfg, run)
    except UsageError as exc:
        ap.print_usage(sys.stderr)
        print(f"robiniso: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, RuntimeError) as exc:
        print(f"robiniso {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    return run.finish()


if __name__ == "__main__":
    sys.exit(main())
