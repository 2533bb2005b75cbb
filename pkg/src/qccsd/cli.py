"""Command-line front end: single points, bond scans, FCI, gate counts, FCIDUMP generation.

Exit codes: 0 success, 1 configuration or input error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from qccsd.ansatz import build_excitation_list, gate_counts
from qccsd.exact import (
    EigensolverError,
    SectorBasis,
    SectorLeakageError,
    hf_ground_overlap,
    sector_ground_state,
    sector_hamiltonian,
)
from qccsd.fermion import ActiveSpace, MolecularIntegrals, active_problem
from qccsd.integrals import (
    FcidumpError,
    Geometry,
    ScfError,
    geometry_integrals,
    hydrogen_chain_integrals,
    read_fcidump,
    write_fcidump,
)
from qccsd.pauli import PauliSum
from qccsd.sim import dump_state
from qccsd.vqe import QCCSD, UCCSD, VqeError, VqeOptions, VqeProblem, VqeResult, minimize

log = logging.getLogger("qccsd")

CSV_COLUMNS = (
    "bond_length",
    "e_hf",
    "e_fci",
    "e_qccsd",
    "e_uccsd",
    "err_qccsd",
    "err_uccsd",
    "overlap_hf",
    "params",
    "gates",
    "iters_q",
    "iters_u",
    "converged_q",
    "converged_u",
    "status",
)
STATUS_OK, STATUS_UNCONVERGED, STATUS_SCF_FAILED = "ok", "vqe_unconverged", "scf_failed"
CHAINS = {"h2": 2, "h4": 4, "h6": 6}
ANSATZ_CHOICES = (QCCSD, UCCSD, "both")


class ConfigError(ValueError):
    """Bad flags, config-file entries or input files."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


@dataclass
class ScanConfig:
    """Everything a scan or single-point run needs. Bond lengths are in Angstrom."""

    system: str | None = None  # h2 / h4 / h6
    fcidump: Path | None = None
    manifest: Path | None = None
    bond_start: float | None = None
    bond_stop: float | None = None
    bond_step: float = 0.25
    ansatz: str = "both"
    frozen: int = 0
    removed: int = 0
    options: VqeOptions = field(default_factory=VqeOptions)
    seed_params: np.ndarray | None = None
    warm_start: bool = False
    jobs: int = 1
    out_csv: Path | None = None
    out_svg: Path | None = None

    @property
    def active(self) -> ActiveSpace | None:
        if self.frozen == 0 and self.removed == 0:
            return None
        return ActiveSpace(self.frozen, self.removed)

    @property
    def ansatze(self) -> tuple[str, ...]:
        return (QCCSD, UCCSD) if self.ansatz == "both" else (self.ansatz,)

    def bond_lengths(self) -> list[float]:
        """Inclusive grid; ``start == stop`` gives a single point."""
        start, stop, step = self.bond_start, self.bond_stop, self.bond_step
        if stop is None:
            stop = start
        n = int(math.floor((stop - start) / step + 1e-9)) + 1
        return [round(start + k * step, 10) for k in range(n)]

    def validate(self) -> None:
        sources = [self.system is not None, self.fcidump is not None, self.manifest is not None]
        if sum(sources) != 1:
            raise ConfigError("give exactly one of --system, --fcidump, --manifest")
        if self.system is not None:
            if self.system not in CHAINS:
                raise ConfigError(f"--system must be one of {sorted(CHAINS)}, got {self.system!r}")
            if self.bond_start is None:
                raise ConfigError("--system needs --bond-start (or --bond-length)")
            if self.bond_start <= 0:
                raise ConfigError("bond lengths must be positive")
            if self.bond_stop is not None and self.bond_stop < self.bond_start:
                raise ConfigError("--bond-stop must not be below --bond-start")
            if not self.bond_step > 0:
                raise ConfigError("--bond-step must be positive")
            n = CHAINS[self.system]
            try:
                ActiveSpace(self.frozen, self.removed).validate(n, n // 2, n // 2)
            except ValueError as exc:
                raise ConfigError(str(exc)) from None
        if self.ansatz not in ANSATZ_CHOICES:
            raise ConfigError(f"--ansatz must be one of {ANSATZ_CHOICES}")
        if self.jobs < 1:
            raise ConfigError("--jobs must be at least 1")
        if self.warm_start and self.jobs > 1:
            raise ConfigError("--warm-start chains points sequentially; use --jobs 1")
        if self.options.max_iters < 1 or not self.options.ftol > 0:
            raise ConfigError("--max-iters must be >= 1 and --ftol > 0")


@dataclass
class Point:
    """One geometry: either a chain spacing or pre-loaded integrals."""

    bond_length: float | None
    n_atoms: int | None = None
    integrals: MolecularIntegrals | None = None

    def load(self) -> MolecularIntegrals:
        if self.integrals is not None:
            return self.integrals
        return hydrogen_chain_integrals(self.n_atoms, self.bond_length)


@dataclass
class PointResult:
    row: dict
    results: dict[str, VqeResult] = field(default_factory=dict)
    problems: dict[str, VqeProblem] = field(default_factory=dict)
    hamiltonian: PauliSum | None = None


def _fmt(v, spec: str) -> str:
    return "" if v is None else format(v, spec)


def _empty_row(bond_length) -> dict:
    row = {c: "" for c in CSV_COLUMNS}
    row["bond_length"] = _fmt(bond_length, ".6f")
    return row


def _check_active(mi: MolecularIntegrals, active: ActiveSpace | None) -> None:
    if active is not None:
        try:
            active.validate(mi.n_spatial, mi.n_alpha, mi.n_beta)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None


def evaluate_point(
    point: Point,
    ansatze: Sequence[str],
    active: ActiveSpace | None,
    options: VqeOptions,
    theta0: np.ndarray | None = None,
) -> PointResult:
    """Integrals, Hamiltonian, FCI and the requested VQE runs for one geometry."""
    try:
        mi = point.load()
    except ScfError as exc:
        log.warning("bond length %s: %s", point.bond_length, exc)
        row = _empty_row(point.bond_length)
        row["status"] = STATUS_SCF_FAILED
        return PointResult(row)
    act, ham, hf = active_problem(mi, active)
    sector = SectorBasis(act.n_spatial, act.n_alpha, act.n_beta)
    ground = sector_ground_state(ham, sector)
    ex = build_excitation_list(act.n_spatial, act.n_alpha, act.n_beta)
    counts = gate_counts(ex)

    row = _empty_row(point.bond_length)
    e_fci = ground.energy
    row["e_fci"] = _fmt(e_fci, ".12f")
    row["overlap_hf"] = _fmt(hf_ground_overlap(ground, hf), ".10f")
    row["params"] = str(counts["params"])
    row["gates"] = str(counts["elementary_gates"])
    out = PointResult(row, hamiltonian=ham)
    i_hf = sector.index_of(hf)
    row["e_hf"] = _fmt(float(np.real(sector_hamiltonian(ham, sector)[i_hf, i_hf])), ".12f")
    converged = True
    for name in ansatze:
        problem = VqeProblem(ham, hf, ex, name)
        res = minimize(problem, theta0, options)
        out.problems[name], out.results[name] = problem, res
        tag = "q" if name == QCCSD else "u"
        row[f"e_{name}"] = _fmt(res.energy, ".12f")
        row[f"err_{name}"] = _fmt(res.energy - e_fci, ".6e")
        row[f"iters_{tag}"] = str(res.iterations)
        row[f"converged_{tag}"] = "true" if res.converged else "false"
        converged &= res.converged
    row["status"] = STATUS_OK if converged else STATUS_UNCONVERGED
    log.info(
        "point %s: E_FCI=%.10f %s",
        point.bond_length,
        e_fci,
        " ".join(f"err_{k}={r.energy - e_fci:.2e}" for k, r in out.results.items()),
    )
    return out


def _job(args):
    return evaluate_point(*args).row


def run_points(cfg: ScanConfig, points: Sequence[Point]) -> list[dict]:
    """Evaluate every point; rows come back in input order whatever the completion order."""
    active, ansatze, opts = cfg.active, cfg.ansatze, cfg.options
    if cfg.jobs > 1 and len(points) > 1:
        jobs = [(p, ansatze, active, opts, cfg.seed_params) for p in points]
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            return list(pool.map(_job, jobs))
    rows = []
    theta0 = cfg.seed_params
    for p in points:
        res = evaluate_point(p, ansatze, active, opts, theta0)
        rows.append(res.row)
        if cfg.warm_start and res.results:
            theta0 = next(iter(res.results.values())).parameters
    return rows


def write_csv(rows: Sequence[dict], stream) -> None:
    writer = csv.DictWriter(stream, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)


def render_svg(rows: Sequence[dict], title: str = "") -> str:
    """Semilog plot of |E_VQE - E_FCI| against bond length."""
    width, height = 640, 420
    left, right, top, bottom = 80, 20, 40, 60
    floor = 1e-12
    series = {}
    for name, color in ((QCCSD, "#1f77b4"), (UCCSD, "#d62728")):
        pts = [
            (float(r["bond_length"]), max(abs(float(r[f"err_{name}"])), floor))
            for r in rows
            if r["bond_length"] and r[f"err_{name}"]
        ]
        if pts:
            series[name] = (pts, color)
    xs = [x for pts, _ in series.values() for x, _ in pts] or [0.0, 1.0]
    ys = [y for pts, _ in series.values() for _, y in pts] or [1e-6, 1e-2]
    x0, x1 = min(xs), max(xs)
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    d0, d1 = math.floor(math.log10(min(ys))), math.ceil(math.log10(max(ys)))
    if d1 == d0:
        d1 += 1
    pw, ph = width - left - right, height - top - bottom

    def px(x):
        return left + (x - x0) / (x1 - x0) * pw

    def py(y):
        return top + (d1 - math.log10(y)) / (d1 - d0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for d in range(d0, d1 + 1):
        y = py(10.0**d)
        out.append(f'<line x1="{left}" y1="{y:.2f}" x2="{left + pw}" y2="{y:.2f}" stroke="#ddd"/>')
        out.append(f'<text x="{left - 6}" y="{y + 4:.2f}" text-anchor="end">1e{d}</text>')
    for k in range(6):
        x = x0 + k * (x1 - x0) / 5
        out.append(f'<text x="{px(x):.2f}" y="{top + ph + 18}" text-anchor="middle">{x:.2f}</text>')
    out.append(
        f'<text x="{left + pw / 2}" y="{height - 15}" text-anchor="middle">bond length (Angstrom)</text>'
    )
    out.append(
        f'<text x="18" y="{top + ph / 2}" text-anchor="middle" '
        f'transform="rotate(-90 18 {top + ph / 2})">|E - E_FCI| (Hartree)</text>'
    )
    if title:
        out.append(f'<text x="{left + pw / 2}" y="24" text-anchor="middle">{title}</text>')
    for k, (name, (pts, color)) in enumerate(series.items()):
        coords = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in pts)
        out.append(f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="2"/>')
        for x, y in pts:
            out.append(f'<circle cx="{px(x):.2f}" cy="{py(y):.2f}" r="3" fill="{color}"/>')
        ly = top + 16 + 16 * k
        out.append(f'<line x1="{left + pw - 110}" y1="{ly}" x2="{left + pw - 90}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{left + pw - 84}" y="{ly + 4}">{name.upper()}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


# argument handling


def _add_common(p: argparse.ArgumentParser, scan: bool) -> None:
    src = p.add_argument_group("system")
    src.add_argument("--system", help="hydrogen chain: h2, h4 or h6")
    src.add_argument("--fcidump", type=Path, help="MO integrals in FCIDUMP format")
    if scan:
        src.add_argument("--manifest", type=Path, help="CSV of bond_length,path to FCIDUMP files")
        src.add_argument("--bond-start", type=float, help="first spacing (Angstrom)")
        src.add_argument("--bond-stop", type=float, help="last spacing, inclusive (Angstrom)")
        src.add_argument("--bond-step", type=float, help="spacing increment (Angstrom, default 0.25)")
    src.add_argument("--bond-length", type=float, help="single spacing (Angstrom)")
    src.add_argument("--frozen", type=int, help="frozen doubly occupied spatial orbitals")
    src.add_argument("--removed", type=int, help="discarded virtual spatial orbitals")
    p.add_argument("--config", type=Path, help="key=value file with [section] headers; flags win")
    p.add_argument("-v", "--verbose", action="count", default=0)


def _add_vqe(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("optimizer")
    g.add_argument("--ansatz", choices=ANSATZ_CHOICES, help="default: both")
    g.add_argument("--max-iters", type=int, help="accepted-step limit (default 500)")
    g.add_argument("--ftol", type=float, help="energy-change threshold in Hartree (default 1e-6)")
    g.add_argument("--seed-params", type=Path, help="file of initial parameters (default all zero)")
    g.add_argument("--out-csv", type=Path, help="write result rows here (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qccsd", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="VQE and FCI at one geometry")
    _add_common(run, scan=False)
    _add_vqe(run)
    run.add_argument("--dump-hamiltonian", type=Path, help="write the qubit Hamiltonian as text")
    run.add_argument("--dump-state", type=Path, help="write the optimized state (first ansatz run)")
    run.add_argument("--trace", type=Path, help="optimizer trace CSV (ansatz name appended for 'both')")

    scan = sub.add_parser("scan", help="bond-length scan with error curves")
    _add_common(scan, scan=True)
    _add_vqe(scan)
    scan.add_argument("--out-svg", type=Path, help="semilog error plot")
    scan.add_argument("--jobs", type=int, help="parallel worker processes (default 1)")
    scan.add_argument("--warm-start", action="store_true", default=None,
                      help="start each point from the previous optimum")

    exact = sub.add_parser("exact", help="sector FCI ground state")
    _add_common(exact, scan=False)
    exact.add_argument("--dump-hamiltonian", type=Path, help="write the qubit Hamiltonian as text")

    counts = sub.add_parser("counts", help="parameter and gate counts")
    _add_common(counts, scan=False)

    gen = sub.add_parser("gen-fcidump", help="hydrogen-only XYZ to MO-basis FCIDUMP")
    gen.add_argument("geometry", type=Path, help="XYZ file in Angstrom")
    gen.add_argument("output", type=Path, help="FCIDUMP path to write")
    gen.add_argument("-v", "--verbose", action="count", default=0)
    return parser


_INT_KEYS = {"frozen", "removed", "max_iters", "jobs"}
_FLOAT_KEYS = {"bond_start", "bond_stop", "bond_step", "bond_length", "ftol"}
_PATH_KEYS = {"fcidump", "manifest", "out_csv", "out_svg", "seed_params", "dump_hamiltonian", "dump_state", "trace"}
_BOOL_KEYS = {"warm_start"}


def read_config(path: Path) -> dict:
    """Flatten every section of a key=value file; keys use flag spellings (dashes or underscores)."""
    cp = configparser.ConfigParser(interpolation=None)
    try:
        with open(path) as fh:
            cp.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    out = {}
    for section in cp.sections():
        for name, raw in cp.items(section):
            key = name.replace("-", "_")
            try:
                if key in _INT_KEYS:
                    out[key] = int(raw)
                elif key in _FLOAT_KEYS:
                    out[key] = float(raw)
                elif key in _PATH_KEYS:
                    out[key] = Path(raw)
                elif key in _BOOL_KEYS:
                    out[key] = cp.getboolean(section, name)
                elif key in {"system", "ansatz"}:
                    out[key] = raw.strip()
                else:
                    raise ConfigError(f"{path}: unknown key {key!r} in [{section}]")
            except ValueError as exc:
                raise ConfigError(f"{path}: bad value for {key}: {exc}") from None
    return out


def _merged(args: argparse.Namespace) -> dict:
    values = read_config(args.config) if getattr(args, "config", None) else {}
    for key, val in vars(args).items():
        if val is not None and key not in {"config", "command", "verbose"}:
            values[key] = val
    return values


def read_params(path: Path) -> np.ndarray:
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read parameters: {exc}") from None
    try:
        return np.array([float(t) for t in text.replace(",", " ").split()], dtype=float)
    except ValueError:
        raise ConfigError(f"{path}: parameters must be whitespace- or comma-separated numbers") from None


def config_from_args(args: argparse.Namespace) -> ScanConfig:
    v = _merged(args)
    if "system" in v:
        v["system"] = v["system"].lower()
    start = v.get("bond_start", v.get("bond_length"))
    stop = v.get("bond_stop")
    if "bond_length" in v and "bond_start" not in v and stop is None:
        stop = start
    opts = VqeOptions()
    if "max_iters" in v:
        opts.max_iters = v["max_iters"]
    if "ftol" in v:
        opts.ftol = v["ftol"]
    cfg = ScanConfig(
        system=v.get("system"),
        fcidump=v.get("fcidump"),
        manifest=v.get("manifest"),
        bond_start=start,
        bond_stop=stop,
        bond_step=v.get("bond_step", 0.25),
        ansatz=v.get("ansatz", "both"),
        frozen=v.get("frozen", 0),
        removed=v.get("removed", 0),
        options=opts,
        seed_params=read_params(v["seed_params"]) if "seed_params" in v else None,
        warm_start=bool(v.get("warm_start", False)),
        jobs=v.get("jobs", 1),
        out_csv=v.get("out_csv"),
        out_svg=v.get("out_svg"),
    )
    cfg.validate()
    return cfg


def _load_fcidump(path: Path) -> MolecularIntegrals:
    try:
        return read_fcidump(path)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    except FcidumpError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def read_manifest(path: Path) -> list[tuple[float, Path]]:
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read manifest: {exc}") from None
    entries = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#") or line.replace(" ", "").lower() == "bond_length,path":
            continue
        parts = [s.strip() for s in line.split(",", 1)]
        try:
            bond = float(parts[0])
            target = Path(parts[1])
        except (ValueError, IndexError):
            raise ConfigError(f"{path} line {lineno}: expected 'bond_length,path'") from None
        entries.append((bond, target if target.is_absolute() else path.parent / target))
    if not entries:
        raise ConfigError(f"{path}: manifest lists no geometries")
    return entries


def build_points(cfg: ScanConfig) -> list[Point]:
    if cfg.system is not None:
        return [Point(r, n_atoms=CHAINS[cfg.system]) for r in cfg.bond_lengths()]
    if cfg.fcidump is not None:
        mi = _load_fcidump(cfg.fcidump)
        _check_active(mi, cfg.active)
        return [Point(None, integrals=mi)]
    points = []
    for bond, path in read_manifest(cfg.manifest):
        mi = _load_fcidump(path)
        _check_active(mi, cfg.active)
        points.append(Point(bond, integrals=mi))
    return points


def _check_seed(cfg: ScanConfig, points: Sequence[Point]) -> None:
    if cfg.seed_params is None:
        return
    for p in points:
        if p.integrals is None:
            n = CHAINS[cfg.system]
            n_spatial, n_alpha = n - cfg.frozen - cfg.removed, n // 2 - cfg.frozen
            n_beta = n_alpha
        else:
            n_spatial = p.integrals.n_spatial - cfg.frozen - cfg.removed
            n_alpha, n_beta = p.integrals.n_alpha - cfg.frozen, p.integrals.n_beta - cfg.frozen
        need = build_excitation_list(n_spatial, n_alpha, n_beta).n_params
        if cfg.seed_params.size != need:
            raise ConfigError(f"--seed-params has {cfg.seed_params.size} values, the ansatz needs {need}")
        if np.any(np.abs(cfg.seed_params) > math.pi):
            raise ConfigError("--seed-params values must lie in [-pi, pi]")


def _emit_rows(rows, path: Path | None) -> None:
    if path is None:
        write_csv(rows, sys.stdout)
    else:
        with open(path, "w", newline="") as fh:
            write_csv(rows, fh)


def cmd_run(args) -> int:
    cfg = config_from_args(args)
    if cfg.manifest is not None:
        raise ConfigError("run takes a single geometry; use scan for manifests")
    points = build_points(cfg)
    if len(points) != 1:
        raise ConfigError("run takes a single bond length; use scan for ranges")
    _check_seed(cfg, points)
    res = evaluate_point(points[0], cfg.ansatze, cfg.active, cfg.options, cfg.seed_params)
    if res.row["status"] == STATUS_SCF_FAILED:
        _emit_rows([res.row], cfg.out_csv)
        return 2
    if args.dump_hamiltonian:
        with open(args.dump_hamiltonian, "w") as fh:
            res.hamiltonian.dump(fh)
    if args.dump_state and res.results:
        name, r = next(iter(res.results.items()))
        with open(args.dump_state, "w") as fh:
            dump_state(res.problems[name].state(r.parameters), fh)
    if args.trace:
        for name, r in res.results.items():
            path = args.trace
            if len(res.results) > 1:
                path = path.with_name(f"{path.stem}_{name}{path.suffix}")
            with open(path, "w") as fh:
                r.write_trace(fh)
    _emit_rows([res.row], cfg.out_csv)
    return 0


def cmd_scan(args) -> int:
    cfg = config_from_args(args)
    points = build_points(cfg)
    _check_seed(cfg, points)
    rows = run_points(cfg, points)
    _emit_rows(rows, cfg.out_csv)
    if cfg.out_svg is not None:
        title = f"{cfg.system.upper()} / STO-3G" if cfg.system else ""
        cfg.out_svg.write_text(render_svg(rows, title))
    if all(r["status"] == STATUS_SCF_FAILED for r in rows):
        return 2
    return 0


def _single_problem(args):
    cfg = replace(config_from_args(args), ansatz="both")
    points = build_points(cfg)
    if len(points) != 1:
        raise ConfigError(f"{args.command} takes a single geometry")
    mi = points[0].load()
    return cfg, mi


def cmd_exact(args) -> int:
    cfg, mi = _single_problem(args)
    act, ham, hf = active_problem(mi, cfg.active)
    sector = SectorBasis(act.n_spatial, act.n_alpha, act.n_beta)
    ground = sector_ground_state(ham, sector)
    if args.dump_hamiltonian:
        with open(args.dump_hamiltonian, "w") as fh:
            ham.dump(fh)
    print("energy_hartree,overlap_hf,sector_dim")
    print(f"{ground.energy:.12f},{hf_ground_overlap(ground, hf):.10f},{sector.dim}")
    return 0


def cmd_counts(args) -> int:
    cfg, mi = _single_problem(args)
    act = active_problem(mi, cfg.active)[0]
    counts = gate_counts(build_excitation_list(act.n_spatial, act.n_alpha, act.n_beta))
    print(",".join(counts))
    print(",".join(str(v) for v in counts.values()))
    return 0


def cmd_gen_fcidump(args) -> int:
    try:
        geom = Geometry.from_xyz(args.geometry.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read {args.geometry}: {exc}") from None
    except ValueError as exc:
        raise ConfigError(f"{args.geometry}: {exc}") from None
    bad = sorted({s for s, _ in geom.atoms if s != "H"})
    if bad:
        raise ConfigError(f"built-in engine handles hydrogen only; found {', '.join(bad)}")
    try:
        mi = geometry_integrals(geom)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    buf = io.StringIO()
    write_fcidump(mi, buf)
    args.output.write_text(buf.getvalue())
    log.info("wrote %s (NORB=%d, E_RHF=%.10f)", args.output, mi.n_spatial, mi.scf_energy)
    return 0


COMMANDS = {
    "run": cmd_run,
    "scan": cmd_scan,
    "exact": cmd_exact,
    "counts": cmd_counts,
    "gen-fcidump": cmd_gen_fcidump,
}


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"qccsd: error: {exc}", file=sys.stderr)
        return 1
    except (ScfError, VqeError, EigensolverError, SectorLeakageError) as exc:
        print(f"qccsd: failed: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
