"""Command-line runner for the benchmark presets.

Every run writes into one output directory:

    config.ini          resolved configuration minus the output path
    diagnostics.csv     one row per step, step 0 included
    spectrum.csv        shell spectra at each snapshot time
    snap_NNN_<field>.tigr   raster snapshots
    manifest.txt        run status plus the sha256 of every file above

Exit codes: 0 finished, 1 --verify mismatch, 2 usage or config error,
3 run aborted (partial outputs are still listed in the manifest).
"""

from __future__ import annotations

import argparse
import configparser
import hashlib
import logging
import sys
import tempfile
import time
import warnings
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from . import __version__
from . import diagnostics, experiments
from .elliptic import ConvergenceWarning, RegParams, SolverError
from .eos import EosParams
from .grid import Grid, make_grid, write_raster
from .models import MODEL_KINDS, Model, SimulationAbort, pressure
from .stepper import StepControl, StepRecord, run

log = logging.getLogger("tigre")

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE, EXIT_ABORT = 0, 1, 2, 3

DIAG_COLUMNS = (
    "step", "t", "dt", "mass", "momentum_x", "momentum_y",
    "energy", "entropy", "tv_rho", "sweeps", "residual",
)
SPECTRUM_COLUMNS = ("t", "b", "P_pressure", "E_kinetic")

PRESETS = {
    "sod": dict(nx=500, ny=1, t_end=0.5, snapshots=(0.0, 0.125, 0.25, 0.5)),
    "acoustic": dict(nx=256, ny=256, t_end=1.0, snapshots=(0.0, 1.0)),
    "kh": dict(nx=256, ny=256, t_end=4.0, snapshots=(0.0, 4.0)),
    "custom": dict(nx=256, ny=1, t_end=1.0, snapshots=(0.0, 1.0)),
}


class ConfigError(ValueError):
    pass


def fmt(x) -> str:
    return "%.17g" % x


@dataclass
class ExperimentConfig:
    preset: str = "sod"
    model: str = "tigre"
    nx: int | None = None
    ny: int | None = None
    t_end: float | None = None
    cfl: float = 0.4
    alpha_coef: float = 1.0
    beta_coef: float = 1.0
    beta: float | None = None  # absolute beta, overrides beta_coef
    tol: float = 1e-10
    max_sweeps: int = 200
    out: str = "run"
    snapshots: tuple[float, ...] | None = None
    fidelity_verbatim_stencils: bool = False
    gamma: float = 1.4
    c_v: float = 2.5
    kappa: float = 1.0
    scheme: str = "lw"
    warm_start: str = "extrapolate"
    eps1: float = experiments.ACOUSTIC["eps1"]
    wave_k: int = 1  # custom preset: plane-wave mode number
    amplitude: float = 1e-4

    def __post_init__(self):
        if self.preset not in PRESETS:
            raise ConfigError(f"unknown preset {self.preset!r}; choose from {', '.join(PRESETS)}")
        if self.model not in MODEL_KINDS:
            raise ConfigError(f"unknown model {self.model!r}; choose from {', '.join(MODEL_KINDS)}")
        defaults = PRESETS[self.preset]
        for key in ("nx", "ny", "t_end", "snapshots"):
            if getattr(self, key) is None:
                setattr(self, key, defaults[key])
        if self.preset == "sod" and self.ny != 1:
            raise ConfigError("the sod preset is one-dimensional (ny = 1)")
        if self.preset in ("acoustic", "kh") and self.ny < 2:
            raise ConfigError(f"the {self.preset} preset is two-dimensional")
        if self.alpha_coef < 0 or self.beta_coef < 0 or (self.beta is not None and self.beta < 0):
            raise ConfigError("alpha and beta must be non-negative")
        if self.t_end <= 0:
            raise ConfigError("t_end must be positive")
        if self.scheme == "lf" and self.model != "euler":
            raise ConfigError("the lf scheme is only available for the euler model")
        self.snapshots = tuple(sorted(set(float(t) for t in self.snapshots if 0.0 <= t <= self.t_end)))

    @property
    def dim(self) -> int:
        return 1 if self.ny == 1 else 2

    def grid(self) -> Grid:
        try:
            return make_grid(self.dim, self.nx, self.ny)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def eos(self) -> EosParams:
        return EosParams(self.gamma, self.c_v, self.kappa)

    def reg(self, grid: Grid) -> RegParams:
        h2 = grid.min_spacing**2
        beta = self.beta if self.beta is not None else self.beta_coef * h2
        return RegParams(
            alpha=self.alpha_coef * h2,
            beta=beta,
            tol=self.tol,
            max_sweeps=self.max_sweeps,
            verbatim=self.fidelity_verbatim_stencils,
        )

    def build_model(self, grid: Grid) -> Model:
        return Model(self.model, self.eos(), None if self.model == "euler" else self.reg(grid))

    def initial_state(self, grid: Grid, model: Model):
        eos, form = model.eos, model.form
        if self.preset == "sod":
            return experiments.init_sod(grid, eos, form)
        if self.preset == "acoustic":
            return experiments.init_acoustic(grid, eos, form, self.eps1)
        if self.preset == "kh":
            return experiments.init_kh(grid, eos, form)
        return experiments.init_plane_wave(grid, eos, form, self.wave_k, self.amplitude)

    def control(self) -> StepControl:
        return StepControl(
            cfl=self.cfl,
            t_end=self.t_end,
            snapshot_times=self.snapshots,
            scheme=self.scheme,
            warm_mode=self.warm_start,
            verbatim_source=self.fidelity_verbatim_stencils,
        )

    def to_ini(self) -> str:
        lines = [f"# resolved configuration, tigre {__version__}"]
        for f in fields(self):
            v = getattr(self, f.name)
            if v is None or f.name == "out":
                continue
            if isinstance(v, tuple):
                v = ", ".join(fmt(t) for t in v)
            elif isinstance(v, float):
                v = fmt(v)
            lines.append(f"{f.name} = {v}")
        return "\n".join(lines) + "\n"


_FIELD_TYPES = {f.name: f.type for f in fields(ExperimentConfig)}


def _convert(key: str, raw: str):
    kind = _FIELD_TYPES[key]
    raw = raw.strip()
    try:
        if "tuple" in kind:
            return tuple(float(t) for t in raw.replace(",", " ").split())
        if kind.startswith("bool"):
            low = raw.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        if kind.startswith("int"):
            return int(raw)
        if kind.startswith("float"):
            if raw.lower() == "none":
                return None
            return float(raw)
        return raw
    except ValueError:
        raise ConfigError(f"bad value for {key}: {raw!r}") from None


def parse_config_text(text: str) -> dict:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",), comment_prefixes=("#",))
    parser.optionxform = str
    try:
        parser.read_string("[run]\n" + text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    out = {}
    for key, raw in parser["run"].items():
        name = key.strip().replace("-", "_")
        if name not in _FIELD_TYPES:
            raise ConfigError(f"unknown config key {key!r}")
        out[name] = _convert(name, raw)
    return out


def load_config_file(path: str | Path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config_text(text)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="python -m tigre", description="Run a benchmark preset.")
    p.add_argument("--config", help="key = value file; flags override it")
    p.add_argument("--preset", choices=sorted(PRESETS))
    p.add_argument("--model", choices=MODEL_KINDS)
    p.add_argument("--nx", type=int)
    p.add_argument("--ny", type=int)
    p.add_argument("--t-end", type=float)
    p.add_argument("--cfl", type=float)
    p.add_argument("--alpha-coef", type=float, help="alpha = coef * dx^2")
    p.add_argument("--beta-coef", type=float, help="beta = coef * dx^2")
    p.add_argument("--beta", type=float, help="absolute beta (overrides --beta-coef)")
    p.add_argument("--tol", type=float)
    p.add_argument("--max-sweeps", type=int)
    p.add_argument("--out")
    p.add_argument("--snapshots", help="comma-separated snapshot times")
    p.add_argument("--eps1", type=float, help="width of the radial acoustic bump")
    p.add_argument("--scheme", choices=("lw", "lf"))
    p.add_argument("--fidelity-verbatim-stencils", action="store_true", default=None)
    p.add_argument("--verify", action="store_true", help="re-run the config stored in --out and compare checksums")
    p.add_argument("-q", "--quiet", action="store_true")
    return p


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    values = load_config_file(args.config) if args.config else {}
    for name in _FIELD_TYPES:
        v = getattr(args, name, None)
        if v is None:
            continue
        if name == "snapshots":
            v = _convert("snapshots", v)
        values[name] = v
    try:
        return ExperimentConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def diag_row(rec: StepRecord | None, totals: diagnostics.DiagnosticsRecord) -> str:
    mom = list(totals.momentum) + [0.0] * (2 - len(totals.momentum))
    step, dt, sweeps, res = (0, 0.0, 0, 0.0) if rec is None else (rec.step, rec.dt, rec.sweeps, rec.residual)
    vals = [str(step), fmt(totals.t), fmt(dt), fmt(totals.mass), fmt(mom[0]), fmt(mom[1]),
            fmt(totals.energy), fmt(totals.entropy), fmt(totals.tv_rho), str(sweeps), fmt(res)]
    return ",".join(vals) + "\n"


class RunWriter:
    """Streams diagnostics rows and snapshot files into the output directory."""

    def __init__(self, out: Path, model: Model, grid: Grid):
        self.out = out
        self.model = model
        self.grid = grid
        self.files: list[str] = []
        self.n_snap = 0
        out.mkdir(parents=True, exist_ok=True)
        self.diag = open(out / "diagnostics.csv", "w")
        self.diag.write(",".join(DIAG_COLUMNS) + "\n")
        self.spectrum = open(out / "spectrum.csv", "w")
        self.spectrum.write(",".join(SPECTRUM_COLUMNS) + "\n")
        self.files += ["diagnostics.csv", "spectrum.csv"]

    def initial(self, totals):
        self.diag.write(diag_row(None, totals))

    def step(self, rec: StepRecord):
        self.diag.write(diag_row(rec, rec.totals))

    def snapshot(self, state, potentials):
        grid, t = self.grid, state.t
        u = state.velocity
        third = "pi" if state.form == "entropy" else "E"
        snap = {"rho": state.rho, "ux": u[0]}
        if grid.dim == 2:
            snap["uy"] = u[1]
        snap["p"] = pressure(self.model, state.q)
        snap[third] = state.third
        if self.model.has_potentials:
            snap["sigma"] = potentials.sigma
            if self.model.kind == "tigre":
                snap["chi"] = potentials.chi
        for name, field in snap.items():
            fname = f"snap_{self.n_snap:03d}_{name}.tigr"
            write_raster(self.out / fname, grid, field, t)
            self.files.append(fname)
        rec = diagnostics.spectrum_record(state, self.model.eos)
        for b, pp, ek in zip(rec.shells, rec.pressure_power, rec.kinetic_power):
            self.spectrum.write(f"{fmt(t)},{b},{fmt(pp)},{fmt(ek)}\n")
        self.n_snap += 1

    def close(self):
        self.diag.close()
        self.spectrum.close()


def write_manifest(out: Path, cfg: ExperimentConfig, files: list[str], status: str, wall: float, extra=()):
    lines = [
        f"tigre {__version__}",
        f"status: {status}",
        f"wall_clock_s: {wall:.3f}",
        f"alpha_coef: {fmt(cfg.alpha_coef)}",
        f"beta: {'beta_coef * dx^2' if cfg.beta is None else fmt(cfg.beta)}",
        *extra,
        "files:",
    ]
    lines += [f"{_sha256(out / f)}  {f}" for f in files]
    (out / "manifest.txt").write_text("\n".join(lines) + "\n")


def read_manifest(path: Path) -> dict[str, str]:
    sums = {}
    in_files = False
    for line in path.read_text().splitlines():
        if line == "files:":
            in_files = True
        elif in_files and line.strip():
            digest, name = line.split(None, 1)
            sums[name] = digest
    return sums


def execute(cfg: ExperimentConfig) -> int:
    """Run ``cfg`` and write all outputs; returns an exit code."""
    out = Path(cfg.out)
    grid = cfg.grid()
    try:
        model = cfg.build_model(grid)
        control = cfg.control()
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    state = cfg.initial_state(grid, model)

    writer = RunWriter(out, model, grid)
    (out / "config.ini").write_text(cfg.to_ini())
    writer.files.insert(0, "config.ini")
    writer.initial(diagnostics.totals(state, model.eos))
    t0 = time.perf_counter()
    status, code, extra = "finished", EXIT_OK, []
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", ConvergenceWarning)
        try:
            result = run(model, state, control, on_snapshot=writer.snapshot, on_step=writer.step)
            steps = len(result.records)
            extra.append(f"steps: {steps}")
            if steps:
                extra.append(f"mean_sweeps: {np.mean([r.sweeps for r in result.records]):.3f}")
        except (SimulationAbort, SolverError) as exc:
            status, code = f"aborted: {exc}", EXIT_ABORT
            step = getattr(exc, "step", None)
            if step is not None:
                extra.append(f"abort_step: {step}")
            log.error("run aborted: %s", exc)
        finally:
            writer.close()
    n_warn = sum(issubclass(w.category, ConvergenceWarning) for w in caught)
    extra.append(f"unconverged_solves: {n_warn}")
    write_manifest(out, cfg, writer.files, status, time.perf_counter() - t0, extra)
    log.info("%s; outputs in %s", status, out)
    return code


def verify(out: Path) -> int:
    manifest = out / "manifest.txt"
    if not manifest.exists():
        raise ConfigError(f"no manifest in {out}")
    expected = read_manifest(manifest)
    values = load_config_file(out / "config.ini")
    with tempfile.TemporaryDirectory() as tmp:
        values["out"] = tmp
        execute(ExperimentConfig(**values))
        got = read_manifest(Path(tmp) / "manifest.txt")
    bad = sorted(n for n in set(expected) | set(got) if expected.get(n) != got.get(n))
    for name in bad:
        print(f"MISMATCH {name}")
    print(f"verify: {len(expected) - len(bad)}/{len(expected)} files match")
    return EXIT_MISMATCH if bad else EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO, format="%(message)s")
    try:
        if args.verify:
            if not args.out:
                raise ConfigError("--verify needs --out pointing at a finished run")
            return verify(Path(args.out))
        return execute(resolve_config(args))
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
