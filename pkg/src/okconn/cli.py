"""Command line front end: config files, experiment presets, runs and oracle sweeps.

Config files are INI-style with four sections::

    [grid]     nx ny x_min x_max y_min y_max
    [params]   eps lambda tau kappa zeta1 zeta2 alpha s_exponent
    [initial]  kind r0 a k center radius path smoothing
    [run]      max_steps du_tol mode max_sources rng_seed output_dir
               log_every snapshot_every penalty

Unknown sections or keys are errors. ``m_bar`` is not configurable; it is
the mean of the realised initial field.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from dataclasses import dataclass, fields, replace
from pathlib import Path

import numpy as np

from . import kernels
from .connect import PairSampling
from .diagnostics import concentration, diagnostics
from .energy import SolverError
from .flow import FlowError, StopRule, run
from .grid import Grid2D, create_grid, read_field, write_field
from .initial import InitialCondition
from .oracle import (Disk, Polygon, Rectangle, UnionOfDisks, rectangle_energy, scaling_bounds,
                     sharp_energy)
from .params import ModelParams

log = logging.getLogger(__name__)

BOUNDS_COLUMNS = ("lambda", "lower", "upper", "leading", "rect_energy")
PRESETS = ("exp1", "exp2", "exp3")


class ConfigError(ValueError):
    """Bad config text; ``line`` is 1-based when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class RunConfig:
    grid: Grid2D
    params: ModelParams
    initial: InitialCondition
    stop: StopRule = StopRule()
    sampling: PairSampling = PairSampling()
    output_dir: str = "out"
    log_every: int = 100
    snapshot_every: int = 0
    penalty: str = "linearized"

    def __post_init__(self):
        if self.log_every < 0 or self.snapshot_every < 0:
            raise ValueError("log_every and snapshot_every must be >= 0")
        if self.penalty not in ("linearized", "explicit"):
            raise ValueError(f"penalty must be 'linearized' or 'explicit', got {self.penalty!r}")

    def with_initial_mean(self) -> "RunConfig":
        u0 = self.initial.realize(self.grid, self.params.eps)
        return replace(self, params=self.params.with_(m_bar=float(u0.values.mean())))


# --- config text -------------------------------------------------------------

def _as_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _as_pair(text: str) -> tuple[float, float]:
    parts = [p for p in text.replace(",", " ").split() if p]
    if len(parts) != 2:
        raise ValueError(f"expected two numbers, got {text!r}")
    return float(parts[0]), float(parts[1])


def _as_alpha(text: str):
    return None if text.strip().lower() in ("", "none", "auto") else float(text)


# key -> (target attribute, converter)
_SCHEMA = {
    "grid": {k: (k, int if k in ("nx", "ny") else float)
             for k in ("nx", "ny", "x_min", "x_max", "y_min", "y_max")},
    "params": {
        "eps": ("eps", float), "lambda": ("lam", float), "tau": ("tau", float),
        "kappa": ("kappa", float), "zeta1": ("zeta1", float), "zeta2": ("zeta2", float),
        "alpha": ("alpha", _as_alpha), "s_exponent": ("s_exponent", float),
    },
    "initial": {
        "kind": ("kind", str), "r0": ("r0", float), "a": ("a", float), "k": ("k", int),
        "center": ("center", _as_pair), "radius": ("radius", float), "path": ("path", str),
        "smoothing": ("smoothing", _as_bool),
    },
    "run": {
        "max_steps": ("max_steps", int), "du_tol": ("du_tol", float),
        "mode": ("mode", str), "max_sources": ("max_sources", int), "rng_seed": ("rng_seed", int),
        "output_dir": ("output_dir", str), "log_every": ("log_every", int),
        "snapshot_every": ("snapshot_every", int), "penalty": ("penalty", str),
    },
}
_REQUIRED = {"grid": ("nx", "ny"), "params": ("eps",)}


def _tokenize(text: str):
    """Yield (section, key, value, line) tuples, rejecting malformed lines."""
    section = None
    seen: set[tuple[str, str]] = set()
    sections: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].split(";", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ConfigError(f"malformed section header {raw.strip()!r}", lineno)
            section = line[1:-1].strip()
            if section not in _SCHEMA:
                raise ConfigError(f"unknown section [{section}]", lineno)
            if section in sections:
                raise ConfigError(f"duplicate section [{section}]", lineno)
            sections.add(section)
            continue
        if "=" not in line:
            raise ConfigError(f"expected key = value, got {raw.strip()!r}", lineno)
        if section is None:
            raise ConfigError("key outside of any section", lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _SCHEMA[section]:
            raise ConfigError(f"unknown key {key!r} in [{section}]", lineno)
        if (section, key) in seen:
            raise ConfigError(f"duplicate key {key!r} in [{section}]", lineno)
        seen.add((section, key))
        yield section, key, value, lineno


def parse_config(text: str, base_dir: str | Path | None = None) -> RunConfig:
    """Parse and validate a config; ``m_bar`` is filled from the realised initial field.

    Relative ``path`` entries in [initial] are resolved against ``base_dir``.
    """
    values: dict[str, dict] = {s: {} for s in _SCHEMA}
    lines: dict[tuple[str, str], int] = {}
    for section, key, value, lineno in _tokenize(text):
        attr, conv = _SCHEMA[section][key]
        try:
            values[section][attr] = conv(value)
        except ValueError as exc:
            raise ConfigError(f"[{section}] {key}: {exc}", lineno) from None
        lines[(section, attr)] = lineno
    for section, keys in _REQUIRED.items():
        for key in keys:
            attr = _SCHEMA[section][key][0]
            if attr not in values[section]:
                raise ConfigError(f"missing required key {key!r} in [{section}]")

    def build(section, factory, **extra):
        try:
            return factory(**values[section], **extra)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"[{section}] {exc}") from None

    g = values["grid"]
    try:
        grid = create_grid(g["nx"], g["ny"], (g.get("x_min", 0.0), g.get("x_max", 1.0),
                                               g.get("y_min", 0.0), g.get("y_max", 1.0)))
    except ValueError as exc:
        raise ConfigError(f"[grid] {exc}") from None
    params = build("params", ModelParams)
    ini = dict(values["initial"])
    if base_dir is not None and ini.get("path") and not Path(ini["path"]).is_absolute():
        ini["path"] = str(Path(base_dir) / ini["path"])
    values["initial"] = ini
    initial = build("initial", InitialCondition)
    r = values["run"]
    stop_keys, sampling_keys = ("max_steps", "du_tol"), ("mode", "max_sources", "rng_seed")
    values["stop"] = {k: r.pop(k) for k in stop_keys if k in r}
    values["sampling"] = {k: r.pop(k) for k in sampling_keys if k in r}
    stop = build("stop", StopRule)
    sampling = build("sampling", PairSampling)
    try:
        cfg = RunConfig(grid, params, initial, stop, sampling, **r)
        return cfg.with_initial_mean()
    except (OSError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def render(cfg: RunConfig) -> str:
    """Config text that :func:`parse_config` maps back to ``cfg``."""
    g, p, ic, st, sm = cfg.grid, cfg.params, cfg.initial, cfg.stop, cfg.sampling
    out = ["[grid]"]
    out += [f"{k} = {getattr(g, k)!r}" for k in ("nx", "ny", "x_min", "x_max", "y_min", "y_max")]
    out += ["", "[params]"]
    for key, (attr, _) in _SCHEMA["params"].items():
        out.append(f"{key} = {getattr(p, attr)!r}")
    out += ["", "[initial]",
            f"kind = {ic.kind}", f"r0 = {ic.r0!r}", f"a = {ic.a!r}", f"k = {ic.k}",
            f"center = {ic.center[0]!r}, {ic.center[1]!r}", f"radius = {ic.radius!r}",
            f"path = {ic.path}", f"smoothing = {str(ic.smoothing).lower()}"]
    out += ["", "[run]",
            f"max_steps = {st.max_steps}", f"du_tol = {st.du_tol!r}",
            f"mode = {sm.mode}", f"max_sources = {sm.max_sources}", f"rng_seed = {sm.rng_seed}",
            f"output_dir = {cfg.output_dir}", f"log_every = {cfg.log_every}",
            f"snapshot_every = {cfg.snapshot_every}", f"penalty = {cfg.penalty}"]
    return "\n".join(out) + "\n"


# --- presets -----------------------------------------------------------------

_PRESET_TABLE = {
    "exp1": dict(n=214, half=0.5, eps=8e-3, tau=9.5e-9, lam=10606.0, alpha=0.35,
                 zeta1=3.0, zeta2=0.0, ic=(0.02, 0.45, 2)),
    "exp2": dict(n=214, half=0.5, eps=4e-3, tau=4.7e-9, lam=14849.0, alpha=0.35,
                 zeta1=1.0, zeta2=0.0, ic=(0.01, 0.35, 2)),
    "exp3": dict(n=374, half=1.0, eps=3e-3, tau=3e-9, lam=20000.0, alpha=0.068,
                 zeta1=0.01, zeta2=0.01, ic=(0.4, 0.2, 2)),
}


def preset(name: str, scale: float = 1.0) -> RunConfig:
    """One of the three reference experiments.

    ``scale`` k divides the grid resolution by k and multiplies tau by k**2.
    """
    if name not in _PRESET_TABLE:
        raise ValueError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    if not scale >= 1:
        raise ValueError("scale must be >= 1")
    t = _PRESET_TABLE[name]
    n = max(int(round(t["n"] / scale)), 8)
    h = t["half"]
    grid = create_grid(n, n, (-h, h, -h, h))
    params = ModelParams(eps=t["eps"], lam=t["lam"], tau=t["tau"] * scale**2, kappa=2.0,
                         zeta1=t["zeta1"], zeta2=t["zeta2"], alpha=t["alpha"])
    r0, a, k = t["ic"]
    initial = InitialCondition("polar_cosine", r0=r0, a=a, k=k)
    cfg = RunConfig(grid, params, initial, output_dir=f"out_{name}")
    return cfg.with_initial_mean()


# --- shapes for the oracle subcommand ----------------------------------------

def parse_shape(text: str):
    """``disk:cx,cy,r`` | ``rectangle:x,y,w,h`` | ``disks:cx,cy,r;...`` | ``polygon:x,y;x,y;...``."""
    kind, _, body = text.partition(":")
    try:
        if kind == "disk":
            cx, cy, r = (float(v) for v in body.split(","))
            return Disk((cx, cy), r)
        if kind == "rectangle":
            x, y, w, h = (float(v) for v in body.split(","))
            return Rectangle((x, y), w, h)
        if kind == "disks":
            disks = []
            for item in body.split(";"):
                cx, cy, r = (float(v) for v in item.split(","))
                disks.append(Disk((cx, cy), r))
            return UnionOfDisks(tuple(disks))
        if kind == "polygon":
            verts = tuple(tuple(float(v) for v in item.split(",")) for item in body.split(";"))
            return Polygon(verts)
    except ValueError as exc:
        raise ValueError(f"bad shape {text!r}: {exc}") from None
    raise ValueError(f"unknown shape kind {kind!r}")


# --- subcommands -------------------------------------------------------------

def _cmd_run(args) -> int:
    if (args.config is None) == (args.preset is None):
        raise _UsageError("run needs exactly one of --config or --preset")
    if args.config is not None:
        path = Path(args.config)
        cfg = parse_config(path.read_text(encoding="utf-8"), base_dir=path.parent)
    else:
        cfg = preset(args.preset, args.scale)
    changes = {k: getattr(args, k) for k in ("zeta1", "zeta2") if getattr(args, k) is not None}
    if changes:
        cfg = replace(cfg, params=cfg.params.with_(**changes))
    if args.max_steps is not None:
        cfg = replace(cfg, stop=replace(cfg.stop, max_steps=args.max_steps))
    for key in ("output_dir", "log_every", "snapshot_every"):
        if getattr(args, key) is not None:
            cfg = replace(cfg, **{key: getattr(args, key)})

    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.ini").write_text(render(cfg), encoding="utf-8")
    u0 = cfg.initial.realize(cfg.grid, cfg.params.eps)
    result = run(u0, cfg.params, cfg.stop, cfg.sampling, log_every=cfg.log_every,
                 snapshot_every=cfg.snapshot_every, output_dir=out, penalty=cfg.penalty)
    result.write_csv(out / "energies.csv")
    write_field(out / "u_final.dat", result.state.u)
    d = diagnostics(result.state.u)
    meta = {
        "steps": result.state.step, "time": result.state.time, "stop_reason": result.stop_reason,
        "max_steps": cfg.stop.max_steps, "du_tol": cfg.stop.du_tol, "m_bar": cfg.params.m_bar,
        "kernel_backend": kernels.BACKEND, "final": _json_safe(d.row()),
    }
    (out / "metadata.json").write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")
    print(f"steps={result.state.step} stop={result.stop_reason} components={d.components} "
          f"total={result.rows[-1]['total']!r}")
    return 0


def _json_safe(row: dict) -> dict:
    return {k: (None if isinstance(v, float) and math.isnan(v) else v) for k, v in row.items()}


def _cmd_bounds(args) -> int:
    if not 0 < args.lambda_min <= args.lambda_max:
        raise _UsageError("need 0 < --lambda-min <= --lambda-max")
    if args.points < 1:
        raise _UsageError("--points must be >= 1")
    lams = np.geomspace(args.lambda_min, args.lambda_max, args.points)
    rows = [",".join(BOUNDS_COLUMNS)]
    for lam in lams:
        b = scaling_bounds(float(lam))
        e = rectangle_energy(float(lam), args.n_quad)
        rows.append(",".join(repr(float(v)) for v in (lam, b.lower, b.upper, b.leading, e)))
    text = "\n".join(rows) + "\n"
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def _cmd_oracle(args) -> int:
    shape = parse_shape(args.shape)
    print(repr(sharp_energy(shape, args.lam, args.n_quad)))
    return 0


def _cmd_diag(args) -> int:
    u = read_field(args.field)
    d = diagnostics(u, args.threshold)
    for key, value in d.row().items():
        print(f"{key}={value}")
    if args.radius is not None and not d.empty:
        print(f"concentration={concentration(u, args.radius, args.threshold)}")
    return 0


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="okconn", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("run", help="run a gradient flow")
    r.add_argument("--config")
    r.add_argument("--preset", choices=PRESETS)
    r.add_argument("--scale", type=float, default=1.0)
    r.add_argument("--zeta1", type=float)
    r.add_argument("--zeta2", type=float)
    r.add_argument("--max-steps", type=int)
    r.add_argument("--output-dir")
    r.add_argument("--log-every", type=int)
    r.add_argument("--snapshot-every", type=int)
    r.set_defaults(func=_cmd_run)

    b = sub.add_parser("bounds", help="scaling bounds and the rectangle competitor")
    b.add_argument("--lambda-min", type=float, required=True)
    b.add_argument("--lambda-max", type=float, required=True)
    b.add_argument("--points", type=int, required=True)
    b.add_argument("--n-quad", type=int, default=256)
    b.add_argument("--output", help="CSV path (default: stdout)")
    b.set_defaults(func=_cmd_bounds)

    o = sub.add_parser("oracle", help="sharp-interface energy of one shape")
    o.add_argument("--shape", required=True, help=parse_shape.__doc__)
    o.add_argument("--lambda", dest="lam", type=float, default=0.0)
    o.add_argument("--n-quad", type=int, default=256)
    o.set_defaults(func=_cmd_oracle)

    d = sub.add_parser("diag", help="diagnostics of a field dump")
    d.add_argument("--field", required=True)
    d.add_argument("--threshold", type=float, default=0.5)
    d.add_argument("--radius", type=float)
    d.set_defaults(func=_cmd_diag)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        parser.print_usage(sys.stderr)
        print(exc, file=sys.stderr)
        return 2
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"okconn {args.command}: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"okconn {args.command}: {exc}", file=sys.stderr)
        return 2
    except (FlowError, SolverError) as exc:
        print(f"okconn {args.command}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
