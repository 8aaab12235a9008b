"""``ruler`` command-line front end.

Subcommands: gamma, prob, metrics, marginal, verify, figures, run.
Settings come from an optional YAML config (``--config``); flags override it.
"""
import argparse
import json
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
import yaml

from . import __version__, _accel, coherence, fock, verify
from .errors import AliasingError, InputError, TruncationError
from .fock import FockVector, MixedState
from .phase_space import Grid2D

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3
OUTPUTS = ("gamma", "prob", "metrics", "marginal", "verify", "figures")
CONFIG_KEYS = {"probe", "tick", "grid", "cutoff", "outputs", "out", "tolerances", "suite",
               "which", "route"}
GRID_KEYS = {"extent", "points"}


class ConfigError(Exception):
    pass


@dataclass
class ScenarioConfig:
    probe: str = "vacuum"
    tick: str = "vacuum"
    extent: float = 6.0
    points: int = 128
    cutoff: int | None = None
    outputs: list = field(default_factory=lambda: ["metrics"])
    out: str = "."
    tolerances: dict = field(default_factory=dict)
    suite: str = "all"
    which: str = "all"
    route: str = "char"

    def grid(self):
        return Grid2D(float(self.extent), int(self.points))

    def validate(self):
        if self.route not in ("char", "wigner"):
            raise ConfigError(f"route must be char or wigner, got {self.route!r}")
        for o in self.outputs:
            if o not in OUTPUTS:
                raise ConfigError(f"unknown output {o!r}; choose from {', '.join(OUTPUTS)}")
        if self.suite not in verify.SUITES + ("all",):
            raise ConfigError(f"unknown suite {self.suite!r}")
        if self.which not in ("1", "2", "all"):
            raise ConfigError(f"--which must be 1, 2 or all, got {self.which!r}")
        unknown = set(self.tolerances) - set(verify.DEFAULT_TOLERANCES)
        if unknown:
            raise ConfigError(f"unknown tolerance name(s): {', '.join(sorted(unknown))}")
        if self.cutoff is not None and not 1 <= int(self.cutoff) <= fock.MAX_CUTOFF:
            raise ConfigError(f"cutoff must lie in [1, {fock.MAX_CUTOFF}]")
        try:
            self.grid()
        except InputError as exc:
            raise ConfigError(str(exc)) from exc
        parse_state(self.probe, self.cutoff)
        parse_state(self.tick, self.cutoff)
        return self


def load_config(path):
    try:
        data = yaml.safe_load(Path(path).read_text()) or {}
    except (OSError, yaml.YAMLError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config must be a mapping")
    unknown = set(data) - CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(sorted(unknown))}")
    cfg = ScenarioConfig()
    updates = {k: v for k, v in data.items() if k != "grid"}
    grid = data.get("grid") or {}
    if not isinstance(grid, dict) or set(grid) - GRID_KEYS:
        raise ConfigError(f"grid accepts only {sorted(GRID_KEYS)}")
    updates.update(grid)
    if "outputs" in updates and isinstance(updates["outputs"], str):
        updates["outputs"] = [updates["outputs"]]
    tol = updates.get("tolerances", {})
    if not isinstance(tol, dict):
        raise ConfigError("tolerances must be a mapping")
    updates["tolerances"] = {k: float(v) for k, v in tol.items()}
    for key in ("probe", "tick", "which"):
        if key in updates:
            updates[key] = str(updates[key])
    return replace(cfg, **updates)


def _pure(spec, N):
    kind, _, arg = spec.partition(":")
    kind = kind.strip().lower()
    try:
        if kind == "vacuum" and not arg:
            return fock.vacuum(N or fock.DEFAULT_CUTOFF)
        if kind == "number":
            n = int(arg)
            return fock.number_state(n, N or max(fock.DEFAULT_CUTOFF, n))
        if kind == "squeezed":
            return fock.squeezed_vacuum(float(arg), N)
    except ValueError as exc:
        raise ConfigError(f"bad state spec {spec!r}: {exc}") from exc
    raise ConfigError(f"bad state spec {spec!r}; use vacuum | number:<n> | squeezed:<lambda> | mix:...")


def parse_state(spec, N=None):
    """Parse the state grammar into a FockVector or MixedState.

    ``vacuum | number:<n> | squeezed:<lambda> | mix:<w1>*<spec1>,<w2>*<spec2>``
    """
    spec = str(spec).strip()
    if not spec.lower().startswith("mix:"):
        return _pure(spec, N)
    comps = []
    for part in spec[4:].split(","):
        w, star, sub = part.partition("*")
        if not star:
            raise ConfigError(f"mixture component {part!r} needs the form <weight>*<spec>")
        try:
            weight = float(w)
        except ValueError as exc:
            raise ConfigError(f"bad mixture weight {w!r}") from exc
        comps.append((weight, _pure(sub, N)))
    n = max(v.cutoff for _, v in comps)
    try:
        return MixedState(tuple((w, v.padded(n)) for w, v in comps))
    except InputError as exc:
        raise ConfigError(str(exc)) from exc


def _common_cutoff(a, b):
    n = max(a.cutoff, b.cutoff)
    pad = lambda s: s.padded(n) if isinstance(s, FockVector) else MixedState(
        tuple((w, v.padded(n)) for w, v in s.components))
    return pad(a), pad(b)


def _fmt(x):
    return format(float(x), ".17g")


def write_csv(path, header, columns, cfg):
    path.parent.mkdir(parents=True, exist_ok=True)
    rows = np.column_stack([np.asarray(c, dtype=float) for c in columns])
    with open(path, "w", newline="\n") as fh:
        fh.write(f"# qruler {__version__} probe={cfg.probe} tick={cfg.tick} "
                 f"cutoff={cfg.cutoff if cfg.cutoff is not None else 'auto'} "
                 f"grid_extent={_fmt(cfg.extent)} grid_points={int(cfg.points)}\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")
    return path


def write_json(path, payload):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True, default=float) + "\n")
    return path


def _states(cfg):
    probe = parse_state(cfg.probe, cfg.cutoff)
    tick = parse_state(cfg.tick, cfg.cutoff)
    return _common_cutoff(probe, tick)


def _is_pure(s):
    return isinstance(s, FockVector)


def _gamma_field(cfg, probe, tick):
    grid = cfg.grid()
    if _is_pure(probe) and _is_pure(tick):
        return coherence.gamma(probe, tick, grid, cfg.route)
    return coherence.gamma_mixed(probe, tick, grid, cfg.route)


def _flat(grid):
    pts = grid.complex_points().ravel()
    return pts.real, pts.imag


def do_gamma(cfg, out):
    probe, tick = _states(cfg)
    g = _gamma_field(cfg, probe, tick)
    tx, ty = _flat(g.grid)
    v = g.values.ravel()
    path = write_csv(out / "gamma.csv", ["tau_x", "tau_y", "re_gamma", "im_gamma"],
                     [tx, ty, v.real, v.imag], cfg)
    return {"gamma.csv": str(path), "gamma0_times_pi2": float(g.values[g.grid.origin_index,
                                                                      g.grid.origin_index].real * np.pi ** 2)}


def do_prob(cfg, out):
    probe, tick = _states(cfg)
    grid = cfg.grid()
    if _is_pure(probe) and _is_pure(tick):
        p = coherence.prob_direct(probe, tick, grid)
    else:
        p = coherence.prob_mixed(probe, tick, grid)
    p_ft = coherence.prob_from_gamma(_gamma_field(cfg, probe, tick))
    mx, my = _flat(grid)
    path = write_csv(out / "prob.csv", ["mu_x", "mu_y", "p_direct", "p_from_gamma"],
                     [mx, my, p.values.ravel(), p_ft.values.real.ravel()], cfg)
    return {"prob.csv": str(path), "theorem_gap": float(np.max(np.abs(p_ft.values - p.values))),
            "norm_p": p.integral().real}


def do_marginal(cfg, out):
    probe, tick = _states(cfg)
    g = _gamma_field(cfg, probe, tick)
    m = coherence.marginal_gamma(g)
    path = write_csv(out / "marginal.csv", ["tau_x", "re_gamma_marginal", "im_gamma_marginal"],
                     [g.grid.axis, m.real, m.imag], cfg)
    return {"marginal.csv": str(path)}


def do_metrics(cfg, out):
    probe, tick = _states(cfg)
    grid = cfg.grid()
    if _is_pure(probe) and _is_pure(tick):
        report = coherence.coherence_report(probe, tick, grid).as_dict()
        report["note"] = ("T_c is the moment integral; it equals (2/pi) n^T C n, while the printed "
                          "identity T_c = 2 n^T C n is larger by a factor pi")
    else:
        g = coherence.gamma_mixed(probe, tick, grid)
        p = coherence.prob_mixed(probe, tick, grid, check=False)
        tc, db = coherence.coherence_time(g), coherence.resolution(p)
        report = {"tau_c": tc, "delta_beta": db, "product": tc * db,
                  "parseval_gap": abs(tc * db * np.pi ** 2 - 1), "grid": grid.describe()}
    path = write_json(out / "metrics.json", report)
    return {"metrics.json": str(path), "tau_c": report["tau_c"], "delta_beta": report["delta_beta"],
            "tau_c*delta_beta*pi^2": report["product"] * np.pi ** 2}


def do_verify(cfg, out):
    checks = verify.run_suite(cfg.suite, cfg.tolerances, cfg.grid(), cfg.cutoff or fock.DEFAULT_CUTOFF)
    failed = [c.name for c in checks if not c.passed]
    payload = {"suite": cfg.suite, "version": __version__, "grid": cfg.grid().describe(),
               "passed": not failed, "failed": failed, "checks": [c.as_dict() for c in checks]}
    path = write_json(out / f"verify_{cfg.suite}.json", payload)
    for c in checks:
        print(f"  {'PASS' if c.passed else 'FAIL'}  {c.suite:<9} {c.name:<44} {c.value:.3e}  (< {c.bound:g})")
    return {f"verify_{cfg.suite}.json": str(path), "checks": len(checks), "failed": len(failed)}, bool(failed)


def do_figures(cfg, out):
    summary = {}
    if cfg.which in ("1", "all"):
        d = verify.figure1_data()
        keys = list(d)
        summary["figure1.csv"] = str(write_csv(out / "figure1.csv", keys, [d[k] for k in keys], cfg))
    if cfg.which in ("2", "all"):
        rows = verify.figure2_data()
        cols = list(zip(*rows))
        summary["figure2.csv"] = str(write_csv(out / "figure2.csv", ["n", "tau_c_numeric", "tau_c_oracle"],
                                               cols, cfg))
    return summary


HANDLERS = {"gamma": do_gamma, "prob": do_prob, "metrics": do_metrics, "marginal": do_marginal,
            "verify": do_verify, "figures": do_figures}


def run(cfg):
    """Execute every requested output; returns the process exit code."""
    out = Path(cfg.out)
    failed = False
    for name in cfg.outputs:
        result = HANDLERS[name](cfg, out)
        if isinstance(result, tuple):
            result, bad = result
            failed |= bad
        print(f"[{name}]")
        for k, v in result.items():
            print(f"  {k:<24} {v:.10g}" if isinstance(v, float) else f"  {k:<24} {v}")
    return EXIT_VERIFY if failed else EXIT_OK


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML scenario file; flags override its values")
    common.add_argument("--probe", help="vacuum | number:<n> | squeezed:<lambda> | mix:<w>*<spec>,...")
    common.add_argument("--tick", help="same grammar as --probe")
    common.add_argument("--grid-extent", type=float, dest="extent")
    common.add_argument("--grid-points", type=int, dest="points")
    common.add_argument("--cutoff", type=int)
    common.add_argument("--route", choices=("char", "wigner"))
    common.add_argument("--out", help="output directory (default: current directory)")

    parser = argparse.ArgumentParser(prog="ruler", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"qruler {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("gamma", "prob", "metrics", "marginal"):
        sub.add_parser(name, parents=[common])
    v = sub.add_parser("verify", parents=[common])
    v.add_argument("--suite", choices=verify.SUITES + ("all",))
    f = sub.add_parser("figures", parents=[common])
    f.add_argument("--which", choices=("1", "2", "all"))
    r = sub.add_parser("run", parents=[common])
    r.add_argument("--outputs", help="comma-separated list from: " + ", ".join(OUTPUTS))
    return parser


def _split_tolerances(argv):
    """Pull ``--tolerance.<name> <value>`` (or ``=value``) pairs out of argv."""
    rest, tol = [], {}
    it = iter(argv)
    for arg in it:
        if arg.startswith("--tolerance."):
            key, eq, val = arg[len("--tolerance."):].partition("=")
            if not eq:
                val = next(it, None)
                if val is None:
                    raise ConfigError(f"{arg} needs a value")
            try:
                tol[key] = float(val)
            except ValueError as exc:
                raise ConfigError(f"bad tolerance value {val!r} for {key}") from exc
        else:
            rest.append(arg)
    return rest, tol


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        argv, tol = _split_tolerances(argv)
        try:
            args = parser.parse_args(argv)
        except SystemExit as exc:
            return EXIT_USAGE if exc.code else EXIT_OK
        cfg = load_config(args.config) if args.config else ScenarioConfig()
        flags = {k: v for k, v in vars(args).items()
                 if k not in ("command", "config", "outputs") and v is not None}
        cfg = replace(cfg, **flags, tolerances={**cfg.tolerances, **tol})
        if args.command == "run":
            if args.outputs:
                cfg = replace(cfg, outputs=[o.strip() for o in args.outputs.split(",") if o.strip()])
        else:
            cfg = replace(cfg, outputs=[args.command])
        cfg.validate()
    except ConfigError as exc:
        print(f"ruler: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InputError as exc:
        print(f"ruler: input error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except TruncationError as exc:
        print(f"ruler: numerical non-convergence: {exc}", file=sys.stderr)
        return EXIT_NUMERIC

    _accel.configure_threads()
    try:
        return run(cfg)
    except (TruncationError, AliasingError) as exc:
        print(f"ruler: numerical non-convergence: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except InputError as exc:
        print(f"ruler: input error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
