"""Command-line front end: state files, heralding runs, and figure-data sweeps.

Conventions shared by all subcommands:

* CSV artifacts use "," delimiters, "." decimals, LF endings, one leading
  comment line carrying the sha256 of the canonical config, then a header row.
  Floats are written with repr, so reruns of the same config are byte-identical.
* QFI columns are densities F_Q / N_B unless suffixed _raw.
* exit 2: bad flags or config schema violations; exit 3: a requested herald has
  zero probability (the offending mu and l_A are named on stderr).
"""

from __future__ import annotations

import argparse
import hashlib
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .conditioning import outcome_table
from .dicke import DickeState, SpinDensity, dump_state, load_state, state_to_obj
from .metrology import qfi_mixed, qfi_pure
from .noise import DetectionNoise, noisy_conditional_state, resolve_axis
from .oat import OATParameters, oat_state, split_state, splitting_distribution, theta_star
from .wigner import SphereGrid, wigner_function, wigner_negativity

CONFIG_VERSION = 1
OUTPUT_CHOICES = ("prob", "fq", "negativity", "wigner-field")
COLUMNS = ("series", "axis", "theta_a", "n", "mu", "sigma", "la_star",
           "prob", "fq_density", "negativity")


class ConfigError(Exception):
    pass


class HeraldError(Exception):
    def __init__(self, mu, l_a):
        super().__init__(f"zero-probability herald at mu={mu!r}, l_A={l_a}")
        self.mu = mu
        self.l_a = l_a


@dataclass
class SweepConfig:
    n: int
    mu_grid: list
    axis: str
    la_selector: object
    sigma_grid: list
    outputs: tuple
    out_path: str = None
    label: str = ""

    def as_obj(self):
        return {
            "version": CONFIG_VERSION,
            "n": self.n,
            "muGrid": [float(m) for m in self.mu_grid],
            "axis": self.axis,
            "lASelector": self.la_selector,
            "sigmaGrid": [float(s) for s in self.sigma_grid],
            "outputs": list(self.outputs),
            "outPath": self.out_path,
            "label": self.label,
        }


_ALLOWED_KEYS = {"version", "n", "muGrid", "axis", "lASelector", "sigmaGrid",
                 "outputs", "outPath", "label"}


def _parse_axis(axis):
    if axis in ("x", "yprime", "zprime", "oat"):
        return axis
    if isinstance(axis, str) and axis.startswith("planeAngle:"):
        try:
            float(axis.split(":", 1)[1])
        except ValueError:
            raise ConfigError(f"bad plane angle in axis {axis!r}")
        return axis
    raise ConfigError(f"axis must be x, yprime, zprime, planeAngle:<angle>, "
                      f"or oat, got {axis!r}")


def _parse_selector(sel):
    if isinstance(sel, bool):
        raise ConfigError("lASelector must be an integer or a rule string")
    if isinstance(sel, int):
        return sel
    if isinstance(sel, str):
        if sel in ("half", "halfCeil", "all"):
            return sel
        if sel.startswith("offset:"):
            try:
                int(sel.split(":", 1)[1])
            except ValueError:
                raise ConfigError(f"bad offset selector {sel!r}")
            return sel
    raise ConfigError(f"lASelector must be an integer, half, halfCeil, all, "
                      f"or offset:<int>, got {sel!r}")


def load_config(obj):
    """Validate a raw config mapping (fail-closed) into a SweepConfig."""
    if not isinstance(obj, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(obj) - _ALLOWED_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    if obj.get("version") != CONFIG_VERSION:
        raise ConfigError(f"config version must be {CONFIG_VERSION}")
    for key in ("n", "muGrid", "axis", "lASelector", "sigmaGrid", "outputs"):
        if key not in obj:
            raise ConfigError(f"missing config key {key!r}")
    n = obj["n"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ConfigError("n must be a positive integer")
    axis = _parse_axis(obj["axis"])
    if axis != "oat" and n % 2 != 0:
        raise ConfigError("n must be even when conditioning on N_A = N/2")
    for key in ("muGrid", "sigmaGrid"):
        grid = obj[key]
        if not isinstance(grid, list) or not grid:
            raise ConfigError(f"{key} must be a non-empty list")
        for v in grid:
            if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
                raise ConfigError(f"{key} entries must be finite numbers")
        if key == "sigmaGrid" and any(v < 0 for v in grid):
            raise ConfigError("sigmaGrid entries must be non-negative")
    outputs = obj["outputs"]
    if not isinstance(outputs, list) or not outputs:
        raise ConfigError("outputs must be a non-empty list")
    for out in outputs:
        if out not in OUTPUT_CHOICES:
            raise ConfigError(f"unknown output {out!r}")
    sel = _parse_selector(obj["lASelector"])
    return SweepConfig(n=n, mu_grid=[float(m) for m in obj["muGrid"]],
                       axis=axis, la_selector=sel,
                       sigma_grid=[float(s) for s in obj["sigmaGrid"]],
                       outputs=tuple(outputs), out_path=obj.get("outPath"),
                       label=obj.get("label", ""))


def _selector_values(sel, n_a):
    if isinstance(sel, int):
        if not (0 <= sel <= n_a):
            raise ConfigError(f"fixed l_A {sel} out of range for N_A={n_a}")
        return [sel]
    if sel == "half":
        return [n_a // 2]
    if sel == "halfCeil":
        return [math.ceil(n_a / 2)]
    if sel == "all":
        return list(range(n_a + 1))
    d = int(sel.split(":", 1)[1])
    return [min(max(n_a + d, 0), n_a)]


def config_hash(configs):
    blob = json.dumps([c.as_obj() for c in configs], sort_keys=True,
                      separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def _theta_a_of(axis):
    if axis == "zprime":
        return 0.0
    if axis == "yprime":
        return math.pi / 2
    if axis.startswith("planeAngle:"):
        return float(axis.split(":", 1)[1])
    return None


def _axis_spec(cfg, mu):
    p = OATParameters(cfg.n, mu)
    pol = cfg.axis
    if pol.startswith("planeAngle:"):
        pol = float(pol.split(":", 1)[1])
    return resolve_axis(pol, p)


def _field_path(out_path, cfg, mu, sigma, l_a):
    stem = out_path[:-4] if out_path.endswith(".csv") else out_path
    return f"{stem}.field.la{l_a}.mu{mu:g}.sigma{sigma:g}.csv"


def _eval_task(cfg, mu, sigma, field_sink):
    """Rows for one (config, mu, sigma) sweep point, in l_A order."""
    base = dict(series=cfg.label, axis=cfg.axis, theta_a=_theta_a_of(cfg.axis),
                n=cfg.n, mu=mu, sigma=sigma)
    if cfg.axis == "oat":
        state = oat_state(OATParameters(cfg.n, mu))
        row = dict(base, la_star=None, prob=None, negativity=None,
                   fq_density=qfi_pure(state).fq / cfg.n if "fq" in cfg.outputs else None)
        if "negativity" in cfg.outputs:
            row["negativity"] = wigner_negativity(SpinDensity.from_pure(state))
        return [row]
    p = OATParameters(cfg.n, mu)
    split = split_state(p)
    direction = _axis_spec(cfg, mu)
    n_a = cfg.n // 2
    n_b = cfg.n - n_a
    table = outcome_table(split, n_a, direction)
    enumerate_all = cfg.la_selector == "all"
    rows = []
    for l_a in _selector_values(cfg.la_selector, n_a):
        out = table.outcomes[l_a]
        row = dict(base, la_star=l_a, prob=None, fq_density=None, negativity=None)
        if "prob" in cfg.outputs:
            row["prob"] = table.p_given_na[l_a]
        needs_state = {"fq", "negativity", "wigner-field"} & set(cfg.outputs)
        if needs_state:
            if sigma == 0.0:
                if out.state_b is None:
                    if not enumerate_all:
                        raise HeraldError(mu, l_a)
                    rows.append(row)
                    continue
                rho = SpinDensity.from_pure(out.state_b)
            else:
                try:
                    rho = noisy_conditional_state(split, n_a, l_a, direction,
                                                  DetectionNoise(sigma))
                except ValueError:
                    raise HeraldError(mu, l_a)
            if "fq" in cfg.outputs:
                row["fq_density"] = qfi_mixed(rho).fq / n_b
            if "negativity" in cfg.outputs:
                row["negativity"] = wigner_negativity(rho)
            if "wigner-field" in cfg.outputs:
                field = wigner_function(rho, SphereGrid.for_spin(n_b / 2.0))
                field_sink.append((cfg, mu, sigma, l_a, field))
        rows.append(row)
    return rows


def run_sweep(configs, threads=1):
    """Evaluate configs in order; returns (rows, field artifacts)."""
    tasks = [(cfg, mu, sigma)
             for cfg in configs for mu in cfg.mu_grid for sigma in cfg.sigma_grid]
    field_sink = []
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(lambda t: _eval_task(t[0], t[1], t[2], field_sink),
                                   tasks))
    else:
        chunks = [_eval_task(cfg, mu, sigma, field_sink) for cfg, mu, sigma in tasks]
    rows = [row for chunk in chunks for row in chunk]
    # deterministic artifact order regardless of worker completion order
    order = {(id(c), m, s): i for i, (c, m, s) in enumerate(tasks)}
    field_sink.sort(key=lambda rec: (order[(id(rec[0]), rec[1], rec[2])], rec[3]))
    return rows, field_sink


def write_rows_csv(rows, sha, stream):
    stream.write(f"# config sha256: {sha}\n")
    stream.write(",".join(COLUMNS) + "\n")
    for row in rows:
        stream.write(",".join(_fmt(row.get(c)) for c in COLUMNS) + "\n")


def write_field_csv(field, sha, stream):
    stream.write(f"# config sha256: {sha}\n")
    stream.write("theta,phi,w\n")
    grid = field.grid
    for i, th in enumerate(grid.theta):
        for k, ph in enumerate(grid.phi):
            stream.write(f"{_fmt(th)},{_fmt(ph)},{_fmt(field.values[i, k])}\n")


def _open_out(path):
    if path == "-":
        return sys.stdout, False
    return open(path, "w", newline="\n"), True


# ---------------------------------------------------------------- presets

def _cfg(label, n, mus, axis, sel, sigmas, outputs):
    return SweepConfig(n=n, mu_grid=[float(m) for m in mus], axis=axis,
                       la_selector=sel, sigma_grid=[float(s) for s in sigmas],
                       outputs=tuple(outputs), label=label)


def _lin(a, b, num):
    return [float(v) for v in np.linspace(a, b, num)]


def preset_configs(name):
    mus_panel = [0.1, 0.5, 1.0, 2.0]
    full_period = _lin(2 * math.pi / 60, 2 * math.pi, 60)
    if name == "fig2a":
        return [_cfg(f"a:{i}", 100, [0.1, 0.5, 2.0], f"planeAngle:{t!r}",
                     "half", [0.0], ["fq"])
                for i, t in enumerate(_lin(0.0, math.pi / 2, 25))]
    if name == "fig2bc":
        return [_cfg("b", 100, mus_panel, "yprime", "all", [0.0], ["prob"]),
                _cfg("c", 100, mus_panel, "zprime", "all", [0.0], ["prob"])]
    if name == "fig2de":
        return [_cfg("d", 100, mus_panel, "yprime", "all", [0.0], ["fq"]),
                _cfg("e", 100, mus_panel, "zprime", "all", [0.0], ["fq"])]
    if name == "fig2f":
        mus = _lin(0.02, 1.0, 50)
        return [_cfg("f:yprime", 100, mus, "yprime", "half", [0.0], ["fq"]),
                _cfg("f:zprime", 100, mus, "zprime", "half", [0.0], ["fq"]),
                _cfg("f:oat", 50, mus, "oat", 0, [0.0], ["fq"])]
    if name == "fig3abd":
        mus = _lin(0.01, 0.5, 40)
        out = [_cfg("a", 100, [0.05, 0.1, 0.3, 1.0], "x", "all", [0.0], ["prob"]),
               _cfg("b", 100, [0.05, 0.1, 0.3, 1.0], "x", "all", [0.0], ["fq"])]
        for d in (0, -1, -2):
            out.append(_cfg(f"d:la=NA{d:+d}", 100, mus, "x", f"offset:{d}",
                            [0.0], ["fq"]))
        out.append(_cfg("d:oat", 50, mus, "oat", 0, [0.0], ["fq"]))
        return out
    if name == "fig4":
        sig = _lin(0.0, 2.0, 21)
        mus_b = _lin(0.02, 0.6, 30)
        mus_d = _lin(0.01, 0.5, 30)
        out = [_cfg("a:yprime", 100, [0.1, 0.3], "yprime", "half", sig, ["fq"]),
               _cfg("a:zprime", 100, [0.1, 0.3], "zprime", "half", sig, ["fq"]),
               _cfg("b:yprime", 100, mus_b, "yprime", "half", [0.0, 0.49, 1.37], ["fq"]),
               _cfg("b:zprime", 100, mus_b, "zprime", "half", [0.0, 0.49, 1.37], ["fq"]),
               _cfg("b:oat", 50, mus_b, "oat", 0, [0.0], ["fq"])]
        for d in (0, -1, -2):
            out.append(_cfg(f"c:la=NA{d:+d}", 100, [0.1], "x", f"offset:{d}",
                            sig, ["fq"]))
            out.append(_cfg(f"d:la=NA{d:+d}", 100, mus_d, "x", f"offset:{d}",
                            [0.0, 0.49, 1.37], ["fq"]))
        out.append(_cfg("d:oat", 50, mus_d, "oat", 0, [0.0], ["fq"]))
        return out
    if name == "fig5":
        sig = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 1.1, 1.2]
        out = [_cfg(f"b:la={l}", 100, [0.1], "x", l, sig, ["fq", "negativity"])
               for l in (47, 48, 49)]
        out += [_cfg(f"a:la={l}", 100, [0.1], "x", l, [0.0, 0.3, 0.5, 0.7],
                     ["wigner-field"]) for l in (48, 49)]
        return out
    if name == "s1b":
        return [_cfg("s1b", 50, full_period, "oat", 0, [0.0], ["fq"])]
    if name == "s3":
        # near mu = 2 pi the state repolarizes along -x and the l_A ~ N_A
        # heralds along +x lose all probability, so those curves stop early
        mus = [float(2 * math.pi * (k + 0.5) / 60) for k in range(60)]
        mus_x = [m for m in mus if m <= 6.05]
        out = [_cfg("a:yprime", 100, mus, "yprime", "half", [0.0], ["fq"]),
               _cfg("a:zprime", 100, mus, "zprime", "half", [0.0], ["fq"]),
               _cfg("b:la=NA+0", 100, mus_x, "x", "offset:0", [0.0], ["fq"]),
               _cfg("b:la=NA-1", 100, mus_x, "x", "offset:-1", [0.0], ["fq"]),
               _cfg("oat", 50, mus, "oat", 0, [0.0], ["fq"])]
        return out
    raise ConfigError(f"unknown preset {name!r}")


PRESETS = ("fig2a", "fig2bc", "fig2de", "fig2f", "fig3abd", "fig4", "fig5",
           "s1b", "s3")


# ---------------------------------------------------------------- commands

def cmd_oat(args):
    p = OATParameters(args.n, args.mu)
    state = oat_state(p)
    payload = state_to_obj(state, mu=args.mu)
    text = json.dumps(payload, sort_keys=True)
    if args.out == "-":
        sys.stdout.write(text + "\n")
    else:
        with open(args.out, "w", newline="\n") as fh:
            fh.write(text + "\n")
    return 0


def cmd_split_info(args):
    p = OATParameters(args.n, args.mu)
    info = {
        "n": args.n,
        "mu": args.mu,
        "thetaStar": theta_star(p),
        "pNA": [float(v) for v in splitting_distribution(args.n)],
    }
    text = json.dumps(info, sort_keys=True)
    if args.out == "-":
        sys.stdout.write(text + "\n")
    else:
        with open(args.out, "w", newline="\n") as fh:
            fh.write(text + "\n")
    return 0


def _resolve_cli_axis(axis_flag, p):
    axis = _parse_axis(axis_flag)
    if axis == "oat":
        raise ConfigError("axis oat only makes sense in sweeps")
    pol = axis
    if pol.startswith("planeAngle:"):
        pol = float(pol.split(":", 1)[1])
    return axis, resolve_axis(pol, p)


def cmd_condition(args):
    p = OATParameters(args.n, args.mu)
    axis, direction = _resolve_cli_axis(args.axis, p)
    split = split_state(p)
    table = outcome_table(split, args.na, direction)
    out = table.outcomes[args.la]
    if out.state_b is None:
        raise HeraldError(args.mu, args.la)
    payload = state_to_obj(out.state_b, mu=args.mu, nA=args.na, lA=args.la,
                           axis=axis, prob=float(table.p_given_na[args.la]))
    text = json.dumps(payload, sort_keys=True)
    if args.out == "-":
        sys.stdout.write(text + "\n")
    else:
        with open(args.out, "w", newline="\n") as fh:
            fh.write(text + "\n")
    return 0


def cmd_qfi(args):
    state = load_state(args.infile)
    res = qfi_pure(state)
    payload = {
        "n": state.n,
        "fq_raw": res.fq,
        "fq": res.fq / state.n,
        "generator": [float(v) for v in res.axis],
    }
    text = json.dumps(payload, sort_keys=True)
    if args.out == "-":
        sys.stdout.write(text + "\n")
    else:
        with open(args.out, "w", newline="\n") as fh:
            fh.write(text + "\n")
    return 0


def cmd_wigner(args):
    state = load_state(args.infile)
    rho = SpinDensity.from_pure(state)
    j = state.n / 2.0
    if args.grid_theta:
        # an explicit grid pins both the field samples and the negativity
        grid = SphereGrid(args.grid_theta, args.grid_phi or 2 * args.grid_theta)
        wn = wigner_negativity(rho, grid)
    else:
        grid = SphereGrid.for_spin(j)
        wn = wigner_negativity(rho)
    field = wigner_function(rho, grid)
    sha = hashlib.sha256(json.dumps(
        {"n": state.n, "nTheta": grid.n_theta, "nPhi": grid.n_phi},
        sort_keys=True, separators=(",", ":")).encode()).hexdigest()
    stream, close = _open_out(args.out)
    try:
        write_field_csv(field, sha, stream)
    finally:
        if close:
            stream.close()
    neg = json.dumps({"j": j, "negativity": float(wn),
                      "imagResidue": field.imag_residue}, sort_keys=True)
    if args.json_out:
        with open(args.json_out, "w", newline="\n") as fh:
            fh.write(neg + "\n")
    else:
        sys.stdout.write(neg + "\n")
    return 0


def cmd_sweep(args):
    if args.preset:
        configs = preset_configs(args.preset)
        out_path = args.out or f"{args.preset}.csv"
    else:
        with open(args.config) as fh:
            raw = json.load(fh)
        raw_list = raw if isinstance(raw, list) else [raw]
        configs = [load_config(obj) for obj in raw_list]
        out_path = args.out or configs[0].out_path
        if out_path is None:
            raise ConfigError("no output path: set outPath or pass --out")
    wants_fields = any("wigner-field" in c.outputs for c in configs)
    if out_path == "-" and wants_fields:
        raise ConfigError("wigner-field output needs a real file path, not -")
    sha = config_hash(configs)
    rows, fields = run_sweep(configs, threads=args.threads)
    stream, close = _open_out(out_path)
    try:
        write_rows_csv(rows, sha, stream)
    finally:
        if close:
            stream.close()
    for cfg, mu, sigma, l_a, field in fields:
        path = _field_path(out_path, cfg, mu, sigma, l_a)
        with open(path, "w", newline="\n") as fh:
            write_field_csv(field, sha, fh)
    return 0


def build_parser():
    ap = argparse.ArgumentParser(prog="splitspin",
                                 description="split spin-squeezed state toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("oat", help="write a twisted-state JSON file")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--out", default="-")
    p.set_defaults(fn=cmd_oat)

    p = sub.add_parser("split-info", help="splitting distribution and frame angle")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--out", default="-")
    p.set_defaults(fn=cmd_split_info)

    p = sub.add_parser("condition", help="herald a B state and write it as JSON")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--na", type=int, required=True)
    p.add_argument("--la", type=int, required=True)
    p.add_argument("--axis", default="zprime")
    p.add_argument("--out", default="-")
    p.set_defaults(fn=cmd_condition)

    p = sub.add_parser("qfi", help="QFI of a state file")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", default="-")
    p.set_defaults(fn=cmd_qfi)

    p = sub.add_parser("wigner", help="Wigner field CSV and negativity JSON")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--json-out", default=None)
    p.add_argument("--grid-theta", type=int, default=0)
    p.add_argument("--grid-phi", type=int, default=0)
    p.set_defaults(fn=cmd_wigner)

    p = sub.add_parser("sweep", help="run a sweep config or preset")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--config")
    g.add_argument("--preset", choices=PRESETS)
    p.add_argument("--out", default=None)
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(fn=cmd_sweep)
    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except HeraldError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
