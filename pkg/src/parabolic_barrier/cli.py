"""Command-line front end: ``ppb {energies,field,streamline,potentials,verify}``.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 the physics
says no (the requested potentials do not exist for this state).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import warnings
from dataclasses import dataclass

import numpy as np

from . import __version__
from . import eigenstates as es
from . import hydrodynamics as hd
from . import numgrid as ng
from . import verify as vf
from .errors import NoMonomialFit, NodalRegion, NotIrrotational, NotSolenoidal

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NEGATIVE = 0, 1, 2, 3
FORMATS = ("csv", "json")
FIELDS = ("psi", "density", "current", "velocity", "divergence", "vorticity")
NODAL = "nodal"
# where |exp(-iEt/ħ)| stays bounded; informational only, nothing is enforced
TIME_VALIDITY = {
    1: "t > 0",
    2: "t > 0 if nx > ny, t < 0 if nx < ny, all t if nx = ny",
    3: "t < 0 if nx > ny, t > 0 if nx < ny, all t if nx = ny",
    4: "t < 0",
}


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    params: es.PhysParams
    terms: list | None
    grid: ng.GridSpec
    tol: float
    fmt: str
    seed: int


def _fmt(v):
    if isinstance(v, str):
        return v
    return format(float(v), ".17g")


def _floats(text, n, what):
    try:
        vals = [float(t) for t in text.split(",")]
    except ValueError:
        raise UsageError(f"{what}: expected {n} comma-separated numbers, got {text!r}") from None
    if len(vals) != n:
        raise UsageError(f"{what}: expected {n} comma-separated numbers, got {text!r}")
    return vals


def _parse_term(text):
    """'c_re,c_im:type,nx,ny' -> (complex, StateLabel)."""
    try:
        coef, lab = text.split(":")
        c_re, c_im = _floats(coef, 2, "--term coefficient")
        t, nx, ny = (int(v) for v in lab.split(","))
        return complex(c_re, c_im), es.StateLabel.from_type(t, nx, ny)
    except UsageError:
        raise
    except ValueError as exc:
        raise UsageError(f"bad --term {text!r}: {exc}") from None


# -- argument parsing -----------------------------------------------------------

def _common_parser(top=False):
    """Global flags. They are accepted before or after the subcommand; the
    subcommand copies default to SUPPRESS so they never clobber earlier values."""
    c = argparse.ArgumentParser(add_help=False)

    def d(v):
        return v if top else argparse.SUPPRESS

    g = c.add_argument_group("physical parameters")
    g.add_argument("--hbar", type=float, default=d(1.0))
    g.add_argument("--mass", type=float, default=d(1.0))
    g.add_argument("--gamma", type=float, default=d(1.0))
    g.add_argument("--v0", type=float, default=d(0.0))
    o = c.add_argument_group("output")
    o.add_argument("--format", choices=FORMATS, default=d(None),
                   help="output format (default: $PPB_DEFAULT_FORMAT or csv)")
    o.add_argument("--out", metavar="PATH", default=d(None),
                   help="write to PATH instead of stdout")
    o.add_argument("--tol", type=float, default=d(1e-8), help="fit tolerance for potentials")
    o.add_argument("--seed", type=int, default=d(42), help="RNG seed for verify")
    return c


def _state_parser():
    s = argparse.ArgumentParser(add_help=False)
    g = s.add_argument_group(
        "state", "either a single eigenstate via --type/--nx/--ny, or a superposition "
                 "via repeated --term 'c_re,c_im:type,nx,ny'")
    g.add_argument("--type", type=int, choices=(1, 2, 3, 4), dest="state_type")
    g.add_argument("--nx", type=int, default=0)
    g.add_argument("--ny", type=int, default=0)
    g.add_argument("--term", action="append", default=[])
    return s


def _grid_parser(bounds):
    g = argparse.ArgumentParser(add_help=False)
    a = g.add_argument_group("grid")
    a.add_argument("--bounds", default=bounds, help=f"xmin,xmax,ymin,ymax (default {bounds})")
    a.add_argument("--res", default="21,21", help="NX,NY grid points (default 21,21)")
    return g


def build_parser():
    common = _common_parser()
    state = _state_parser()
    parser = argparse.ArgumentParser(
        prog="ppb", parents=[_common_parser(top=True)],
        description="Eigenstates and probability flows of the 2D parabolic barrier.",
        epilog="Negative values that start a list need '=', e.g. --bounds=-1,1,-1,1.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("energies", parents=[common], help="tabulate complex energies")
    p.add_argument("--type", type=int, choices=(1, 2, 3, 4), required=True, dest="state_type")
    p.add_argument("--n-max", type=int, required=True)

    p = sub.add_parser("field", parents=[common, state, _grid_parser("-2,2,-2,2")],
                       help="sample a field on a grid")
    p.add_argument("quantity", choices=FIELDS)

    p = sub.add_parser("streamline", parents=[common, state, _grid_parser("-2,2,-2,2")],
                       help="trace streamlines of the velocity field")
    p.add_argument("--start", action="append", default=[], metavar="X,Y",
                   help="seed point (repeatable)")
    p.add_argument("--step", type=float, default=1e-2, help="arc-length step")
    p.add_argument("--max-steps", type=int, default=1000)

    p = sub.add_parser("potentials", parents=[common, state, _grid_parser("0.5,2,0.5,2")],
                       help="extract velocity potential, stream function and W = A z^a")

    p = sub.add_parser("verify", parents=[common], help="run the verification suite")
    p.add_argument("--n-max", type=int, default=6)
    return parser


def _config(args, need_state=True) -> RunConfig:
    try:
        params = es.PhysParams(args.hbar, args.mass, args.gamma, args.v0)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    fmt = args.format or os.environ.get("PPB_DEFAULT_FORMAT", "csv")
    if fmt not in FORMATS:
        raise UsageError(f"unknown output format {fmt!r}")
    terms = None
    if need_state:
        if args.term:
            terms = [_parse_term(t) for t in args.term]
        elif args.state_type is not None:
            if args.nx < 0 or args.ny < 0:
                raise UsageError("--nx and --ny must be non-negative")
            terms = [(1.0, es.StateLabel.from_type(args.state_type, args.nx, args.ny))]
        else:
            raise UsageError("a state is required: --type T [--nx N --ny M] or --term ...")
    grid = None
    if hasattr(args, "bounds"):
        b = _floats(args.bounds, 4, "--bounds")
        try:
            r = [int(v) for v in args.res.split(",")]
        except ValueError:
            raise UsageError(f"--res: expected NX,NY integers, got {args.res!r}") from None
        if len(r) != 2:
            raise UsageError(f"--res: expected NX,NY integers, got {args.res!r}")
        try:
            grid = ng.GridSpec(*b, *r)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    if not (args.tol > 0):
        raise UsageError("--tol must be positive")
    return RunConfig(params, terms, grid, args.tol, fmt, args.seed)


def _state(cfg: RunConfig):
    if len(cfg.terms) == 1 and cfg.terms[0][0] == 1.0:
        return es.build_state(cfg.terms[0][1], cfg.params)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            return es.superpose(cfg.terms, cfg.params)
    except es.RepresentationMismatch as exc:
        raise UsageError(str(exc)) from None


# -- output -----------------------------------------------------------------------

class Writer:
    """Collects rows and emits CSV or the JSON envelope {meta, data}."""

    def __init__(self, cfg_fmt, params, command, header):
        self.fmt = cfg_fmt
        self.params = params
        self.command = command
        self.header = header
        self.rows = []
        self.records = []
        self.trailer = []
        self.extra_meta = {}

    def add(self, csv_row, record):
        self.rows.append(csv_row)
        self.records.append(record)

    def render(self) -> str:
        if self.fmt == "csv":
            buf = io.StringIO()
            wr = csv.writer(buf, lineterminator="\n")
            wr.writerow(self.header)
            for r in self.rows:
                wr.writerow([_fmt(v) for v in r])
            for line in self.trailer:
                buf.write(f"# {line}\n")
            return buf.getvalue()
        p = self.params
        meta = {"params": {"hbar": p.hbar, "mass": p.mass, "gamma": p.gamma, "v0": p.v0},
                "command": self.command, "version": __version__}
        meta.update(self.extra_meta)
        return json.dumps({"meta": meta, "data": self.records}, indent=1, allow_nan=False) + "\n"


def _emit(text, out):
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _pair(z):
    return [float(np.real(z)) + 0.0, float(np.imag(z)) + 0.0]


# -- commands -----------------------------------------------------------------------

def cmd_energies(args):
    cfg = _config(args, need_state=False)
    if args.n_max < 0:
        raise UsageError("--n-max must be non-negative")
    t = args.state_type
    wr = Writer(cfg.fmt, cfg.params, "energies",
                ["nx", "ny", "E_re", "E_im", "flow_class", "degeneracy"])
    for level in range(args.n_max + 1):
        for nx in range(level + 1):
            ny = level - nx
            lab = es.StateLabel.from_type(t, nx, ny)
            E = es.energy(lab, cfg.params)
            deg = es.degeneracy(t, level)
            deg_s = "inf" if math.isinf(deg) else str(deg)
            cls = es.classify_flow(lab).value
            wr.add([str(nx), str(ny), E.real, E.imag + 0.0, cls, deg_s],
                   {"nx": nx, "ny": ny, "E": _pair(E), "flow_class": cls,
                    "degeneracy": deg_s if math.isinf(deg) else deg})
    wr.extra_meta["time_validity"] = TIME_VALIDITY[t]
    wr.trailer.append(f"time_validity={TIME_VALIDITY[t]}")
    return cfg, wr, EXIT_OK


_FIELD_COLUMNS = {
    "psi": ["psi_re", "psi_im"],
    "density": ["density"],
    "current": ["current_x", "current_y"],
    "velocity": ["velocity_x", "velocity_y"],
    "divergence": ["divergence"],
    "vorticity": ["vorticity"],
}


def cmd_field(args):
    cfg = _config(args)
    w = _state(cfg)
    p = cfg.params
    q = args.quantity
    eps = hd.region_node_threshold(w, cfg.grid)
    fn = {
        "psi": lambda x, y: w(x, y),
        "density": lambda x, y: hd.density(w, x, y),
        "current": lambda x, y: hd.current(w, p, x, y),
        "velocity": lambda x, y: hd.velocity(w, p, x, y, eps),
        "divergence": lambda x, y: hd.divergence(w, p, x, y, eps),
        "vorticity": lambda x, y: hd.vorticity(w, p, x, y, eps),
    }[q]
    s = ng.sample_grid(fn, cfg.grid)
    cols = _FIELD_COLUMNS[q]
    wr = Writer(cfg.fmt, p, f"field {q}", ["x", "y", *cols])
    for i in range(s.x.size):
        x, y = float(s.x[i]), float(s.y[i])
        if s.nodal[i]:
            wr.add([x, y, *([NODAL] * len(cols))], {"x": x, "y": y, q: NODAL})
            continue
        v = s.values[i]
        if q == "psi":
            vals = [v.real, v.imag]
            rec = _pair(v)
        elif len(cols) == 2:
            vals = [v[0], v[1]]
            rec = [float(v[0]), float(v[1])]
        else:
            vals = [v]
            rec = float(v)
        wr.add([x, y, *vals], {"x": x, "y": y, q: rec})
    return cfg, wr, EXIT_OK


def cmd_streamline(args):
    cfg = _config(args)
    if not args.start:
        raise UsageError("at least one --start X,Y seed is required")
    if args.step <= 0 or args.max_steps < 1:
        raise UsageError("--step must be positive and --max-steps at least 1")
    seeds = [tuple(_floats(s, 2, "--start")) for s in args.start]
    w = _state(cfg)
    p = cfg.params
    eps = hd.region_node_threshold(w, cfg.grid)
    V = lambda x, y: hd.velocity(w, p, x, y, eps)  # noqa: E731
    wr = Writer(cfg.fmt, p, "streamline", ["streamline_id", "point_index", "x", "y"])
    lines_meta = []
    produced = 0
    for sid, seed in enumerate(seeds):
        info = {"streamline_id": sid, "seed": list(seed)}
        try:
            line = ng.integrate_streamline(V, seed, args.step, args.max_steps, cfg.grid)
        except NodalRegion:
            info["error"] = "NodalRegion"
        except ValueError as exc:
            info["error"] = str(exc)
        else:
            produced += 1
            info["terminated_by"] = line.terminated_by.value
            info["n_points"] = len(line.points)
            for k, (x, y) in enumerate(line.points):
                wr.add([str(sid), str(k), x, y],
                       {"streamline_id": sid, "point_index": k, "x": float(x), "y": float(y)})
        lines_meta.append(info)
        status = info.get("terminated_by") or "error=" + info["error"]
        wr.trailer.append(f"streamline {sid} seed={_fmt(seed[0])},{_fmt(seed[1])} "
                          + (f"terminated_by={status}" if "terminated_by" in info else status))
    wr.extra_meta["streamlines"] = lines_meta
    if produced == 0:
        sys.stderr.write("no streamline could be started from the given seeds\n")
        return cfg, wr, EXIT_USAGE
    return cfg, wr, EXIT_OK


def cmd_potentials(args):
    cfg = _config(args)
    w = _state(cfg)
    p = cfg.params
    wr = Writer(cfg.fmt, p, "potentials", ["x", "y", "phi", "psi"])
    try:
        pair = hd.extract_potentials(w, p, cfg.grid)
        cp = hd.fit_corner_potential(pair, tol=cfg.tol)
    except NodalRegion:
        raise UsageError("the region touches a nodal line of the state; pick a region "
                         "avoiding nodes") from None
    except (NotIrrotational, NotSolenoidal, NoMonomialFit) as exc:
        kind = type(exc).__name__
        viol = getattr(exc, "violation", None)
        if viol is None:
            viol = exc.residual
        wr.header = ["diagnosis", "violation", "violation_over_gamma"]
        wr.add([kind, viol, viol / p.gamma],
               {"diagnosis": kind, "violation": viol, "violation_over_gamma": viol / p.gamma})
        wr.trailer.append(str(exc))
        return cfg, wr, EXIT_NEGATIVE
    wr.extra_meta["fit"] = {"A": _pair(cp.A), "a": cp.a, "residual": cp.residual,
                            "anchor": list(pair.anchor)}
    wr.trailer.append(f"fit A={_fmt(cp.A.real)},{_fmt(cp.A.imag)} a={cp.a} "
                      f"residual={_fmt(cp.residual)}")
    for x, y, f, s in zip(pair.x.ravel(), pair.y.ravel(), pair.phi.ravel(), pair.psi.ravel()):
        wr.add([x, y, f, s], {"x": float(x), "y": float(y), "phi": float(f), "psi": float(s)})
    return cfg, wr, EXIT_OK


def cmd_verify(args):
    cfg = _config(args, need_state=False)
    if args.n_max < 0:
        raise UsageError("--n-max must be non-negative")
    results = vf.run_all(cfg.params, n_max=args.n_max, seed=cfg.seed)
    wr = Writer(cfg.fmt, cfg.params, "verify", ["check", "status", "detail"])
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        wr.add([r.name, status, r.detail.replace(",", ";")], {"check": r.name, "passed": r.passed, "detail": r.detail})
    n_ok = sum(r.passed for r in results)
    wr.trailer.append(f"{n_ok}/{len(results)} checks passed")
    wr.extra_meta["summary"] = {"passed": n_ok, "total": len(results)}
    return cfg, wr, EXIT_OK if n_ok == len(results) else EXIT_FAIL


COMMANDS = {
    "energies": cmd_energies,
    "field": cmd_field,
    "streamline": cmd_streamline,
    "potentials": cmd_potentials,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg, wr, code = COMMANDS[args.command](args)
    except UsageError as exc:
        sys.stderr.write(f"ppb {args.command}: error: {exc}\n")
        return EXIT_USAGE
    _emit(wr.render(), args.out)
    return code


if __name__ == "__main__":
    sys.exit(main())
