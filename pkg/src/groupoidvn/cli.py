"""Command-line interface: ``groupoidvn <command> [options]``.

Exit status: 0 success, 1 invalid input or a failed check, 2 a violated
precondition (restart, stabilizer, non-disjoint chains), 3 a resource
limit (cap, window, catalog range).  Reports are written only after the
computation finished, so a failing run leaves no partial files.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from .exactnum import Interval, binary_digits, format_rational, parse_rational, to_decimal
from .groupoid import StabilizerDetected, TooLarge, UndecidedVertex, orbit_diagram
from .percolation import (CatalogLimit, PercModel, WindowTooSmall, complement_mass, lnw_partial,
                          mc_estimate, z_closed_form)
from .pontryagin import (GroupRingExpr, ParseError, UnsupportedAtom, formal_trace, gz_element,
                         lamp_space, parse_expr, to_sexpr, translate)
from .space import NeedsRefinement, SymbolicConfig, parse_cylinder, parse_sigma
from .tds import (InvalidSystem, RestartDetected, TuringSystem, check_disjoint_chains,
                  check_no_restart, explore, load_system, omega1_bounds, omega_x_exact,
                  omega_y_partial, stopping_mass, validate_fundamental_set, x_chain_steps,
                  x_fundamental_family, y_chain_steps, y_fundamental_family)
from .vndim import (PreconditionFailed, VnReport, gz_closed_form, kernel_dim_report, pipeline_gz,
                    tds_edges, tds_tags, tds_vn_report, vn_moments)

EXIT_OK, EXIT_INPUT, EXIT_PRECONDITION, EXIT_RESOURCE = 0, 1, 2, 3

DEFAULT_DEPTH = 200
DEFAULT_WINDOW = 400
DEFAULT_CAP = 10_000
DEFAULT_CLASS_FLOOR = Fraction(1, 2 ** 30)
DEFAULT_STOP_FLOOR = Fraction(1, 2 ** 80)


class UsageError(ValueError):
    pass


# --------------------------------------------------------------------------
# report encoding

def encode(x, digits: int = 20):
    """JSON-ready tree; rationals become ``"p/q"`` strings with a decimal rendering."""
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return {"type": "rational", "value": format_rational(x), "decimal": to_decimal(x, digits)}
    if isinstance(x, Interval):
        return {"type": "interval", "lo": encode(x.lo, digits), "hi": encode(x.hi, digits),
                "width": encode(x.width, digits)}
    if isinstance(x, float):
        return {"type": "float", "value": repr(x)}
    if isinstance(x, VnReport):
        return {"type": "vn_report", "quantity": x.quantity, "value": encode(x.value, digits),
                "classes_used": x.classes_used, "residual_mass": encode(x.residual_mass, digits),
                "cross_checks": [[n, bool(ok)] for n, ok in x.cross_checks],
                "passed": x.passed,
                "extra": {k: encode(v, digits) for k, v in x.extra.items()}}
    if isinstance(x, dict):
        return {str(k): encode(v, digits) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [encode(v, digits) for v in x]
    raise TypeError(f"cannot encode {type(x).__name__}")


def decode(x):
    """Inverse of :func:`encode` (decimal renderings are dropped)."""
    if isinstance(x, list):
        return [decode(v) for v in x]
    if not isinstance(x, dict):
        return x
    kind = x.get("type")
    if kind == "rational":
        return parse_rational(x["value"])
    if kind == "interval":
        return Interval(decode(x["lo"]), decode(x["hi"]))
    if kind == "float":
        return float(x["value"])
    if kind == "vn_report":
        return VnReport(x["quantity"], decode(x["value"]), x["classes_used"],
                        decode(x["residual_mass"]), [tuple(c) for c in x["cross_checks"]],
                        {k: decode(v) for k, v in x["extra"].items()})
    return {k: decode(v) for k, v in x.items()}


def to_json(x, digits: int = 20) -> str:
    return json.dumps(encode(x, digits), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def from_json(text: str):
    return decode(json.loads(text))


def _text_value(v, digits) -> str:
    if isinstance(v, Fraction):
        return f"{format_rational(v)}  (~{to_decimal(v, digits)})"
    if isinstance(v, Interval):
        return (f"[{format_rational(v.lo)}, {format_rational(v.hi)}]  "
                f"(~[{to_decimal(v.lo, digits)}, {to_decimal(v.hi, digits)}], "
                f"width {to_decimal(v.width, digits)})")
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, dict):
        return ", ".join(f"{k}={_text_value(e, digits)}" for k, e in v.items())
    if isinstance(v, (list, tuple)) and v and not isinstance(v[0], (str, int, bool)):
        return "\n" + "\n".join(f"    - {_text_value(e, digits)}" for e in v)
    return str(v)


def to_text(x, digits: int = 20) -> str:
    if isinstance(x, VnReport):
        lines = [f"quantity: {x.quantity}",
                 f"value: {_text_value(x.value, digits)}",
                 f"classes used: {x.classes_used}",
                 f"residual mass: {_text_value(x.residual_mass, digits)}"]
        for name, ok in x.cross_checks:
            lines.append(f"check {'PASS' if ok else 'FAIL'}: {name}")
        for k, v in x.extra.items():
            lines.append(f"{k}: {_text_value(v, digits)}")
        return "\n".join(lines) + "\n"
    if isinstance(x, dict):
        return "".join(f"{k}: {_text_value(v, digits)}\n" for k, v in x.items())
    return f"{_text_value(x, digits)}\n"


def emit_report(report, fmt: str = "json", path: Optional[str] = None, digits: int = 20) -> str:
    """Render ``report`` as JSON or text; write it to ``path`` when given."""
    if fmt == "json":
        out = to_json(report, digits)
    elif fmt == "text":
        out = to_text(report, digits)
    else:
        raise UsageError(f"unknown format {fmt!r}")
    if path:
        Path(path).write_text(out, encoding="utf-8")
    return out


def exploration_summary(res, chains: bool = True) -> dict:
    d = {
        "depth": res.depth,
        "start_mass": res.start_mass,
        "accepted_mass": res.accepted_mass,
        "rejected_mass": res.rejected_mass,
        "unresolved_mass": res.unresolved_mass,
        "accepted_chains": len(res.accepted),
        "unresolved_pieces": len(res.unresolved),
        "ledger_ok": res.ledger_ok(),
    }
    if chains:
        d["chains"] = [{"initial": a.initial.text(), "steps": a.steps} for a in res.accepted]
    return d


# --------------------------------------------------------------------------
# argument helpers

def _rational_arg(text: str) -> Fraction:
    """``0``, ``p/q`` or ``2^-k``."""
    t = text.strip().replace("**", "^")
    try:
        if t.startswith("2^"):
            e = int(t[2:])
            return Fraction(2) ** e
        return parse_rational(t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an exact rational: {text!r}") from None


def _depths_arg(text: str) -> list:
    try:
        out = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad depth list {text!r}") from None
    if not out or any(d < 0 for d in out):
        raise argparse.ArgumentTypeError("depths must be non-negative integers")
    return out


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def _nonneg(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return v


def _threads() -> int:
    raw = os.environ.get("VNDIM_THREADS")
    if raw is None:
        return 1
    try:
        v = int(raw)
    except ValueError:
        raise UsageError(f"VNDIM_THREADS must be a positive integer, got {raw!r}") from None
    if v < 1:
        raise UsageError("VNDIM_THREADS must be at least 1")
    return v


def _load_system(args) -> TuringSystem:
    sigma = parse_sigma(args.sigma) if getattr(args, "sigma", None) else None
    return load_system(args.system, sigma)


def _load_expr(spec: str, p: int) -> GroupRingExpr:
    if spec == "builtin:gz":
        return gz_element()
    path = Path(spec)
    text = path.read_text(encoding="utf-8") if path.exists() else spec
    return parse_expr(text, p)


def _builtin_kind(args, sys_: TuringSystem) -> Optional[str]:
    return {"builtin:x": "x", "builtin:y": "y"}.get(args.system)


# --------------------------------------------------------------------------
# commands

def _omega_reference(kind, sys_: TuringSystem, k_max: int):
    """Exact reference value of the first fundamental value where one is known."""
    if kind == "y":
        return omega_y_partial(k_max), f"series truncated at k={k_max}"
    if kind == "x" and sys_.sigma is not None:
        spec = sys_.sigma.spec()
        if spec == "evens":
            return Fraction(1, 768), "closed form over the evens"
        if spec == "all":
            return Fraction(1, 256), "closed form over all positive integers"
        if spec == "none" or spec.startswith("list:") or spec.startswith("file:"):
            return omega_x_exact(sys_.sigma.values if hasattr(sys_.sigma, "values") else []), "finite flip set"
    return None, None


def cmd_tds(args):
    sys_ = _load_system(args)
    sys_.validate()
    kind = _builtin_kind(args, sys_)
    if args.action == "explore":
        start = [sys_.space.whole()] if args.start == "whole" else sys_.set_cylinders("I")
        res = explore(sys_, start, args.depth, args.mass_floor, args.window)
        return exploration_summary(res), True
    if args.action == "omega":
        res = explore(sys_, sys_.set_cylinders("I"), args.depth, args.mass_floor, args.window)
        omega = omega1_bounds(sys_, args.depth, result=res)
        out = {"omega1": omega, "accepted_chains": len(res.accepted), "depth": args.depth}
        ref, why = _omega_reference(kind, sys_, args.k_max)
        if ref is not None:
            out["reference"] = ref
            out["reference_kind"] = why
            out["binary_digits_lo"] = "".join(map(str, binary_digits(omega.lo, args.binary_digits)))
        return out, True
    if args.action == "check":
        nr = check_no_restart(sys_)
        if not nr:
            raise RestartDetected(nr.message)
        res = explore(sys_, sys_.set_cylinders("I"), args.depth, args.mass_floor, args.window)
        dc = check_disjoint_chains(res)
        masses = {}
        for d in args.stopping_depths:
            masses[str(d)] = stopping_mass(sys_, d, args.stopping_floor, args.window)
        vals = [masses[str(d)] for d in sorted(args.stopping_depths)]
        mono = all(a >= b for a, b in zip(vals, vals[1:]))
        out = {
            "partition": "ok",
            "no_restart": bool(nr), "no_restart_message": nr.message,
            "disjoint_chains": bool(dc), "disjoint_message": dc.message,
            "accepted_chains": len(res.accepted),
            "stopping_mass": masses,
            "stopping_floor": args.stopping_floor,
            "stopping_monotone": mono,
        }
        return out, bool(dc) and mono
    if args.action == "validate":
        if kind is None:
            raise UsageError("validate needs a builtin system (builtin:x or builtin:y)")
        if kind == "x":
            members = sys_.sigma.members(args.k_max) if sys_.sigma is not None else []
            expected = [x_fundamental_family(k) for k in members]
            depth = args.depth if args.depth_given else x_chain_steps(args.k_max)
        else:
            expected = [y_fundamental_family(k) for k in range(1, args.k_max + 1)]
            depth = args.depth if args.depth_given else y_chain_steps(args.k_max)
        res = explore(sys_, sys_.set_cylinders("I"), depth, args.mass_floor, args.window)
        verdict = validate_fundamental_set(sys_, expected, depth, result=res)
        out = {"passed": bool(verdict), "message": verdict.message, "depth": depth,
               "k_max": args.k_max, "expected_cylinders": len(expected),
               "accepted_chains": len(res.accepted), "accepted_mass": res.accepted_mass}
        return out, bool(verdict)
    raise UsageError(f"unknown tds action {args.action!r}")


def cmd_vndim(args):
    if (args.system is None) == (args.expr is None):
        raise UsageError("give exactly one of --system or --expr")
    floor = args.mass_floor if args.mass_floor is not None else DEFAULT_CLASS_FLOOR
    if args.expr is not None:
        T = translate(_load_expr(args.expr, args.p))
        rep = kernel_dim_report(T, window=args.window, cap=args.cap, mass_floor=floor)
        rep.extra.update({"window": args.window, "mass_floor": floor})
        return rep, rep.passed
    sys_ = _load_system(args)
    sys_.validate()
    rep = tds_vn_report(sys_, args.depth, args.window, args.cap, floor, args.explore_floor)
    rep.extra["mass_floor"] = floor
    rep.extra["explore_floor"] = args.explore_floor
    kind = _builtin_kind(args, sys_)
    ref, why = _omega_reference(kind, sys_, args.k_max)
    if ref is not None:
        mu_i = sys_.measure_of("I")
        target = mu_i - ref
        rep.extra["reference"] = target
        rep.extra["reference_kind"] = f"mu(I) minus {why}"
        if kind == "y":
            # dropped series terms k > k_max sum to less than twice the first one
            k = args.k_max + 1
            tail = Fraction(2, 8 * 2 ** (k * k + 4 * k + 6))
            near = rep.value.widen(0, tail)
            rep.extra["reference_tail"] = tail
            rep.cross_checks.append((f"value within the truncation tail of the k<={args.k_max} reference",
                                     target in near))
        else:
            rep.cross_checks.append(("value contains the exact reference", target in rep.value))
    return rep, rep.passed


def cmd_moments(args):
    expr = _load_expr(args.expr, args.p)
    T = translate(expr)
    ms = vn_moments(T, args.n, window=args.window, cap=args.cap, mass_floor=args.mass_floor)
    out = {"expr": to_sexpr(expr.tree), "window": args.window, "norm_bound": T.norm_bound,
           "moments": {}}
    ok = True
    for n in range(args.n + 1):
        entry = {"interval": ms[n]}
        if not args.no_oracle:
            ft = formal_trace(expr ** n)
            entry["formal_trace"] = ft
            entry["contains_formal_trace"] = ft in ms[n]
            ok = ok and ft in ms[n]
        out["moments"][str(n)] = entry
    return out, ok


def cmd_gz(args):
    rep = pipeline_gz(args.window, args.cap)
    rep.extra["closed_form"] = gz_closed_form()
    return rep, rep.passed


def cmd_percolation(args):
    model = PercModel(args.group, args.p)
    part, tail = lnw_partial(model, args.n_max, exact=not args.fast_kernels)
    out = {"group": args.group, "p": args.p, "n_max": args.n_max, "partial": part,
           "tail": tail if tail is not None else "unavailable"}
    ok = True
    if tail is not None:
        out["enclosure"] = Interval(part, part + tail)
    if args.group == "z":
        cf = z_closed_form(model.q)
        out["closed_form"] = cf
        out["closed_form_enclosed"] = part <= cf <= part + tail
        ok = out["closed_form_enclosed"]
    if args.include_complement:
        out["complement_mass"] = complement_mass(model)
        out["partial_with_complement"] = part + complement_mass(model)
    if args.mc_samples:
        mean, se, frac = mc_estimate(model, args.mc_samples, args.mc_window, args.seed)
        out["mc"] = {"samples": args.mc_samples, "seed": args.seed, "window": args.mc_window,
                     "mean": mean, "standard_error": se, "flagged_fraction": frac}
        if args.group == "z":
            dev = abs(mean - float(out["closed_form"]))
            out["mc"]["within_3se"] = dev <= 3 * se
    return out, ok


def cmd_translate(args):
    expr = _load_expr(args.expr, args.p)
    T = translate(expr)
    terms = [{"coefficient": c, "word": e.label(), "domain": e.domain.text() or "X"}
             for c, e in T.terms]
    return {"expr": to_sexpr(expr.tree), "p": expr.p, "n_tapes": expr.n_tapes,
            "norm_bound": T.norm_bound, "terms": terms}, True


def cmd_schreier(args):
    if args.edges.startswith("builtin:") and args.edges != "builtin:gz" or args.edges.endswith(".json"):
        sys_ = load_system(args.edges, parse_sigma(args.sigma) if args.sigma else None)
        space, edges, tags = sys_.space, tds_edges(sys_), tds_tags(sys_)
    else:
        expr = _load_expr(args.edges, args.p)
        T = translate(expr)
        space, edges, tags = lamp_space(expr.p, expr.n_tapes), T.edges(), {}
    seed = parse_cylinder(space, args.seed)
    try:
        d = orbit_diagram(SymbolicConfig(seed), edges, args.cap, tags)
    except NeedsRefinement as exc:
        raise UsageError(f"seed does not decide every edge domain along its orbit ({exc}); "
                         "constrain more cells in --seed") from None
    dot = d.to_dot()
    out = {"vertices": len(d), "edges": len(d.edges), "seed": seed.text(),
           "tags": {name: len(d.tagged(name)) for name in sorted(tags)}}
    return out, True, dot


# --------------------------------------------------------------------------
# parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--report", "-o", metavar="PATH", help="write the report here (default stdout)")
    common.add_argument("--digits", type=_positive, default=20, help="decimal digits in renderings")

    limits = argparse.ArgumentParser(add_help=False)
    limits.add_argument("--depth", type=_nonneg, default=None,
                        help=f"exploration depth (default {DEFAULT_DEPTH})")
    limits.add_argument("--window", type=_positive, default=None,
                        help=f"tape window (default {DEFAULT_WINDOW}, 40 for gz and moments)")
    limits.add_argument("--cap", type=_positive, default=DEFAULT_CAP, help="max diagram size")

    ap = argparse.ArgumentParser(prog="groupoidvn", description=__doc__.splitlines()[0])
    ap.add_argument("--config", metavar="JSON", help="read command and options from a JSON file")
    sub = ap.add_subparsers(dest="command")

    t = sub.add_parser("tds", parents=[common, limits], help="Turing dynamical systems")
    t.add_argument("action", choices=("explore", "omega", "check", "validate"))
    t.add_argument("--system", required=True, help="builtin:x | builtin:y | config.json")
    t.add_argument("--sigma", help="flip set: none|all|evens|primes|list:1,2|file:PATH")
    t.add_argument("--k-max", type=_positive, default=6)
    t.add_argument("--mass-floor", type=_rational_arg, default=Fraction(0))
    t.add_argument("--start", choices=("I", "whole"), default="I")
    t.add_argument("--stopping-depths", type=_depths_arg, default=[25, 50, 100, 200])
    t.add_argument("--stopping-floor", type=_rational_arg, default=DEFAULT_STOP_FLOOR)
    t.add_argument("--binary-digits", type=_positive, default=96)

    v = sub.add_parser("vndim", parents=[common, limits], help="von Neumann kernel dimension")
    v.add_argument("--system")
    v.add_argument("--sigma")
    v.add_argument("--expr", help="group-ring s-expression, file or builtin:gz")
    v.add_argument("--p", type=int, default=2)
    v.add_argument("--k-max", type=_positive, default=6)
    v.add_argument("--mass-floor", type=_rational_arg, default=None,
                   help="class enumeration floor (default 2^-30)")
    v.add_argument("--explore-floor", type=_rational_arg, default=Fraction(0))

    m = sub.add_parser("moments", parents=[common, limits], help="spectral moments")
    m.add_argument("--expr", default="builtin:gz")
    m.add_argument("--p", type=int, default=2)
    m.add_argument("--n", type=_nonneg, default=8)
    m.add_argument("--mass-floor", type=_rational_arg, default=Fraction(0))
    m.add_argument("--no-oracle", action="store_true", help="skip the formal trace comparison")

    sub.add_parser("gz", parents=[common, limits], help="lamplighter kernel dimension")

    pc = sub.add_parser("percolation", parents=[common], help="animal sums")
    pc.add_argument("--group", choices=("z", "z2"), default="z")
    pc.add_argument("--p", type=int, default=2)
    pc.add_argument("--n-max", type=_nonneg, default=None, help="default 30 on Z, 12 on Z^2")
    pc.add_argument("--mc-samples", type=_nonneg, default=0)
    pc.add_argument("--mc-window", type=_positive, default=30)
    pc.add_argument("--seed", type=int, default=0)
    pc.add_argument("--include-complement", action="store_true")
    pc.add_argument("--fast-kernels", action="store_true",
                    help="Z^2 kernels from certified eigenvalue counts")

    tr = sub.add_parser("translate", parents=[common], help="group ring to groupoid ring")
    tr.add_argument("--expr", required=True)
    tr.add_argument("--p", type=int, default=2)

    s = sub.add_parser("schreier", parents=[common], help="orbit diagram of a seed cylinder")
    s.add_argument("--seed", required=True, help="e.g. 'tape0[0]=1; state=Start'")
    s.add_argument("--edges", required=True, help="builtin:x|builtin:y|system.json|expression")
    s.add_argument("--sigma")
    s.add_argument("--p", type=int, default=2)
    s.add_argument("--cap", type=_positive, default=DEFAULT_CAP)
    s.add_argument("--dot", metavar="PATH")
    return ap


_COMMANDS = {"tds": cmd_tds, "vndim": cmd_vndim, "moments": cmd_moments, "gz": cmd_gz,
             "percolation": cmd_percolation, "translate": cmd_translate, "schreier": cmd_schreier}

_POSITIONAL = {"tds": ("action",)}


def config_to_argv(cfg: dict, parser: argparse.ArgumentParser) -> list:
    """Turn a JSON run config into argv; unknown keys are rejected."""
    if not isinstance(cfg, dict) or "command" not in cfg:
        raise UsageError("config must be an object with a 'command' key")
    cmd = cfg["command"]
    if cmd not in _COMMANDS:
        raise UsageError(f"unknown command {cmd!r}")
    subp = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction)).choices[cmd]
    known = {a.dest: a for a in subp._actions if a.dest != "help"}
    argv = [cmd]
    for name in _POSITIONAL.get(cmd, ()):
        if name not in cfg:
            raise UsageError(f"config for {cmd!r} needs {name!r}")
        argv.append(str(cfg[name]))
    for key, val in cfg.items():
        if key == "command" or key in _POSITIONAL.get(cmd, ()):
            continue
        dest = key.replace("-", "_")
        if dest not in known:
            raise UsageError(f"unknown config key {key!r} for {cmd!r}")
        flag = known[dest].option_strings[-1] if known[dest].option_strings else None
        flag = next((o for o in known[dest].option_strings if o.startswith("--")), flag)
        if isinstance(known[dest], argparse._StoreTrueAction):
            if val:
                argv.append(flag)
            continue
        if isinstance(val, list):
            val = ",".join(str(x) for x in val)
        argv.extend([flag, str(val)])
    return argv


@dataclass
class RunConfig:
    command: str
    options: dict = field(default_factory=dict)

    def argv(self) -> list:
        return config_to_argv({"command": self.command, **self.options}, build_parser())


def _finalize(args):
    if hasattr(args, "depth"):
        args.depth_given = args.depth is not None
        if args.depth is None:
            args.depth = DEFAULT_DEPTH
    if hasattr(args, "window") and args.window is None:
        args.window = 40 if args.command in ("gz", "moments") else DEFAULT_WINDOW
    if args.command == "percolation" and args.n_max is None:
        args.n_max = 30 if args.group == "z" else 12


def run(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        if args.config:
            if args.command:
                raise UsageError("use either --config or a command, not both")
            cfg = json.loads(Path(args.config).read_text(encoding="utf-8"))
            try:
                args = parser.parse_args(config_to_argv(cfg, parser))
            except SystemExit:
                return EXIT_INPUT
        if not args.command:
            parser.print_usage(stderr)
            return EXIT_INPUT
        _threads()
        _finalize(args)
        result = _COMMANDS[args.command](args)
        report, ok = result[0], result[1]
        out = emit_report(report, args.format, None, args.digits)
        if args.report:
            Path(args.report).write_text(out, encoding="utf-8")
        else:
            stdout.write(out)
        if args.command == "schreier" and args.dot:
            Path(args.dot).write_text(result[2], encoding="utf-8")
        return EXIT_OK if ok else EXIT_PRECONDITION
    except (RestartDetected, PreconditionFailed, StabilizerDetected) as exc:
        print(f"precondition failed: {exc}", file=stderr)
        return EXIT_PRECONDITION
    except (TooLarge, WindowTooSmall, CatalogLimit, UndecidedVertex, RecursionError) as exc:
        print(f"resource limit: {exc}", file=stderr)
        return EXIT_RESOURCE
    except (UsageError, InvalidSystem, ParseError, UnsupportedAtom, ValueError, OSError,
            json.JSONDecodeError, KeyError) as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_INPUT


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
