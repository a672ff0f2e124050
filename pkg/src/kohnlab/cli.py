"""kohnlab command line: read a domain spec, run one analysis, write a JSON report."""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import yaml

from . import boundary, dangelo, kohn, multitype
from .forms import default_pivot, levi_rank_at
from .gallery import GALLERY, get_model
from .poly import CPoint, HPoly, PolySyntaxError, evaluate, format_number, parse_number, parse_poly

EXIT_OK, EXIT_VIOLATION, EXIT_UNDETERMINED = 0, 1, 2
CAP_KEYS = ("list_len", "curve_degree", "radical_exponent", "max_steps")
SPEC_KEYS = {"name", "n", "q", "defining_function", "base_point", "caps", "sample_points", "t"}


class SpecError(ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.message, self.line, self.column = message, line, column
        where = f"line {line}, column {column}: " if line is not None else ""
        super().__init__(where + message)


@dataclass(frozen=True)
class DomainSpec:
    n: int
    q: int
    defining_function: HPoly
    base_point: CPoint
    caps: dict
    sample_points: tuple = ()
    t: Fraction | None = None
    t_source: str = "spec"
    name: str = ""
    text: str = ""

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "n": self.n,
            "q": self.q,
            "defining_function": str(self.defining_function),
            "base_point": self.base_point.to_json(),
            "t": None if self.t is None else str(self.t),
            "t_source": self.t_source,
            "caps": dict(self.caps),
        }


def _mark(node) -> tuple[int, int]:
    return node.start_mark.line + 1, node.start_mark.column + 1


def _key_marks(root) -> dict:
    marks = {}
    if isinstance(root, yaml.MappingNode):
        for k, v in root.value:
            marks[k.value] = (v, _mark(v))
    return marks


def _coord(value, where) -> object:
    if isinstance(value, float):
        raise SpecError("coordinates must be exact (write 1/2, not 0.5)", *where)
    try:
        return parse_number(str(value))
    except (ValueError, PolySyntaxError) as exc:
        raise SpecError(f"bad coordinate {value!r}: {exc}", *where) from None


def _point(value, n: int, where) -> CPoint:
    if not isinstance(value, list) or len(value) != n:
        raise SpecError(f"a point needs {n} coordinates", *where)
    return CPoint(tuple(_coord(c, where) for c in value))


def default_caps(t: Fraction, n: int, q: int) -> dict:
    jump = multitype.type_jump_bound(t, n, q)
    return {
        "list_len": math.ceil(jump),
        "curve_degree": 2 * math.ceil(jump),
        "radical_exponent": 2 * math.ceil(t) ** (n - q),
        "max_steps": 2 * n,
    }


def build_spec(data: dict, marks: dict | None = None) -> DomainSpec:
    marks = marks or {}

    def where(key):
        return marks.get(key, (None, (None, None)))[1]

    if not isinstance(data, dict):
        raise SpecError("the spec must be a mapping")
    unknown = sorted(set(data) - SPEC_KEYS)
    if unknown:
        raise SpecError(f"unknown keys: {', '.join(unknown)}", *where(unknown[0]))
    for key in ("n", "defining_function", "base_point"):
        if key not in data:
            raise SpecError(f"missing required key {key!r}")
    n, q = data["n"], data.get("q", 1)
    if not isinstance(n, int) or n < 2:
        raise SpecError("n must be an integer >= 2", *where("n"))
    if not isinstance(q, int) or not 1 <= q < n:
        raise SpecError("q must be an integer with 1 <= q < n", *where("q"))
    text = str(data["defining_function"])
    try:
        r = parse_poly(text, n)
    except PolySyntaxError as exc:
        line, col = where("defining_function")
        col = None if col is None else col + (exc.column or 0)
        raise SpecError(str(exc), line, col) from None
    except ValueError as exc:
        raise SpecError(str(exc), *where("defining_function")) from None
    if not r.is_real_valued():
        raise SpecError("defining function not real-valued", *where("defining_function"))
    x = _point(data["base_point"], n, where("base_point"))
    v = evaluate(r, x)
    if v:
        raise SpecError(f"base point off surface: r = {format_number(v)}", *where("base_point"))
    samples = []
    for p in data.get("sample_points") or []:
        pt = _point(p, n, where("sample_points"))
        if evaluate(r, pt):
            raise SpecError(f"sample point {pt} off surface: r = {format_number(evaluate(r, pt))}",
                            *where("sample_points"))
        samples.append(pt)
    t, t_source = data.get("t"), "spec"
    if t is not None:
        if isinstance(t, float):
            raise SpecError("t must be exact", *where("t"))
        t = Fraction(str(t))
        if t < 1:
            raise SpecError("t must be at least 1", *where("t"))
    else:
        est = dangelo.dangelo_type(r, x, q, 4)
        if isinstance(est.lower, multitype.Unbounded):
            raise SpecError("infinite type at the base point; give t and caps explicitly")
        t = Fraction(est.lower)
        t_source = "curve search (exact)" if est.exact else "curve search (lower bound)"
    caps = default_caps(t, n, q)
    given = data.get("caps") or {}
    if not isinstance(given, dict):
        raise SpecError("caps must be a mapping", *where("caps"))
    for k, val in given.items():
        if k not in CAP_KEYS:
            raise SpecError(f"unknown cap {k!r}", *where("caps"))
        if not isinstance(val, int) or val < 1:
            raise SpecError(f"cap {k} must be a positive integer", *where("caps"))
        caps[k] = val
    return DomainSpec(n, q, r, x, caps, tuple(samples), t, t_source, str(data.get("name", "")), text)


def parse_spec(path) -> DomainSpec:
    path = Path(path)
    try:
        source = path.read_text()
    except OSError as exc:
        raise SpecError(f"cannot read {path}: {exc.strerror}") from None
    try:
        root = yaml.compose(source)
        data = yaml.safe_load(source)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark
        raise SpecError(exc.problem or "YAML syntax error", mark.line + 1, mark.column + 1) from None
    return build_spec(data, _key_marks(root))


def model_spec(name: str, q: int = 1, samples: int = 0) -> DomainSpec:
    m = get_model(name)
    data = {"name": m.name, "n": m.n, "q": q, "defining_function": m.text,
            "base_point": [str(c) for c in m.x0], "t": str(m.t(q))}
    spec = build_spec(data)
    if samples:
        spec = DomainSpec(**{**spec.__dict__, "sample_points": tuple(m.samples(samples))})
    return spec


# ---------------------------------------------------------------- commands


def cmd_kohn(spec: DomainSpec, args) -> tuple[dict, int, str]:
    n_obs = None
    if spec.sample_points:
        rep = multitype.stratify_samples(spec.defining_function, spec.sample_points, spec.q,
                                         spec.caps["list_len"], base_point=spec.base_point)
        n_obs = rep.n_observed
    tr = kohn.run(spec.defining_function, spec.base_point, spec.q, spec.caps["max_steps"],
                  n_observed=n_obs, m_cap=spec.caps["radical_exponent"])
    if tr.terminated:
        summary = f"terminated step {tr.termination_step}, eps = {tr.final_gain}"
        code = EXIT_VIOLATION if tr.bound_violation else EXIT_OK
    else:
        summary = f"no unit within {tr.max_steps} steps"
        code = EXIT_UNDETERMINED
    if args.verbose:
        summary = tr.transcript()
    return tr.to_json(), code, summary


def cmd_multitype(spec: DomainSpec, args):
    r, x = spec.defining_function, spec.base_point
    nu = spec.n + 1 - spec.q
    w = multitype.commutator_multitype(r, x, nu, spec.caps["list_len"])
    result = {"multitype": w.to_json(), "nu": nu, "levi_rank": levi_rank_at(r, x),
              "certificates": [None if c is None else list(c) for c in w.certificates]}
    code = EXIT_OK if w.is_finite() else EXIT_UNDETERMINED
    return result, code, f"commutator multitype {w}"


def check_system(B: boundary.BoundarySystem, q: int, cap: int) -> dict:
    checks = {
        "triangularity_failures": [list(p) for p in boundary.triangularity_failures(B)],
        "gradients_independent": boundary.gradients_independent(B),
        "weight_sums": [str(s) for s in boundary.list_weight_sums(B)],
        "threshold_violations": [l.to_json() for l in boundary.threshold_violations(B, cap)],
    }
    try:
        checks["point3"] = boundary.point3_check(B, q).to_json()
    except boundary.InvariantViolation as exc:
        checks["point3"] = {"error": str(exc)}
    checks["ok"] = (not checks["triangularity_failures"] and checks["gradients_independent"]
                    and all(s == "1" for s in checks["weight_sums"]) and not checks["threshold_violations"]
                    and checks["point3"].get("matches", False))
    return checks


def cmd_boundary(spec: DomainSpec, args):
    nu = spec.n + 1 - spec.q
    cap = spec.caps["list_len"]
    B = boundary.construct_system(spec.defining_function, spec.base_point, nu, cap)
    result = B.to_json()
    if not B.complete:
        result["checks"] = None
        return result, EXIT_UNDETERMINED, f"list search exhausted at level {B.exhausted_level} (cap {cap})"
    result["checks"] = check_system(B, spec.q, cap)
    code = EXIT_OK if result["checks"]["ok"] else EXIT_VIOLATION
    lines = [f"boundary system, multitype {B.multitype}, rank {B.rank}"]
    if args.verbose:
        lines += [f"  r{k} = {g}" for k, g in B.functions().items()]
        lines += [f"  list for L{L.index}: {lst}" for L, lst in zip(B.special_fields(), B.lists)]
        lines.append(f"  invariants {'hold' if code == EXIT_OK else 'FAIL'}")
    return result, code, "\n".join(lines)


def cmd_dangelo(spec: DomainSpec, args):
    r, x, q = spec.defining_function, spec.base_point, spec.q
    est = dangelo.dangelo_type(r, x, q, spec.caps["curve_degree"])
    result = {"type": est.to_json()}
    t = spec.t
    code = EXIT_OK if est.exact else EXIT_UNDETERMINED
    if t is not None and not isinstance(t, multitype.Unbounded):
        rep = dangelo.levi_vanishing_bound_check(r, x, q, t, strict=False)
        result["levi_vanishing"] = rep.to_json()
        if not rep.holds:
            code = EXIT_VIOLATION
        pivot = default_pivot(r, x)
        result["derivative_witnesses"] = {}
        for k in range(spec.n):
            if k == pivot:
                continue
            w = dangelo.derivative_witness(r, x, q, k, rep.bound)
            result["derivative_witnesses"][f"z{k + 1}"] = None if w is None else w.to_json()
    lo = est.lower
    up = "unknown" if est.upper is None else est.upper
    return result, code, f"type in [{lo}, {up}]" + (" (exact)" if est.exact else "")


def cmd_bounds(args, spec: DomainSpec | None):
    if spec is not None:
        t, n, q = spec.t, spec.n, spec.q
    else:
        if args.t is None or args.n is None:
            raise SpecError("bounds needs --spec or both --t and --n")
        t, n, q = Fraction(args.t), args.n, args.q
    result = {
        "t": str(t), "n": n, "q": q,
        "n_bound": multitype.n_bound(t, n, q),
        "jump": multitype.entry_json(multitype.type_jump_bound(t, n, q)),
        "vanishing_order_bound": multitype.vanishing_order_bound(t, n, q),
        "counting_bound": multitype.counting_bound(multitype.type_jump_bound(t, n, q), n + 1 - q),
        "catlin_from_type": multitype.catlin_dangelo_bounds(t, "from_Δq", n, q).to_json(),
    }
    return result, EXIT_OK, f"N <= {result['n_bound']}, jump <= {result['jump']}"


def cmd_enumerate(args):
    if args.nu is None or args.bound is None:
        raise SpecError("enumerate-weights needs --nu and --bound")
    bound = Fraction(args.bound)
    ws = multitype.enumerate_weights(args.nu, bound)
    result = {
        "nu": args.nu,
        "bound": str(bound),
        "count": len(ws),
        "count_second_at_least_2": sum(1 for w in ws if len(w) < 2 or w.entries[1] >= 2),
        "counting_bound": multitype.counting_bound(bound, args.nu),
        "weights": [w.to_json() for w in ws],
    }
    lines = [f"{len(ws)} weights"]
    if args.verbose:
        lines += [str(w) for w in ws]
        lines.append(f"with second entry >= 2: {result['count_second_at_least_2']}; "
                     f"counting bound {result['counting_bound']}")
    return result, EXIT_OK, "\n".join(lines)


def cmd_stratify(spec: DomainSpec, args):
    if not spec.sample_points:
        raise SpecError("stratify needs sample_points in the spec (or --model with --samples)")
    rep = multitype.stratify_samples(spec.defining_function, spec.sample_points, spec.q,
                                     spec.caps["list_len"], base_point=spec.base_point)
    result = rep.to_json()
    result["n_bound"] = multitype.n_bound(spec.t, spec.n, spec.q) if spec.t else None
    code = EXIT_OK
    if rep.violations or (result["n_bound"] is not None and rep.n_observed > result["n_bound"]):
        code = EXIT_VIOLATION
    elif any(not s.is_finite() for s in rep.strata):
        code = EXIT_UNDETERMINED
    summary = f"{rep.n_observed} strata: " + ", ".join(str(s) for s in rep.strata)
    return result, code, summary


DOMAIN_COMMANDS = {
    "kohn": cmd_kohn,
    "multitype": cmd_multitype,
    "boundary-system": cmd_boundary,
    "dangelo": cmd_dangelo,
    "stratify": cmd_stratify,
}
COMMANDS = tuple(DOMAIN_COMMANDS) + ("bounds", "enumerate-weights")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_VIOLATION, f"{self.prog}: error: {message}\n")


def make_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="kohnlab", description=__doc__)
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--spec", help="domain spec (YAML)")
    p.add_argument("--model", choices=sorted(GALLERY), help="use a gallery model instead of a spec file")
    p.add_argument("--samples", type=int, default=0, help="with --model: number of surface samples")
    p.add_argument("--json", dest="json_out", help="write the JSON report here ('-' for stdout)")
    p.add_argument("--verbose", action="store_true")
    p.add_argument("--t", help="type value for bounds")
    p.add_argument("--n", type=int)
    p.add_argument("--q", type=int, default=1)
    p.add_argument("--nu", type=int)
    p.add_argument("--bound", help="entry bound for enumerate-weights")
    return p


def render(report: dict) -> str:
    return json.dumps(report, indent=2, ensure_ascii=False) + "\n"


def run_command(argv=None) -> tuple[dict, int, str, bool]:
    args = make_parser().parse_args(argv)
    spec = None
    if args.spec and args.model:
        raise SpecError("give either --spec or --model, not both")
    if args.spec:
        spec = parse_spec(args.spec)
    elif args.model:
        spec = model_spec(args.model, args.q, args.samples)
    if args.command == "enumerate-weights":
        result, code, summary = cmd_enumerate(args)
    elif args.command == "bounds":
        result, code, summary = cmd_bounds(args, spec)
    else:
        if spec is None:
            raise SpecError(f"{args.command} needs --spec or --model")
        result, code, summary = DOMAIN_COMMANDS[args.command](spec, args)
    status = {EXIT_OK: "ok", EXIT_UNDETERMINED: "undetermined", EXIT_VIOLATION: "violation"}[code]
    report = {"command": args.command, "status": status, "exit_code": code,
              "spec": None if spec is None else spec.to_json(), "result": result}
    if args.json_out == "-":
        sys.stdout.write(render(report))
    elif args.json_out:
        Path(args.json_out).write_text(render(report))
    return report, code, summary, args.json_out == "-"


def main(argv=None) -> int:
    try:
        report, code, summary, json_on_stdout = run_command(argv)
    except SystemExit as exc:  # argparse usage errors and --help
        return exc.code if isinstance(exc.code, int) else EXIT_VIOLATION
    except SpecError as exc:
        sys.stderr.write(f"kohnlab: error: {exc}\n")
        return EXIT_VIOLATION
    except (boundary.InvariantViolation, dangelo.LeviBoundViolation) as exc:
        sys.stderr.write(f"kohnlab: invariant violation: {exc}\n")
        return EXIT_VIOLATION
    if summary:
        print(summary, file=sys.stderr if json_on_stdout else sys.stdout)
    return code


if __name__ == "__main__":
    sys.exit(main())
