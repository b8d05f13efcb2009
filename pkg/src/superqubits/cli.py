"""Command line front end: construction, membership checks and named reproductions.

Exit codes: 0 pass, 1 check failure, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .grassmann import AlgebraContext, GrassmannError, format_complex, format_supernumber
from .osp import (
    FormConvention,
    OspError,
    build_forms,
    build_generators,
    check_algebra_element,
    check_closure,
    check_group_element,
    check_jacobi,
    uosp_element,
)
from .supermatrix import Supermatrix, SupermatrixError, format_matrix, matrix_from_json, matrix_to_json, parse_matrix
from .superqubit import (
    SuperqubitError,
    UnreachableStateError,
    apply,
    branch_totals,
    build_global_form,
    canonical_labels,
    format_state,
    generate_genstate1,
    generate_tsirelson,
    genstate1_expected,
    global_dims,
    local_element,
    local_embed,
    local_qubit_generators,
    norm2,
    orbit_rank,
    parse_state,
    qubit_restrict,
    qubit_usp_generators,
    so_body_generators,
    tsirelson_expected,
    usp_body_generators,
)
from .symbolic import evaluate, load_table, symbols

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
EXACT = 0.0


class UsageError(Exception):
    pass


@dataclass
class CheckReport:
    """Outcome of one named check; passes iff every residual is within its tolerance."""

    name: str
    residuals: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)
    artifacts: list = field(default_factory=list)

    def add(self, key: str, value: float, tol: float = EXACT):
        self.residuals[key] = float(value)
        self.tolerances[key] = tol

    @property
    def passed(self) -> bool:
        return all(self.residuals[k] <= self.tolerances[k] for k in self.residuals)

    @property
    def status(self) -> str:
        return "pass" if self.passed else "fail"

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "status": self.status,
            "residuals": self.residuals,
            "tolerances": self.tolerances,
            "notes": self.notes,
            "artifacts": self.artifacts,
        }

    def text(self) -> str:
        lines = [f"{self.status.upper()} {self.name}"]
        for k, v in self.residuals.items():
            ok = "ok" if v <= self.tolerances[k] else "FAIL"
            lines.append(f"  {k}: {v:.3e} (tol {self.tolerances[k]:.0e}) {ok}")
        lines.extend(f"  note: {n}" for n in self.notes)
        lines.extend(f"  artifact: {a}" for a in self.artifacts)
        return "\n".join(lines)


# -- golden data -----------------------------------------------------------------------


def golden_text(name: str) -> str:
    return resources.files("superqubits.golden").joinpath(name).read_text()


def golden_path(name: str) -> Path:
    return Path(str(resources.files("superqubits.golden").joinpath(name)))


def _strip_comments(text: str) -> str:
    return "\n".join(ln for ln in text.splitlines() if not ln.lstrip().startswith("%"))


def _bless(report: CheckReport, name: str, content: str, header: str):
    path = golden_path(name)
    path.write_text(header + content)
    report.artifacts.append(str(path))
    report.notes.append(f"blessed {name}")


# -- reproduction targets ----------------------------------------------------------------


def _rng():
    return np.random.default_rng(20240101)


def target_forms54(bless=False) -> CheckReport:
    rep = CheckReport("forms54")
    _, G = build_global_form(2)
    _, _, G54 = build_forms(FormConvention(2, 2, "so_first", "paper54"))
    printed = parse_matrix(golden_text("forms54.txt"))
    rep.add("S(g x g)S^T - printed", (G - printed).max_abs())
    rep.add("paper54 layout - printed", (G54 - printed).max_abs())
    rep.add("eta symmetric", np.abs(G.body()[:5, :5] - G.body()[:5, :5].T).max())
    rep.add("Omega antisymmetric", np.abs(G.body()[5:, 5:] + G.body()[5:, 5:].T).max())
    rep.notes.append("canonical order " + " ".join(canonical_labels(2)))
    if bless:
        _bless(rep, "forms54.txt", format_matrix(G),
               "% G = eta + Omega in the canonical (5|4) two-superqubit basis\n")
    return rep


def _param_key(name: str):
    kind, i, j = name[0], int(name[1]) - 1, int(name[2]) - 1
    if kind == "a":
        return (i, j), False
    if kind == "b":
        return (5 + i, 5 + j), False
    return (i, 5 + j), True


def _compare_symbolic(rep: CheckReport, layout: str, table_name: str):
    ctx = AlgebraContext(1)
    basis = build_generators(FormConvention(2, 2, "so_first", layout), ctx)
    table = load_table(table_name)
    rng = _rng()
    worst = member = 0.0
    names = sorted(symbols(table))
    for name in names:
        key, odd = _param_key(name)
        c = complex(*rng.normal(size=2))
        val = ctx.theta(1) * c if odd else ctx.scalar(c)
        x = uosp_element(basis, {key: val})
        worst = max(worst, (x - evaluate(table, {name: val}, ctx, basis.parity)).max_abs())
        member = max(member, *check_algebra_element(x, basis.G).residuals.values())
    rep.add(f"{layout}: max entry difference over {len(names)} parameters", worst, 1e-12)
    rep.add(f"{layout}: algebra membership", member, 1e-12)


def target_x2121(bless=False) -> CheckReport:
    rep = CheckReport("x2121")
    _compare_symbolic(rep, "paper54", "x2121.txt")
    _compare_symbolic(rep, "identity", "x54_identity.txt")
    if bless:
        rep.notes.append("symbolic tables are transcriptions and are never blessed")
    return rep


def target_locals2121(bless=False) -> CheckReport:
    rep = CheckReport("locals2121")
    ctx = AlgebraContext(2)
    rng = _rng()
    g, gp, gm, d, dp, dm = rng.normal(size=6)
    r = ctx.theta(1) * complex(*rng.normal(size=2))
    s = ctx.theta(2) * complex(*rng.normal(size=2))
    xa = local_element(ctx, g, gp, gm, r)
    xb = local_element(ctx, d, dp, dm, s)
    xa_printed = evaluate(load_table("local_xa.txt"), {"g": g, "gp": gp, "gm": gm, "r": r}, ctx, [0, 0, 1])
    rep.add("x_A - printed", (xa - xa_printed).max_abs(), 1e-12)
    ea, eb = local_embed(0, xa, 2), local_embed(1, xb, 2)
    total = ea + eb
    values = {"g": g, "gp": gp, "gm": gm, "d": d, "dp": dp, "dm": dm, "r": r, "s": s}
    printed = evaluate(load_table("locals2121.txt"), values, ctx, [0] * 5 + [1] * 4)
    rep.add("S(x_A x 1 + 1 x x_B)S^T - printed", (total - printed).max_abs(), 1e-12)
    _, G = build_global_form(2, ctx)
    rep.add("algebra membership", max(check_algebra_element(total, G).residuals.values()), 1e-12)
    comm = (ea @ eb - eb @ ea).max_abs()
    rep.notes.append(f"[A-slot, B-slot] commutator of the printed form: {comm:.3e} "
                     "(nonzero once odd parameters are present)")
    return rep


def target_exptau12(bless=False) -> CheckReport:
    rep = CheckReport("exptau12")
    ctx = AlgebraContext(1)
    g, _ = generate_genstate1(ctx.theta(1))
    printed = parse_matrix(golden_text("exptau12.txt"), ctx)
    rep.add("soul difference", (g.soul() - printed.soul()).max_abs())
    rep.add("body difference", np.abs(g.body() - printed.body()).max(), 1e-12)
    _, G = build_global_form(2, ctx)
    for k, v in check_group_element(g, G).residuals.items():
        rep.add(f"group {k}", v, 1e-9)
    if bless:
        _bless(rep, "exptau12.txt", format_matrix(g),
               "% exp(X_tau12) with tau_12 = t1 (one soul pair), canonical (5|4) order\n")
    return rep


def target_genstate1(bless=False) -> CheckReport:
    rep = CheckReport("genstate1")
    ctx = AlgebraContext(1)
    tau = ctx.theta(1)
    _, psi = generate_genstate1(tau)
    printed = parse_state(_strip_comments(golden_text("genstate1.txt")), ctx)
    rep.add("exp(X_tau12)|00> - printed", 0.0 if psi == printed else (psi - printed).column.max_abs() or 1.0)
    rep.add("closed form - printed", 0.0 if genstate1_expected(tau) == printed else 1.0)
    rep.add("|norm2 - 1|", (norm2(psi) - 1).max_abs())
    rep.notes.append(format_state(psi))
    if bless:
        _bless(rep, "genstate1.txt", format_state(psi) + "\n", "% exp(X_tau12)|00> with tau_12 = t1\n")
    return rep


TSIRELSON_ANGLES = (0.0, math.pi / 6, math.pi / 4, math.pi / 2)


def target_tsirelson(bless=False) -> CheckReport:
    rep = CheckReport("tsirelson")
    ctx = AlgebraContext(2)
    rng = _rng()
    tau = ctx.theta(1) * complex(*rng.normal(size=2))
    lam = ctx.theta(2) * complex(*rng.normal(size=2))
    for phi in TSIRELSON_ANGLES:
        label = f"phi={phi:.4f}"
        target = tsirelson_expected(phi, tau, lam)
        rep.add(f"{label} |norm2 - 1|", (norm2(target) - 1).max_abs(), 1e-12)
        try:
            steps, psi = generate_tsirelson(phi, tau, lam)
        except UnreachableStateError as exc:
            rep.add(f"{label} generated - target", math.inf, 1e-12)
            rep.notes.append(f"{label}: {exc}")
            continue
        rep.add(f"{label} generated - target", (psi - target).column.max_abs(), 1e-12)
        rep.notes.append(f"{label}: {len(steps)} group elements")
    return rep


def _dims(n: int) -> CheckReport:
    rep = CheckReport(f"dims-n{n}")
    expected = {2: (5, 4), 3: (14, 13), 4: (41, 40)}[n]
    got = global_dims(n)
    rep.add("global_dims mismatch", float(got != expected))
    rep.add("branching totals mismatch", float(branch_totals(n) != expected))
    rep.notes.append(f"UOSp{got}")
    if n <= 3:
        _, G = build_global_form(n)
        b = G.body().real
        ev = G.row_parity == 0
        even_block, odd_block = b[np.ix_(ev, ev)], b[np.ix_(~ev, ~ev)]
        sym = "symmetric" if np.array_equal(even_block, even_block.T) else "antisymmetric"
        osym = "symmetric" if np.array_equal(odd_block, odd_block.T) else "antisymmetric"
        rep.notes.append(f"even block {sym}, odd block {osym}")
    return rep


def target_closure(bless=False) -> CheckReport:
    rep = CheckReport("closure")
    for p, q in ((1, 1), (2, 2)):
        basis = build_generators(FormConvention(p, q, "so_first", "identity"))
        rep.add(f"closure ({p},{q}) failing pairs", len(check_closure(basis)))
    for p, q in ((0, 1), (1, 1)):
        basis = build_generators(FormConvention(p, q, "so_first", "identity"))
        rep.add(f"jacobi ({p},{q}) failing triples", len(check_jacobi(basis)))
    counts = build_generators(FormConvention(2, 2, "so_first", "identity")).counts()
    rep.add("(2,2) generator counts mismatch",
            float(counts != {"orthogonal": 10, "symplectic": 10, "odd": 20}))
    return rep


def target_transitivity_n2(bless=False) -> CheckReport:
    rep = CheckReport("transitivity-n2")
    so5 = orbit_rank(so_body_generators(2), np.eye(5)[0])
    usp4 = orbit_rank(usp_body_generators(2), np.eye(4)[0])
    local = orbit_rank(local_qubit_generators(2), np.eye(4)[0])
    rep.add("so(5) on e1: |rank - 4|", abs(so5 - 4))
    rep.add("usp(4) on |00>: |rank - 7|", abs(usp4 - 7))
    rep.add("local su(2)^2 rank not below 7", float(local >= 7))
    rep.notes.append(f"ranks so(5)={so5} usp(4)={usp4} local={local}")
    return rep


def target_transitivity_n3(bless=False) -> CheckReport:
    rep = CheckReport("transitivity-n3")
    usp8 = orbit_rank(qubit_usp_generators(3), np.eye(8)[0])
    local = orbit_rank(local_qubit_generators(3), np.eye(8)[0])
    rep.add("usp(8) on |000>: |rank - 15|", abs(usp8 - 15))
    rep.add("local su(2)^3 rank not below 15", float(local >= 15))
    rep.notes.append(f"ranks usp(8)={usp8} local={local}")
    return rep


TARGETS = {
    "forms54": target_forms54,
    "x2121": target_x2121,
    "locals2121": target_locals2121,
    "exptau12": target_exptau12,
    "genstate1": target_genstate1,
    "tsirelson": target_tsirelson,
    "dims-n3": lambda bless=False: _dims(3),
    "dims-n4": lambda bless=False: _dims(4),
    "closure": target_closure,
    "transitivity-n2": target_transitivity_n2,
    "transitivity-n3": target_transitivity_n3,
}


def reproduce(target: str, bless: bool = False) -> CheckReport:
    if target not in TARGETS:
        raise UsageError(f"unknown target {target!r}; choose from {', '.join(TARGETS)} or all")
    return TARGETS[target](bless=bless)


# -- input helpers ---------------------------------------------------------------------------


def _read_source(arg: str) -> str:
    if arg == "-":
        return sys.stdin.read()
    path = Path(arg)
    if path.exists():
        return path.read_text()
    return arg


def read_matrix(arg: str) -> Supermatrix:
    text = _read_source(arg).strip()
    if text.startswith("{"):
        return matrix_from_json(text)
    return parse_matrix(text)


def _convention(args, shape=None) -> FormConvention:
    p, q = args.p, args.q
    if (p is None or q is None) and shape is not None:
        (even, odd), _ = shape
        if args.variant == "so_first":
            p, q = (even - 1) // 2, odd // 2
        else:
            p, q = (odd - 1) // 2, even // 2
    if p is None or q is None:
        raise UsageError("--p and --q are required")
    return FormConvention(p, q, args.variant, args.layout)


# -- commands -----------------------------------------------------------------------------


def cmd_gen(args) -> tuple[int, str]:
    basis = build_generators(_convention(args))
    keys = sorted(basis.generators)
    if args.json:
        out = {"convention": vars(basis.convention), "counts": basis.counts(), "generators": [
            {"index": list(k), "kind": basis.pair_kind(*k), "matrix": matrix_to_json(basis.generators[k])}
            for k in keys]}
        return EXIT_PASS, json.dumps(out, indent=1)
    c = basis.counts()
    lines = [f"% {len(keys)} generators: {c['orthogonal']} orthogonal, {c['symplectic']} symplectic, "
             f"{c['odd']} odd"]
    for k in keys:
        lines.append(f"% T[{k[0]},{k[1]}] {basis.pair_kind(*k)}")
        lines.append(format_matrix(basis.generators[k]).rstrip("\n"))
    return EXIT_PASS, "\n".join(lines)


def cmd_check(args) -> tuple[int, CheckReport]:
    m = read_matrix(args.file)
    if args.n is not None:
        _, G = build_global_form(args.n, m.ctx)
    else:
        G = build_forms(_convention(args, m.shape), m.ctx)[2]
    if G.nrows != m.nrows or not np.array_equal(G.row_parity, m.row_parity):
        raise UsageError(f"matrix grading does not match the form {G.shape}")
    name = "algebra membership" if args.algebra else "group membership"
    result = (check_algebra_element if args.algebra else check_group_element)(m, G)
    rep = CheckReport(name)
    for k, v in result.residuals.items():
        rep.add(k, v, result.tolerance)
    return (EXIT_PASS if rep.passed else EXIT_FAIL), rep


def _state_arg(args):
    return parse_state(_strip_comments(_read_source(args.state)))


def cmd_act(args) -> tuple[int, str]:
    g = read_matrix(args.g)
    psi = _state_arg(args)
    out = apply(g, psi)
    return EXIT_PASS, format_state(out)


def cmd_norm(args) -> tuple[int, str]:
    return EXIT_PASS, format_supernumber(norm2(_state_arg(args)).chop())


def cmd_restrict(args) -> tuple[int, str]:
    amps = qubit_restrict(_state_arg(args), atol=1e-12)
    return EXIT_PASS, " ".join(format_complex(a) for a in amps)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="superqubits", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="group", required=True)

    def form_flags(p):
        p.add_argument("--p", type=int)
        p.add_argument("--q", type=int)
        p.add_argument("--layout", choices=("identity", "split", "paper54"), default="identity")
        p.add_argument("--variant", choices=("so_first", "sp_first"), default="so_first")

    osp = sub.add_parser("osp", help="generators and membership checks")
    osp_sub = osp.add_subparsers(dest="cmd", required=True)
    gen = osp_sub.add_parser("gen", help="dump the generator basis")
    form_flags(gen)
    gen.add_argument("--json", action="store_true")
    chk = osp_sub.add_parser("check", help="membership report for a matrix file ('-' for stdin)")
    chk.add_argument("file")
    form_flags(chk)
    chk.add_argument("--n", type=int, help="use the global n-superqubit form")
    chk.add_argument("--algebra", action="store_true", help="check X^st G + G X = 0 and X^dag = -X")
    chk.add_argument("--json", action="store_true")

    state = sub.add_parser("state", help="superqubit state plumbing")
    st_sub = state.add_subparsers(dest="cmd", required=True)
    act = st_sub.add_parser("act", help="apply a group element to a state")
    act.add_argument("--g", required=True, help="matrix file")
    act.add_argument("--state", required=True, help="state text, file, or '-'")
    for name, text in (("norm", "print <psi|psi>"), ("restrict", "print qubit amplitudes")):
        p = st_sub.add_parser(name, help=text)
        p.add_argument("--state", required=True)

    rep = sub.add_parser("reproduce", help="named reproduction checks")
    rep.add_argument("target", help=f"one of {', '.join(TARGETS)} or all")
    rep.add_argument("--json", action="store_true")
    rep.add_argument("--bless", action="store_true", help="rewrite golden files from computed output")
    return parser


def run(argv=None) -> tuple[int, str]:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return (EXIT_USAGE if exc.code else EXIT_PASS), ""
    try:
        if args.group == "reproduce":
            names = sorted(TARGETS) if args.target == "all" else [args.target]
            reports = [reproduce(n, args.bless) for n in names]
            code = EXIT_PASS if all(r.passed for r in reports) else EXIT_FAIL
            if args.json:
                return code, json.dumps([r.to_json() for r in reports], indent=1)
            return code, "\n".join(r.text() for r in reports)
        if args.group == "osp" and args.cmd == "gen":
            return cmd_gen(args)
        if args.group == "osp":
            code, rep = cmd_check(args)
            return code, json.dumps(rep.to_json(), indent=1) if args.json else rep.text()
        return {"act": cmd_act, "norm": cmd_norm, "restrict": cmd_restrict}[args.cmd](args)
    except (UsageError, GrassmannError, SupermatrixError, OspError, SuperqubitError, ValueError,
            OSError) as exc:
        return EXIT_USAGE, f"error: {exc}"


def main(argv=None) -> int:
    code, out = run(argv)
    if out:
        stream = sys.stderr if code == EXIT_USAGE else sys.stdout
        print(out, file=stream)
    return code


if __name__ == "__main__":
    sys.exit(main())
