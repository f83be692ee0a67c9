"""Command-line front end.

Exit codes: 0 success, 1 property or verification failure, 2 parse error,
3 semantic error, 4 missing contract, 5 composability violation.
"""

from __future__ import annotations

import argparse
import sys
import time
import warnings
from pathlib import Path
from typing import Sequence

from . import __version__
from . import contracts as C
from . import semantics as S
from .components import BaseComponent, Component
from .errors import ProcContractsError, SemanticError
from .lang import DomainConfig, Program, calls, parse_contract_file, parse_program, static_interface
from .metacheck import CaseGenConfig
from .oracle import oracle_denotation
from .serialize import contract_from_json, contract_to_json, denotation_to_json, digest, dumps, env_from_json, load_json

EXIT_OK, EXIT_FAIL = 0, 1
TEXT_PAIR_LIMIT = 16


class Report:
    """Collects a command's results; serialized with sorted keys so equal
    inputs and seed give byte-identical JSON."""

    def __init__(self, argv: Sequence[str], inputs: Sequence[str], seed: int | None = None):
        self.data = {
            "command": list(argv),
            "inputs": digest(inputs),
            "version": __version__,
            "seed": seed,
            "verdicts": {},
            "witnesses": {},
        }
        self.timings: dict[str, float] = {}

    def __setitem__(self, key, value):
        self.data[key] = value

    def __getitem__(self, key):
        return self.data[key]

    def to_json(self, timings: bool = False) -> str:
        data = dict(self.data)
        if timings:
            data["timings"] = {k: round(v, 6) for k, v in self.timings.items()}
        return dumps(data)


class _Timer:
    def __init__(self, report: Report, name: str):
        self.report, self.name = report, name

    def __enter__(self):
        self.t0 = time.perf_counter()

    def __exit__(self, *exc):
        self.report.timings[self.name] = time.perf_counter() - self.t0


# ---------------------------------------------------------------- input helpers


def parse_domain_flag(text: str) -> tuple[int, int]:
    try:
        lo, hi = text.split("..")
        return int(lo), int(hi)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lo..hi, got {text!r}") from None


def _cli_domain(args) -> DomainConfig | None:
    if args.domain is None and args.vars is None:
        return None
    if args.domain is None or args.vars is None:
        raise SemanticError("--domain and --vars must be given together")
    names = tuple(v.strip() for v in args.vars.split(",") if v.strip())
    return DomainConfig(args.domain[0], args.domain[1], names)


def load_program(path: str, args) -> Program:
    text = Path(path).read_text(encoding="utf-8")
    program = parse_program(text, _cli_domain(args))
    program.require_domain()
    return program


def _split_ref(ref: str) -> tuple[str, list[str] | None]:
    """``file:a,b`` into the file and the selected names."""
    head, sep, tail = ref.rpartition(":")
    if sep and head and "/" not in tail and not Path(ref).exists():
        return head, [n.strip() for n in tail.split(",") if n.strip()]
    return ref, None


def load_contract(ref: str, args) -> C.DenotContract:
    """A contract from JSON, or ``file.contracts:p,q`` abstracted over the
    program given with --program."""
    path, names = _split_ref(ref)
    if path.endswith(".json"):
        if names:
            raise SemanticError("a JSON contract file takes no procedure selection")
        return contract_from_json(load_json(path))
    table = parse_contract_file(Path(path).read_text(encoding="utf-8"))
    if args.program is None:
        raise SemanticError("contracts from a .contracts file need --program for the call structure")
    program = load_program(args.program, args)
    names = names or list(program.names)
    called = set()
    for p in names:
        called |= calls(program.decl(p).body)
    return C.abstract_contracts(names, table, called, program.require_domain())


def load_component(ref: str, args) -> Component:
    """Base component of the selected declarations of a program file."""
    path, names = _split_ref(ref)
    program = load_program(path, args)
    decls = [program.decl(p) for p in (names or program.names)]
    called = set()
    for d in decls:
        called |= calls(d.body)
    return BaseComponent(decls, program.require_domain(), called)


def _input_env(choice: str, program: Program) -> S.ProcEnv:
    required, _ = static_interface(program)
    domain = program.require_domain()
    if choice == "bot":
        return S.bottom_env(required, domain)
    if choice == "top":
        return S.top_env(required, domain)
    env = env_from_json(load_json(choice), domain)
    if env.scope != required:
        raise SemanticError(f"environment file covers {sorted(env.scope)}, program requires {sorted(required)}")
    return env


def _emit(report: Report, args, lines: list[str]) -> None:
    for line in lines:
        print(line)
    if args.json:
        text = report.to_json(args.timings)
        if args.json == "-":
            sys.stdout.write(text)
        else:
            Path(args.json).write_text(text, encoding="utf-8")


def _fmt_state(s: dict) -> str:
    return "{" + ", ".join(f"{k}:{v}" for k, v in s.items()) + "}"


def _fmt_pair(pair) -> str:
    return f"({_fmt_state(pair[0])}, {_fmt_state(pair[1])})"


# ---------------------------------------------------------------- commands


def cmd_denote(args, argv) -> int:
    inputs = [args.program] + ([args.env] if args.env not in (None, "bot", "top") else [])
    report = Report(argv, inputs)
    program = load_program(args.program, args)
    required, _ = static_interface(program)
    if required and args.env is None:
        raise SemanticError(f"open program requires {sorted(required)}; pass --env bot|top|FILE")
    rm = _input_env(args.env or "bot", program)
    with _Timer(report, "denote"):
        rho0 = S.standard_denotation(program, rm)
    entries = [args.entry] if args.entry else list(program.names)
    for p in entries:
        program.decl(p)
    lines = []
    ok = True
    report["denotations"] = {p: denotation_to_json(rho0[p]) for p in entries}
    for p in entries:
        rel = rho0[p]
        verdict = {"pairs": len(rel)}
        if not required:
            with _Timer(report, f"oracle:{p}"):
                agree = oracle_denotation(program, p) == rel
            verdict["oracle_agree"] = agree
            ok &= agree
        report["verdicts"][p] = verdict
        extra = f", oracle agrees: {str(verdict['oracle_agree']).lower()}" if "oracle_agree" in verdict else ""
        lines.append(f"{p}: {len(rel)} pairs{extra}")
        shown = rel.state_pairs()
        for pair in shown[:TEXT_PAIR_LIMIT]:
            lines.append(f"  {_fmt_pair(pair)}")
        if len(shown) > TEXT_PAIR_LIMIT:
            lines.append(f"  ... {len(shown) - TEXT_PAIR_LIMIT} more (use --json for all)")
    _emit(report, args, lines)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_verify(args, argv) -> int:
    report = Report(argv, [args.program, args.contracts])
    program = load_program(args.program, args)
    table = parse_contract_file(Path(args.contracts).read_text(encoding="utf-8"))
    with _Timer(report, "verify"):
        verdicts = C.verify_modular(program, table, args.max_witnesses)
    lines = []
    for name, v in verdicts.items():
        report["verdicts"][name] = {"verified": v.verified, "violations": v.violations}
        report["witnesses"][name] = [list(w) for w in v.witnesses]
        lines.append(f"{name}: {'verified' if v.verified else f'NOT verified ({v.violations} violating pairs)'}")
        for w in v.witnesses:
            lines.append(f"  witness {_fmt_pair(w)}")
    all_ok = all(v.verified for v in verdicts.values())
    if all_ok and program.is_closed and program.decls:
        with _Timer(report, "soundness"):
            sound = C.soundness_check(program, table)
        report["soundness"] = sound
        lines.append(f"soundness: {'confirmed' if sound else 'FAILED'}")
        all_ok &= sound
    else:
        report["soundness"] = None
    report["verified"] = all_ok
    _emit(report, args, lines)
    return EXIT_OK if all_ok else EXIT_FAIL


def _contract_summary(c: C.DenotContract) -> dict:
    return {"interface": c.interface.to_dict(),
            "assume_pairs": {p: len(r) for p, r in c.assume.items()},
            "guarantee_pairs": {p: len(r) for p, r in c.guarantee.items()}}


def cmd_algebra(args, argv) -> int:
    refs = [args.left, args.right]
    files = [_split_ref(r)[0] for r in refs] + ([args.program] if args.program else [])
    report = Report(argv, files, args.seed if args.op == "environment" else None)
    report["operation"] = args.op
    lines = []
    result = None
    if args.op in ("refine", "conjoin", "compose"):
        c1, c2 = load_contract(args.left, args), load_contract(args.right, args)
        if args.op == "refine":
            verdict = C.refines(c1, c2)
            lines.append(f"refines: {str(verdict).lower()}")
        elif args.op == "conjoin":
            result = C.conjoin(c1, c2)
            verdict = True
        else:
            result = C.compose_contracts(c1, c2)
            verdict = True
    else:
        m, c = load_component(args.left, args), load_contract(args.right, args)
        report["component"] = m.describe()
        if args.op == "implements":
            verdict = C.implements(m, c)
        else:
            import numpy as np
            verdict = C.is_environment(m, c, args.samples, np.random.default_rng(args.seed))
        lines.append(f"{args.op}: {str(verdict).lower()}")
    report["verdicts"]["result"] = verdict
    if result is not None:
        report["contract"] = _contract_summary(result)
        iface = result.interface
        lines.append(f"{args.op}: required {sorted(iface.required)}, provided {sorted(iface.provided)}")
        if args.against:
            target = load_contract(args.against, args)
            refined = C.refines(result, target)
            report["verdicts"]["refines_against"] = refined
            lines.append(f"refines {args.against}: {str(refined).lower()}")
            verdict = refined
        if args.out:
            Path(args.out).write_text(dumps(contract_to_json(result)), encoding="utf-8")
            lines.append(f"wrote {args.out}")
    _emit(report, args, lines)
    return EXIT_OK if verdict else EXIT_FAIL


def cmd_properties(args, argv) -> int:
    from . import mutants
    from .metacheck import run_meta_suite
    from .properties import run_semantic_suite
    cfg = CaseGenConfig(seed=args.seed, samples=args.samples, max_width=args.max_width,
                        max_vars=args.max_vars, max_procs=args.max_procs, max_depth=args.max_depth)
    report = Report(argv, [], args.seed)
    laws = []
    with mutants.active(args.mutant):
        if args.suite in ("all", "meta"):
            with _Timer(report, "meta"):
                laws += run_meta_suite(cfg).laws
        if args.suite in ("all", "semantic"):
            with _Timer(report, "semantic"):
                laws += run_semantic_suite(cfg).laws
    report["mutant"] = args.mutant
    report["config"] = {k: getattr(cfg, k) for k in cfg.__dataclass_fields__}
    report["laws"] = [r.to_dict() for r in laws]
    ok = all(r.failed == 0 for r in laws)
    report["verdicts"]["ok"] = ok
    lines = [f"{'law':<22}{'passed':>8}{'skipped':>9}{'failed':>8}"]
    for r in laws:
        lines.append(f"{r.law:<22}{r.passed:>8}{r.skipped:>9}{r.failed:>8}")
        if r.failing_seeds:
            lines.append(f"  failing seeds: {' '.join(map(str, r.failing_seeds[:10]))}")
    lines.append("all laws hold" if ok else "FAILURES")
    _emit(report, args, lines)
    return EXIT_OK if ok else EXIT_FAIL


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--domain", type=parse_domain_flag, metavar="LO..HI",
                        help="value domain when the program has no header")
    common.add_argument("--vars", metavar="A,B", help="ordered program variables")
    common.add_argument("--json", metavar="PATH", help="write the full JSON report ('-' for stdout)")
    common.add_argument("--timings", action="store_true", help="include timings in the JSON report")

    parser = argparse.ArgumentParser(prog="procontracts", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("denote", parents=[common], help="standard denotation of a program")
    p.add_argument("program")
    p.add_argument("--entry", help="only this procedure")
    p.add_argument("--env", help="input environment for open programs: bot, top or a JSON file")
    p.set_defaults(func=cmd_denote)

    p = sub.add_parser("verify", parents=[common], help="modular verification against Hoare contracts")
    p.add_argument("program")
    p.add_argument("contracts")
    p.add_argument("--max-witnesses", type=int, default=C.MAX_WITNESSES)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("algebra", parents=[common], help="contract refinement, conjunction, composition")
    p.add_argument("op", choices=["refine", "conjoin", "compose", "implements", "environment"])
    p.add_argument("left", help="contract (refine/conjoin/compose) or component FILE[:p,q]")
    p.add_argument("right", help="contract: FILE.json or FILE.contracts[:p,q]")
    p.add_argument("--program", help="program giving the call structure of .contracts references")
    p.add_argument("--against", help="also check the result refines this contract")
    p.add_argument("--out", help="write the resulting contract as JSON")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=0, help="random refutation attempts for 'environment'")
    p.set_defaults(func=cmd_algebra)

    p = sub.add_parser("properties", parents=[common], help="seeded law suites")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--max-width", type=int, default=5)
    p.add_argument("--max-vars", type=int, default=2)
    p.add_argument("--max-procs", type=int, default=3)
    p.add_argument("--max-depth", type=int, default=4)
    p.add_argument("--suite", choices=["all", "meta", "semantic"], default="all")
    p.add_argument("--mutant", choices=["conjoin-meet", "compose-no-cross", "while-gfp"],
                   help="run against a deliberately broken operator")
    p.set_defaults(func=cmd_properties)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("always")
            warnings.showwarning = _show_warning
            return args.func(args, argv)
    except ProcContractsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


def _show_warning(message, category, filename, lineno, file=None, line=None):
    print(f"warning: {message}", file=sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
