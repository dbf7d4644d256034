"""Command-line entry point: ``growthlab build|check|witness|algebra``.

Exit codes: 0 pass, 1 violation found, 2 policy or ledger failure, 3 I/O or
missing data.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

from . import __version__
from .algebra import DegenerateSpec, MonomialAlgebraSpec, growth_table, load_spec, parse_word
from .growthfn import GrowthTable, OutOfRange, build, verify_condition_I, verify_lower_bound
from .reports import CheckReport
from .schedule import (
    DEFAULT_SCAN_CAP,
    ScanCapExceeded,
    Schedule,
    ScheduleInvalid,
    build_schedule,
    parse_omega,
    validate_schedule,
)
from .serialize import (
    TableFormatError,
    checkpoints_dict,
    dump_json,
    is_dense,
    read_table_csv,
    write_rows_csv,
    write_table_csv,
)
from .verify import (
    IntSequence,
    NotViolated,
    RecipeRangeViolated,
    check_derivative_condition,
    check_dominance,
    check_increasing,
    check_submultiplicative,
    find_witness,
)

EXIT_OK, EXIT_VIOLATION, EXIT_POLICY, EXIT_IO = 0, 1, 2, 3


@dataclass
class RunConfig:
    command: str
    flags: Dict = field(default_factory=dict)
    seed: int = 0
    out: str = "."

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        flags = {k: v for k, v in sorted(vars(args).items())
                 if k not in ("func", "command", "seed", "out")}
        return cls(args.command, flags, getattr(args, "seed", 0), str(getattr(args, "out", ".")))

    def to_dict(self) -> dict:
        return {"command": self.command, "flags": self.flags, "seed": self.seed, "out": self.out}


def _err(msg: str) -> None:
    print(f"growthlab: {msg}", file=sys.stderr)


def _ledger_summary(sched: Schedule) -> List[dict]:
    return [{"k": led.k, "id": v.id, "verdict": v.verdict}
            for led in sched.ledgers for v in led.verdicts]


def _parse_overrides(items: Optional[List[str]]) -> Dict[int, int]:
    out = {}
    for item in items or []:
        k, _, v = item.partition("=")
        out[int(k)] = int(v)
    return out


# -- build -------------------------------------------------------------------


def cmd_build(args) -> int:
    out = Path(args.out)
    cfg = RunConfig.from_args(args)
    d = _parse_overrides(args.d)
    n = _parse_overrides(args.n)
    if args.d1 is not None:
        d[1] = args.d1
    if args.n1 is not None:
        n[1] = args.n1
    try:
        omega = parse_omega(args.omega)
    except (OSError, ValueError) as exc:
        _err(f"bad --omega: {exc}")
        return EXIT_IO
    try:
        sched = build_schedule(args.depth, args.mode, d=d, n=n, omega=omega, cap=args.scan_cap)
    except ScheduleInvalid as exc:
        _err(f"certified schedule rejected: {exc}")
        return EXIT_POLICY
    except ScanCapExceeded as exc:
        _err(f"parameter search gave up: {exc}")
        return EXIT_POLICY
    horizon = args.cap if sched.depth else 0
    table = build(sched, horizon)
    doc = {"version": __version__, "config": cfg.to_dict(), "horizon": horizon}
    doc.update(sched.to_dict())
    if table.anomalies:
        doc["anomalies"] = table.anomalies
    dump_json(out / "schedule.json", doc)
    write_table_csv(out / "table.csv", table, force_dense=args.dense)
    dump_json(out / "checkpoints.json", checkpoints_dict(table))
    for led in sched.ledgers:
        if led.failures:
            print(f"k={led.k}: ledger failures {', '.join(led.failures)} (uncertified)")
    print(f"wrote {out}/schedule.json, table.csv, checkpoints.json (horizon {horizon})")
    return EXIT_OK


# -- loading persisted runs --------------------------------------------------


def load_schedule(run_dir) -> tuple:
    path = Path(run_dir) / "schedule.json"
    try:
        doc = json.loads(path.read_text())
    except (OSError, ValueError) as exc:
        raise TableFormatError(f"cannot read {path}: {exc}") from exc
    return Schedule.from_dict(doc), doc


def load_table(run_dir, table_path=None) -> GrowthTable:
    """Rebuild f from the stored schedule and check it against the table CSV."""
    sched, doc = load_schedule(run_dir)
    xs, _, vals = read_table_csv(table_path or Path(run_dir) / "table.csv")
    horizon = xs[-1] if xs else 0
    table = GrowthTable(sched, horizon, strict=False)
    for x, v in zip(xs, vals):
        if table.value_at(x) != v:
            raise TableFormatError(f"table value at x={x} disagrees with the schedule")
    return table


def _load_sequence(args):
    run_dir = Path(args.dir)
    table_path = Path(args.table) if args.table else run_dir / "table.csv"
    if (run_dir / "schedule.json").exists():
        return load_table(run_dir, table_path)
    xs, _, vals = read_table_csv(table_path)
    if not is_dense(xs):
        raise TableFormatError("checkpoint-only table needs schedule.json alongside")
    return IntSequence(vals, first=xs[0])


# -- check -------------------------------------------------------------------


def cmd_check(args) -> int:
    cfg = RunConfig.from_args(args)
    try:
        seq = _load_sequence(args)
    except TableFormatError as exc:
        _err(str(exc))
        return EXIT_IO
    N = args.N if args.N is not None else seq.last
    needs_schedule = args.check in ("lowerbound", "conditionI", "dominance")
    if needs_schedule and not isinstance(seq, GrowthTable):
        _err(f"--check {args.check} needs a schedule.json run directory")
        return EXIT_IO
    try:
        if args.check == "submul":
            rep = check_submultiplicative(seq, N, args.strategy, count=args.count,
                                          seed=args.seed, width=args.width)
        elif args.check == "mono":
            rep = check_increasing(seq, seq.first, N)
        elif args.check == "derivative":
            rep = check_derivative_condition(seq, args.d, N)
        elif args.check == "lowerbound":
            rep = verify_lower_bound(seq, 1, N)
        elif args.check == "conditionI":
            ks = [args.k] if args.k else range(1, len(seq.entries) + 1)
            reps = [verify_condition_I(seq, k) for k in ks]
            rep = CheckReport("conditionI", "exhaustive", (1, N))
            rep.details["per_k"] = [r.to_dict() for r in reps]
            bad = [r for r in reps if not r.passed]
            if bad:
                rep.fail(k=bad[0].details["k"], **bad[0].violation)
        else:
            omega = parse_omega(args.omega) if args.omega else seq.schedule.omega
            if omega is None:
                _err("dominance needs an omega (none stored in schedule)")
                return EXIT_IO
            rep = check_dominance(seq, omega, hi=N)
    except (OutOfRange, ValueError) as exc:
        _err(str(exc))
        return EXIT_IO
    doc = {"version": __version__, "config": cfg.to_dict()}
    doc.update(rep.to_dict())
    if isinstance(seq, GrowthTable):
        doc["ledger"] = _ledger_summary(seq.schedule)
        if seq.schedule.mode != "certified":
            doc["watermark"] = "uncertified"
    dump_json(Path(args.out), doc)
    print(f"{args.check}: {rep.verdict}" + (f" {rep.violation}" if rep.violation else ""))
    return EXIT_OK if rep.passed else EXIT_VIOLATION


# -- witness -----------------------------------------------------------------


def cmd_witness(args) -> int:
    cfg = RunConfig.from_args(args)
    try:
        table = load_table(args.dir)
    except TableFormatError as exc:
        _err(str(exc))
        return EXIT_IO
    sched = table.schedule
    if sched.mode != "certified":
        _err("refusing to certify a witness on an uncertified (demo) schedule")
        return EXIT_POLICY
    ledgers = validate_schedule(sched)
    failed = [f"k={l.k}:{c}" for l in ledgers for c in l.failures]
    if failed:
        _err(f"stored schedule fails re-validation: {', '.join(failed)}")
        return EXIT_POLICY
    sched.ledgers = ledgers
    try:
        w = find_witness(table, args.C)
    except RecipeRangeViolated as exc:
        _err(f"recipe range violated ({exc.constraint}): {exc}")
        return EXIT_POLICY
    except OutOfRange as exc:
        _err(str(exc))
        return EXIT_IO
    except NotViolated as exc:
        _err(f"inequality not violated: {exc}")
        return EXIT_VIOLATION
    doc = {"version": __version__, "config": cfg.to_dict(), "check": "witness",
           "verdict": "violated", "witness": w.to_dict(), "recomputed": True,
           "ledger": _ledger_summary(sched)}
    dump_json(Path(args.out), doc)
    print(f"witness C={w.C} D={w.D} n={w.n}: lhs {w.lhs.bit_length()} bits > rhs {w.rhs.bit_length()} bits")
    return EXIT_OK


# -- algebra -----------------------------------------------------------------


def cmd_algebra(args) -> int:
    cfg = RunConfig.from_args(args)
    out = Path(args.out)
    try:
        if args.spec:
            spec = load_spec(args.spec)
        else:
            words = [parse_word(w) for item in args.forbidden or [] for w in item.split(",") if w]
            spec = MonomialAlgebraSpec(args.alphabet, tuple(words))
    except (OSError, ValueError, KeyError) as exc:
        _err(f"bad algebra spec: {exc}")
        return EXIT_IO
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", DegenerateSpec)
        seq = growth_table(spec, args.N)
    notes = [str(w.message) for w in caught]
    if spec.dropped:
        notes.append("reduced forbidden set; dropped " +
                     ", ".join("".join(map(str, w)) for w in spec.dropped))
    reports = [check_derivative_condition(seq, d) for d in (2, 3, 4)]
    reports.append(check_increasing(seq))
    if args.N >= 2:
        reports.append(check_submultiplicative(seq))
    write_rows_csv(out / "table.csv",
                   [(x, "algebra", v) for x, v in zip(range(args.N + 1), seq.values(0, args.N))])
    doc = {"version": __version__, "config": cfg.to_dict(), "spec": spec.to_dict(),
           "notes": notes, "checks": [r.to_dict() for r in reports]}
    dump_json(out / "report.json", doc)
    for note in notes:
        print(f"note: {note}")
    for r in reports:
        label = r.check + (f" d={r.details['d']}" if "d" in r.details else "")
        print(f"{label}: {r.verdict}")
    # monotonicity may fail legitimately (finite algebras); derivative checks may not
    ok = all(r.passed for r in reports if r.check == "derivative")
    return EXIT_OK if ok else EXIT_VIOLATION


# -- parser ------------------------------------------------------------------


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="growthlab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="choose parameters and build the table of f")
    b.add_argument("--d1", type=int)
    b.add_argument("--n1", type=int)
    b.add_argument("--d", action="append", metavar="K=D", help="override d_k")
    b.add_argument("--n", action="append", metavar="K=N", help="override n_k")
    b.add_argument("--depth", type=int, default=1)
    b.add_argument("--mode", choices=["certified", "demo"], default="certified")
    b.add_argument("--omega", default="none", help="log | const:a/b | file:PATH | none")
    b.add_argument("--cap", type=int, default=5000, help="table horizon")
    b.add_argument("--scan-cap", type=int, default=DEFAULT_SCAN_CAP)
    b.add_argument("--dense", action="store_true", help="write every row even above 1e5")
    b.add_argument("--out", default="run")
    b.set_defaults(func=cmd_build)

    c = sub.add_parser("check", help="run one property check on a stored table")
    c.add_argument("--dir", default="run")
    c.add_argument("--table")
    c.add_argument("--check", required=True,
                   choices=["submul", "mono", "derivative", "lowerbound", "conditionI", "dominance"])
    c.add_argument("--strategy", choices=["exhaustive", "sampled", "boundary"], default="exhaustive")
    c.add_argument("--d", type=int, default=2)
    c.add_argument("--k", type=int)
    c.add_argument("--N", type=int)
    c.add_argument("--count", type=int, default=100_000)
    c.add_argument("--width", type=int, default=64)
    c.add_argument("--omega")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--out", default="report.json")
    c.set_defaults(func=cmd_check)

    w = sub.add_parser("witness", help="certify the violation witness for a given C")
    w.add_argument("--dir", default="run")
    w.add_argument("--C", type=int, required=True)
    w.add_argument("--out", default="witness.json")
    w.set_defaults(func=cmd_witness)

    a = sub.add_parser("algebra", help="growth of a monomial algebra")
    a.add_argument("--alphabet", type=int, default=2)
    a.add_argument("--forbidden", action="append", help="digit-string word(s), comma separated")
    a.add_argument("--spec", help='JSON {"alphabet": 2, "forbidden": ["11"]}')
    a.add_argument("--N", type=int, default=40)
    a.add_argument("--out", default="algebra")
    a.set_defaults(func=cmd_algebra)
    return p


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
