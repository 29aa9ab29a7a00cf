"""Command-line front end: channels, teleport, measures, tables, audit.

Exit codes: 0 completed, 2 usage error, 3 numerical failure (optimizer and
grid oracle disagree, or an outcome fired without a correction).
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import asdict, dataclass, field

from . import __version__
from .channels import PARAMETRIC, ChannelSpec, Family, build_channel, classify_star
from .claims import TABLE_IDS
from .measurement import ORTHONORMAL_TOL, build_outcome_set, gram_report, has_outcome_set
from .measures import DEFAULT_RESOLUTION, DEFAULT_SEED, DEFAULT_STARTS, measure_report, tangle
from .report import (
    align,
    build_table,
    dumps_csv,
    dumps_json,
    envelope,
    findings_text,
    gram_finding,
    pmax_finding,
    subscript_finding,
    table_csv_rows,
    table_text,
)
from .teleport import (
    JUNG_TOL,
    CLAIMED_PMAX,
    CORRECTION_TABLES,
    ORACLE_AGREEMENT_TOL,
    InputQubit,
    MissingCorrectionError,
    OracleDisagreement,
    haar_inputs,
    jung_audit,
    run_protocol,
)

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 2, 3
FORMATS = ("text", "csv", "json")


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    channels: tuple[str, ...] = ()
    n: float = 1.0
    gamma: float = 0.0
    delta: float = 0.0
    alpha: complex | None = None
    beta: complex | None = None
    random: int | None = None
    seed: int = DEFAULT_SEED
    tol: float = ORTHONORMAL_TOL
    resolution: int = DEFAULT_RESOLUTION
    starts: int = DEFAULT_STARTS
    table_id: str | None = None
    format: str = "text"
    out: str | None = None

    def __post_init__(self):
        if self.alpha is not None or self.beta is not None:
            if self.alpha is None or self.beta is None:
                raise UsageError("--alpha and --beta must be given together")
            try:
                q = InputQubit.normalized(self.alpha, self.beta)
            except ValueError as exc:
                raise UsageError(str(exc)) from None
            self.alpha, self.beta = q.alpha, q.beta

    def specs(self) -> list[ChannelSpec]:
        try:
            return [ChannelSpec.parse(c, self.n, self.gamma, self.delta) for c in self.channels]
        except ValueError as exc:
            raise UsageError(str(exc)) from None

    def to_dict(self) -> dict:
        d = asdict(self)
        for k in ("alpha", "beta"):
            if d[k] is not None:
                d[k] = [d[k].real, d[k].imag]
        d["channels"] = list(d["channels"])
        del d["out"]
        return d


@dataclass
class Output:
    results: object
    findings: list = field(default_factory=list)
    text: str = ""
    csv_rows: list = field(default_factory=list)
    exit_code: int = EXIT_OK


def parse_complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"malformed amplitude {text!r}") from None


def _amplitudes(state) -> dict:
    return {
        format(i, f"0{state.num_qubits}b"): [a.real, a.imag]
        for i, a in enumerate(state.amplitudes.tolist())
        if abs(a) > 0
    }


def _cell(v) -> str:
    v = complex(v)
    return f"{v.real:.4g}" if abs(v.imag) < 1e-15 else f"{v.real:.4g}{v.imag:+.4g}i"


# ---- commands ---------------------------------------------------------------

def _catalog(cfg: RunConfig) -> list[ChannelSpec]:
    return RunConfig(cfg.command, tuple(f.value for f in Family), cfg.n, cfg.gamma, cfg.delta).specs()


def cmd_channels(cfg: RunConfig) -> Output:
    specs = cfg.specs() if cfg.channels else _catalog(cfg)
    results, rows, csv_rows = [], [], []
    for spec in specs:
        state = build_channel(spec).state
        star = classify_star(state)
        basis = has_outcome_set(spec)
        ortho = gram_report(build_outcome_set(spec), cfg.tol).is_orthonormal if basis else None
        results.append({
            "id": spec.id,
            "params": spec.to_dict(),
            "parametric": spec.family in PARAMETRIC,
            "is_star": star.is_star,
            "star_center": star.center,
            "basis": basis,
            "orthonormal": ortho,
            "amplitudes": _amplitudes(state),
        })
        kets = " ".join(f"{_cell(a)}|{k}>" for k, a in zip(
            (format(i, "03b") for i in range(8)), state.amplitudes.tolist()) if abs(a) > 0)
        params = f"n={spec.n:g} g={spec.gamma:g} d={spec.delta:g}" if spec.family in PARAMETRIC else "-"
        rows.append([spec.id, params, star.is_star, basis, ortho, kets])
        for col, v in (("is_star", star.is_star), ("basis", basis), ("orthonormal", ortho)):
            csv_rows.append(("channels", spec.id, col, v, None, None))
    text = align(["channel", "params", "star", "basis", "orthonormal", "amplitudes"], rows)
    return Output(results, [], text, csv_rows)


def _inputs(cfg: RunConfig) -> list[InputQubit]:
    if cfg.random is not None:
        if cfg.random < 1:
            raise UsageError("--random needs a positive count")
        return haar_inputs(cfg.random, cfg.seed)
    if cfg.alpha is None:
        raise UsageError("teleport needs --alpha/--beta or --random N")
    return [InputQubit(cfg.alpha, cfg.beta)]


def cmd_teleport(cfg: RunConfig) -> Output:
    if len(cfg.channels) != 1:
        raise UsageError("teleport takes exactly one --channel")
    spec = cfg.specs()[0]
    if spec.family not in CORRECTION_TABLES:
        raise UsageError(f"channel {spec.id!r} has no teleportation protocol (try: {', '.join(f.value for f in CORRECTION_TABLES)})")
    reports = [run_protocol(spec, q, tol=cfg.tol) for q in _inputs(cfg)]
    findings = []
    if reports[0].gram is not None:
        findings.append(gram_finding(spec.id, reports[0].gram))

    blocks, csv_rows = [], []
    for i, r in enumerate(reports):
        a, b = r.input.alpha, r.input.beta
        head = (f"channel={spec.id} input=({_cell(a)}, {_cell(b)}) mode={r.mode} "
                f"perfect={'yes' if r.perfect else 'no'} min_fidelity={r.min_fidelity:.12g}")
        rows = [[row.label, row.probability, row.fidelity, row.correction] for row in r.rows]
        blocks.append(head + "\n" + align(["outcome", "probability", "fidelity", "correction"], rows))
        for row in r.rows:
            csv_rows.append(("teleport", f"{i}:{row.label}", "probability", row.probability, None, None))
            csv_rows.append(("teleport", f"{i}:{row.label}", "fidelity", row.fidelity, None, None))
    return Output([r.to_dict() for r in reports], findings, "\n".join(blocks), csv_rows)


def _oracle_failure(subject: str, p: float, oracle: float) -> list[str]:
    if abs(p - oracle) > ORACLE_AGREEMENT_TOL or p < oracle - JUNG_TOL:
        return [f"{subject}: optimizer {p:.9g} vs grid oracle {oracle:.9g}"]
    return []


def cmd_measures(cfg: RunConfig) -> Output:
    if not cfg.channels:
        raise UsageError("measures needs --channel")
    results, findings, rows, csv_rows, failures = [], [], [], [], []
    for spec in cfg.specs():
        state = build_channel(spec).state
        rep = measure_report(spec.id, state, cfg.starts, cfg.seed, cfg.resolution)
        results.append(rep.to_dict())
        failures += _oracle_failure(spec.id, rep.p_max, rep.p_max_oracle)
        claimed = CLAIMED_PMAX.get(spec.family)
        if claimed is not None and abs(rep.p_max - claimed) > JUNG_TOL:
            findings.append(pmax_finding(spec.id, rep.p_max, claimed, rep.p_max_oracle))
        t = tangle(state)
        f = subscript_finding(spec.id, t.tau_residual, t.tau_printed_variant)
        if f is not None:
            findings.append(f)
        flat = [(f"C_l1({m})", v) for m, v in rep.coherence.items()]
        flat += [(f"C({p})", v) for p, v in rep.concurrence.items()]
        flat += [(f"N({p})", v) for p, v in rep.negativity.items()]
        flat += [("tau", rep.tangle), ("tau_residual", rep.tau_residual), ("P_max", rep.p_max),
                 ("P_max_oracle", rep.p_max_oracle), ("G", rep.groverian)]
        for col, v in flat:
            claim = claimed if col == "P_max" else None
            rows.append([spec.id, col, v, round(v, 3)])
            csv_rows.append(("measures", spec.id, col, v, claim, abs(v - claim) if claim is not None else None))
    text = align(["channel", "quantity", "value", "rounded"], rows)
    return Output(results, findings, text, csv_rows, _failure_code(failures))


def cmd_tables(cfg: RunConfig) -> Output:
    artifact, findings = build_table(cfg.table_id, cfg.starts, cfg.seed)
    return Output(artifact.to_dict(), findings, table_text(artifact), table_csv_rows(artifact))


def cmd_audit(cfg: RunConfig) -> Output:
    specs = cfg.specs() if cfg.channels else _catalog(cfg)
    audits, findings, rows, csv_rows, failures = [], [], [], [], []
    for spec in specs:
        a = jung_audit(spec, cfg.starts, cfg.seed, cfg.resolution)
        audits.append(a)
        if not a.oracle_agrees:
            failures.append(f"{spec.id}: optimizer {a.p_max:.9g} vs grid oracle {a.oracle_p_max:.9g}")
        if a.pmax_mismatch:
            findings.append(pmax_finding(spec.id, a.p_max, a.paper_claimed_p_max, a.oracle_p_max))
        if a.protocol_mode == "analysis":
            findings.append(gram_finding(spec.id, gram_report(build_outcome_set(spec), cfg.tol)))
        rows.append([spec.id, a.p_max, a.groverian, a.oracle_p_max, a.paper_claimed_p_max,
                     a.perfect_teleport, a.protocol_mode, "CONTRADICTS" if a.contradicts_conjecture else ""])
        for col, v, claim in (("p_max", a.p_max, a.paper_claimed_p_max), ("groverian", a.groverian, None),
                              ("oracle_p_max", a.oracle_p_max, None), ("perfect_teleport", a.perfect_teleport, None)):
            csv_rows.append(("audit", spec.id, col, v, claim, abs(v - claim) if claim is not None else None))
    count = sum(a.contradicts_conjecture for a in audits)
    # the same count if every tabled protocol were perfect and claimed P_max held
    as_claimed = [a.channel.id for a in audits if a.channel.family in CORRECTION_TABLES
                  and abs(CLAIMED_PMAX[a.channel.family] - 0.5) > JUNG_TOL]
    summary = {"channels": len(audits), "contradictions": count,
               "contradicting": [a.channel.id for a in audits if a.contradicts_conjecture],
               "contradictions_as_claimed": len(as_claimed), "contradicting_as_claimed": as_claimed}
    text = align(["channel", "p_max", "G", "oracle", "claimed", "perfect", "mode", "conjecture"], rows)
    text += f"\n{count} of {len(audits)} channels contradict 'perfect teleportation iff P_max = 1/2'\n"
    text += f"{len(as_claimed)} would, taking the claimed P_max and perfect teleportation at face value\n"
    results = {"audits": [a.to_dict() for a in audits], "summary": summary}
    return Output(results, findings, text, csv_rows, _failure_code(failures))


def _failure_code(failures: list[str]) -> int:
    for msg in failures:
        print(f"numerical failure: {msg}", file=sys.stderr)
    return EXIT_NUMERIC if failures else EXIT_OK


COMMANDS = {
    "channels": cmd_channels,
    "teleport": cmd_teleport,
    "measures": cmd_measures,
    "tables": cmd_tables,
    "audit": cmd_audit,
}


# ---- argument parsing ---------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=DEFAULT_SEED, help="seed for random inputs and optimizer starts")
    common.add_argument("--tol", type=float, default=ORTHONORMAL_TOL, help="orthonormality tolerance")
    common.add_argument("--format", choices=FORMATS, default="text")
    common.add_argument("--out", help="write to this path instead of stdout")

    params = argparse.ArgumentParser(add_help=False)
    params.add_argument("--n", type=float, default=1.0, help="weight parameter of the W_n families")
    params.add_argument("--gamma", type=float, default=0.0, help="phase in [0, 2pi)")
    params.add_argument("--delta", type=float, default=0.0, help="phase in [0, 2pi)")

    search = argparse.ArgumentParser(add_help=False)
    search.add_argument("--starts", type=int, default=DEFAULT_STARTS, help="random optimizer starts")
    search.add_argument("--resolution", type=int, default=DEFAULT_RESOLUTION, help="grid oracle resolution")

    parser = argparse.ArgumentParser(prog="startele", description="Teleportation through three-qubit channels.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("channels", parents=[common, params], help="list the channel catalog")
    p.add_argument("--channel", action="append", default=[], help="restrict to these ids")

    p = sub.add_parser("teleport", parents=[common, params], help="run a teleportation protocol")
    p.add_argument("--channel", required=True)
    p.add_argument("--alpha", type=parse_complex)
    p.add_argument("--beta", type=parse_complex)
    p.add_argument("--random", type=int, metavar="N", help="use N seeded Haar-random inputs")

    p = sub.add_parser("measures", parents=[common, params, search], help="coherence and entanglement measures")
    p.add_argument("--channel", action="append", required=True)

    p = sub.add_parser("tables", parents=[common, search], help="claimed vs computed tables")
    p.add_argument("--id", dest="table_id", required=True, choices=TABLE_IDS)

    p = sub.add_parser("audit", parents=[common, params, search], help="teleportation vs P_max = 1/2 audit")
    p.add_argument("--channel", action="append", default=[], help="restrict to these ids")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    ch = args.channel if hasattr(args, "channel") else []
    return RunConfig(
        command=args.command,
        channels=tuple([ch] if isinstance(ch, str) else ch),
        n=getattr(args, "n", 1.0),
        gamma=getattr(args, "gamma", 0.0),
        delta=getattr(args, "delta", 0.0),
        alpha=getattr(args, "alpha", None),
        beta=getattr(args, "beta", None),
        random=getattr(args, "random", None),
        seed=args.seed,
        tol=args.tol,
        resolution=getattr(args, "resolution", DEFAULT_RESOLUTION),
        starts=getattr(args, "starts", DEFAULT_STARTS),
        table_id=getattr(args, "table_id", None),
        format=args.format,
        out=args.out,
    )


def render(cfg: RunConfig, out: Output) -> str:
    if cfg.format == "json":
        return dumps_json(envelope(cfg.command, cfg.to_dict(), out.results, out.findings, __version__))
    if cfg.format == "csv":
        return dumps_csv(out.csv_rows)
    return out.text + findings_text(out.findings)


def run(cfg: RunConfig) -> tuple[int, str]:
    """Execute a command; returns (exit code, rendered output)."""
    out = COMMANDS[cfg.command](cfg)
    return out.exit_code, render(cfg, out)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = config_from_args(args)
        code, text = run(cfg)
    except UsageError as exc:
        print(f"startele {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (MissingCorrectionError, OracleDisagreement, ArithmeticError) as exc:
        print(f"startele {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
