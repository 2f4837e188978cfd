"""Command-line front end: ``pointerlab <command> ...``."""
from __future__ import annotations

import argparse
import csv
import io
import random
import sys
from dataclasses import dataclass
from typing import Optional

from . import formats
from .adversary import (
    POTENTIAL_STRATEGIES, STRATEGIES, CountingOracle, estimate_drift, play_adversary_game,
)
from .classical import AlgoConfig, run_good_column, run_R0_f, run_R1_g
from .config import ConfigError, LabConfig, derive_seed, load_config
from .functions import (
    FAMILIES, InfeasibleSize, evaluate, generate_positive, good_columns,
    sample_hard_h1, sample_hard_negative,
)
from .grid import SchemaError
from .measures import SizeBoundExceeded, TableParseError, all_measures, load_table
from .quantum import run_Q_f, run_Q_h, run_QE_g, run_QE_h

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_SIZE = 0, 1, 2, 3

ALGORITHMS = {
    "r0_f": "f", "r1_g": "g", "good_col": "g", "q_f": "f",
    "q_h": "h", "qe_h": "h", "qe_g": "g",
}
CSV_HEADER = ["family", "n", "m", "k", "seed", "trial", "algorithm", "output", "truth",
              "queries", "cost_units"]


class UsageError(Exception):
    pass


@dataclass
class SweepSpec:
    family: str
    algorithm: str
    sizes: list[tuple[int, int, int]]
    trials: int
    seed: int
    sign: str = "pos"
    garbage: str = "ones"
    out: Optional[str] = None

    def __post_init__(self):
        if self.trials < 1:
            raise UsageError("trials must be >= 1")
        if not self.sizes:
            raise UsageError("at least one size is needed")
        if self.algorithm not in ALGORITHMS:
            raise UsageError(f"unknown algorithm {self.algorithm!r}; "
                             f"choose from {', '.join(ALGORITHMS)}")


def parse_sizes(text: str) -> list[tuple[int, int, int]]:
    out = []
    for part in text.split(","):
        bits = part.strip().lower().split("x")
        if len(bits) not in (2, 3):
            raise UsageError(f"size {part!r} must look like NxM or NxMxK")
        try:
            vals = [int(b) for b in bits]
        except ValueError as exc:
            raise UsageError(f"size {part!r} must look like NxM or NxMxK") from exc
        out.append((vals[0], vals[1], vals[2] if len(vals) == 3 else 1))
    return out


def make_instance(family: str, n: int, m: int, k: int, sign: str, seed: int,
                  garbage: str = "ones"):
    if sign == "pos":
        return generate_positive(family, n, m, k, seed=seed, garbage=garbage)
    if sign == "neg":
        return sample_hard_negative(family, n, m, seed=seed, k=k)
    if sign == "hard-h1":
        if family != "h" or k != 1:
            raise UsageError("--sign hard-h1 needs --family h and k = 1")
        return sample_hard_h1(n, m, seed=seed)[0]
    if sign == "mix":
        pick = "pos" if random.Random(seed).random() < 0.5 else "neg"
        return make_instance(family, n, m, k, pick, seed, garbage)
    raise UsageError(f"unknown sign {sign!r}")


def run_algorithm(algorithm: str, x, cfg: LabConfig, seed: int) -> tuple[int, int, int, float]:
    """(output, truth, queries, cost_units) for one run."""
    truth = evaluate(x)
    acfg = AlgoConfig(alpha_sample=cfg.alpha_sample, max_reps=cfg.max_reps, seed=seed)
    if algorithm == "r0_f":
        r = run_R0_f(CountingOracle(x), acfg)
    elif algorithm == "r1_g":
        r = run_R1_g(CountingOracle(x), acfg)
    elif algorithm == "good_col":
        j = random.Random(seed).randrange(1, x.m + 1)
        o = CountingOracle(x)
        out = int(run_good_column(o, j))
        return out, int(j in good_columns(x)), o.queries, float(o.queries)
    elif algorithm == "q_f":
        r = run_Q_f(x, cfg, seed)
    elif algorithm == "q_h":
        r = run_Q_h(x, cfg, seed)
    elif algorithm == "qe_h":
        r = run_QE_h(x, cfg, seed)
    elif algorithm == "qe_g":
        r = run_QE_g(x, cfg, seed)
    else:
        raise UsageError(f"unknown algorithm {algorithm!r}")
    return r.output, truth, r.queries, r.cost_units


def _fmt_cost(c: float) -> str:
    return f"{c:.6f}".rstrip("0").rstrip(".")


def sweep_rows(spec: SweepSpec, cfg: LabConfig):
    for n, m, k in spec.sizes:
        for trial in range(spec.trials):
            iseed = derive_seed(spec.seed, "instance", spec.family, n, m, k, trial)
            aseed = derive_seed(spec.seed, "algorithm", spec.algorithm, n, m, k, trial)
            x = make_instance(spec.family, n, m, k, spec.sign, iseed, spec.garbage)
            out, truth, q, cost = run_algorithm(spec.algorithm, x, cfg, aseed)
            yield [spec.family, n, m, k, spec.seed, trial, spec.algorithm, out, truth, q,
                   _fmt_cost(cost)]


def _csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    w.writerows(rows)
    return buf.getvalue()


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path) as fh:
        return fh.read()


# --------------------------------------------------------------------------
# commands


def cmd_gen(a, cfg: LabConfig) -> int:
    k = a.k if a.k is not None else 1
    x = make_instance(a.family, a.n, a.m, k, a.sign, a.seed, a.garbage)
    _emit(formats.dump_instance(x), a.out)
    return EXIT_OK


def cmd_eval(a, cfg: LabConfig) -> int:
    x = formats.load_instance(_read_text(a.instance))
    _emit(f"{evaluate(x)}\n", a.out)
    return EXIT_OK


def cmd_run(a, cfg: LabConfig) -> int:
    x = formats.load_instance(_read_text(a.instance))
    if a.algorithm not in ALGORITHMS:
        raise UsageError(f"unknown algorithm {a.algorithm!r}")
    if ALGORITHMS[a.algorithm] != x.family:
        raise UsageError(f"{a.algorithm} runs on family {ALGORITHMS[a.algorithm]}, "
                         f"instance is {x.family}")
    rows = []
    for trial in range(a.trials):
        aseed = derive_seed(a.seed, "algorithm", a.algorithm, x.n, x.m, x.k, trial)
        out, truth, q, cost = run_algorithm(a.algorithm, x, cfg, aseed)
        rows.append([x.family, x.n, x.m, x.k, a.seed, trial, a.algorithm, out, truth, q,
                     _fmt_cost(cost)])
    _emit(_csv(rows), a.out)
    return EXIT_OK


def cmd_sweep(a, cfg: LabConfig) -> int:
    family = a.family or ALGORITHMS.get(a.algorithm)
    spec = SweepSpec(family, a.algorithm, parse_sizes(a.sizes), a.trials, a.seed,
                     a.sign, a.garbage, a.out)
    if family != ALGORITHMS[spec.algorithm]:
        raise UsageError(f"{spec.algorithm} runs on family {ALGORITHMS[spec.algorithm]}")
    _emit(_csv(sweep_rows(spec, cfg)), a.out)
    return EXIT_OK


def cmd_adversary(a, cfg: LabConfig) -> int:
    n = a.n if a.n is not None else 2 * a.m
    rep = play_adversary_game(a.strategy, a.m, n, seed=a.seed)
    target = a.m * a.m - 1
    lines = [
        f"strategy {rep.strategy}",
        f"n {rep.n} m {rep.m}",
        f"first_failure {rep.first_failure if rep.first_failure is not None else 'none'}",
        f"undetermined_through {rep.undetermined_through}",
        f"target {target}",
        f"holds {'yes' if rep.holds else 'no'}",
    ]
    lines += [f"problem {p}" for p in rep.problems]
    text = "\n".join(lines) + "\n"
    if rep.witnesses:
        neg, pos = rep.witnesses
        text += (f"# negative witness, evaluate = {evaluate(neg)}\n" + formats.dump_instance(neg)
                 + f"# positive witness, evaluate = {evaluate(pos)}\n"
                 + formats.dump_instance(pos))
    _emit(text, a.out)
    return EXIT_OK if rep.holds or n != 2 * a.m else EXIT_FAIL


def cmd_potential(a, cfg: LabConfig) -> int:
    rep = estimate_drift(a.variant, a.n, a.m, a.strategy, a.samples, a.seed, cfg.C0)
    t = rep.worst_step
    text = "\n".join([
        f"variant {rep.variant}",
        f"n {rep.n} m {rep.m} strategy {rep.strategy} samples {rep.samples}",
        f"I_0 {rep.initial:g}",
        f"bound {rep.bound:.6f}",
        f"max_step_mean {rep.max_mean:.6f}",
        f"worst_step {t + 1} mean {rep.means[t]:.6f} stderr {rep.stderrs[t]:.6f}",
        f"holds {'yes' if rep.holds else 'no'}",
    ]) + "\n"
    _emit(text, a.out)
    return EXIT_OK


def cmd_measure(a, cfg: LabConfig) -> int:
    f = load_table(_read_text(a.table))
    res = all_measures(f)
    text = "".join(f"{k} {v}\n" for k, v in res.items())
    _emit(text, a.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="base seed (default 0)")
    common.add_argument("--config", help="key = value constants file")
    common.add_argument("--out", help="output file (default stdout)")

    p = argparse.ArgumentParser(prog="pointerlab",
                                description="Query-complexity lab for pointer functions.")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", parents=[common], help="generate an instance file")
    g.add_argument("--family", choices=FAMILIES, required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--m", type=int, required=True)
    g.add_argument("--k", type=int)
    g.add_argument("--sign", choices=("pos", "neg", "hard-h1"), default="pos")
    g.add_argument("--garbage", choices=("ones", "random"), default="ones")
    g.set_defaults(func=cmd_gen)

    e = sub.add_parser("eval", parents=[common], help="evaluate an instance file")
    e.add_argument("instance")
    e.set_defaults(func=cmd_eval)

    r = sub.add_parser("run", parents=[common], help="run an algorithm on an instance file")
    r.add_argument("--algorithm", required=True)
    r.add_argument("--instance", required=True)
    r.add_argument("--trials", type=int, default=1)
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("sweep", parents=[common], help="run an algorithm over generated instances")
    s.add_argument("--algorithm", required=True)
    s.add_argument("--family", choices=FAMILIES)
    s.add_argument("--sizes", required=True, help="comma list of NxM or NxMxK")
    s.add_argument("--trials", type=int, default=10)
    s.add_argument("--sign", choices=("pos", "neg", "mix", "hard-h1"), default="pos")
    s.add_argument("--garbage", choices=("ones", "random"), default="ones")
    s.set_defaults(func=cmd_sweep)

    ad = sub.add_parser("adversary", parents=[common], help="play a strategy against the adversary")
    ad.add_argument("--strategy", choices=STRATEGIES, required=True)
    ad.add_argument("--m", type=int, required=True)
    ad.add_argument("--n", type=int)
    ad.set_defaults(func=cmd_adversary)

    po = sub.add_parser("potential", parents=[common], help="estimate the potential drift")
    po.add_argument("--variant", choices=("g-lower", "h1-lower"), required=True)
    po.add_argument("--n", type=int, required=True)
    po.add_argument("--m", type=int, required=True)
    po.add_argument("--strategy", choices=POTENTIAL_STRATEGIES, default="column-scan")
    po.add_argument("--samples", type=int, default=10_000)
    po.set_defaults(func=cmd_potential)

    me = sub.add_parser("measure", parents=[common], help="exact measures of a truth table")
    me.add_argument("table")
    me.set_defaults(func=cmd_measure)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config) if args.config else LabConfig()
        if getattr(args, "trials", 1) < 1:
            raise UsageError("trials must be >= 1")
        if getattr(args, "samples", 1) < 1:
            raise UsageError("samples must be >= 1")
        return args.func(args, cfg)
    except SizeBoundExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SIZE
    except (formats.ParseError, TableParseError, ConfigError, UsageError, SchemaError,
            InfeasibleSize, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
