"""Command line entry point: ``onlinerank {generate,oracle,run,check,concentrate}``.

Exit codes: 0 success, 1 a check or tail comparison failed, 2 usage error,
3 I/O error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import checks, experiments, instance_io, oracles, seeding
from .engines import ENGINES, EngineError, check_compatible, rank_dimension, run_engine
from .generators import GeneratorSpec, generate
from .graph_core import BipartiteInstance, FullyOnlineInstance, validate

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


@dataclass
class ExperimentConfig:
    """Everything that determines one ``concentrate`` run."""

    theorem: str = "T1"
    instance: Optional[str] = None
    generator: Optional[dict] = None
    engine: Optional[str] = None
    eps: Optional[float] = None
    trials: int = 100_000
    master_seed: int = 0
    alphas: list = field(default_factory=lambda: list(experiments.DEFAULT_ALPHAS))
    output: Optional[str] = None
    workers: int = 1

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        d = json.loads(text)
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    def load_instance(self):
        if (self.instance is None) == (self.generator is None):
            raise UsageError("config needs exactly one of 'instance' or 'generator'")
        if self.instance is not None:
            return instance_io.load(self.instance), Path(self.instance).stem
        spec = GeneratorSpec.from_dict(self.generator)
        ident = spec.family + "".join(f"_{k}{v}" for k, v in sorted(spec.params.items()))
        return generate(spec), ident


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _write_csv(rows, columns, out):
    w = csv.writer(out, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r[c]) for c in columns])


def _emit(text: str, path: Optional[str]):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _spec_from_args(args) -> GeneratorSpec:
    fam = args.family.replace("-", "_")
    need = {"upper_triangular": ["n"], "disjoint_perfect": ["n"], "figure1": [],
            "random_bipartite": ["ns", "nb", "p"], "random_fully_online": ["n", "p"]}
    if fam not in need:
        raise UsageError(f"unknown family {args.family!r}")
    missing = [k for k in need[fam] if getattr(args, k) is None]
    if missing:
        raise UsageError(f"family {args.family} needs --{', --'.join(missing)}")
    seed = args.seed if args.seed is not None else 0
    if fam in ("upper_triangular", "disjoint_perfect"):
        return GeneratorSpec(fam, {"n": args.n})
    if fam == "figure1":
        return GeneratorSpec(fam, {})
    if fam == "random_bipartite":
        params = {"n_s": args.ns, "n_b": args.nb, "p": args.p, "seed": seed}
        if args.weights is not None:
            params["weight_range"] = list(args.weights)
        if args.capacity_max is not None:
            params["capacity_max"] = args.capacity_max
        return GeneratorSpec(fam, params)
    return GeneratorSpec(fam, {"n": args.n, "p": args.p, "seed": seed})


def _oracle(instance, weighted: bool):
    if isinstance(instance, FullyOnlineInstance):
        return oracles.max_matching_general(instance)
    if weighted:
        return oracles.max_weight_seller_matching(instance)
    return oracles.max_matching_bipartite(instance)


def cmd_generate(args) -> int:
    spec = _spec_from_args(args)
    try:
        g = generate(spec)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    text = instance_io.dumps(g, {"generator": spec.to_dict()})
    _emit(text, args.output)
    if args.with_oracle:
        res = _oracle(g, g.weighted if isinstance(g, BipartiteInstance) else False)
        print(f"oracle_objective {_fmt(res.objective)}", file=sys.stderr if args.output in (None, "-") else sys.stdout)
    return EXIT_OK


def cmd_oracle(args) -> int:
    g = instance_io.load(args.instance)
    problems = validate(g)
    if problems:
        raise UsageError("invalid instance: " + "; ".join(problems))
    res = _oracle(g, args.weighted)
    out = io.StringIO()
    out.write(f"objective {_fmt(res.objective)}\n")
    for a, b in sorted(res.matching):
        out.write(f"pair {a} {b}\n")
    _emit(out.getvalue(), args.output)
    return EXIT_OK


def read_rank_file(path) -> np.ndarray:
    """Whitespace- or comma-separated decimal literals, ``#`` comments allowed."""
    text = Path(path).read_text()
    tokens = []
    for line in text.splitlines():
        line = line.split("#", 1)[0]
        tokens.extend(t for t in line.replace(",", " ").split() if t)
    try:
        return np.array([float(t) for t in tokens], dtype=np.float64)
    except ValueError as exc:
        raise UsageError(f"malformed rank file {path}: {exc}") from exc


def cmd_run(args) -> int:
    g = instance_io.load(args.instance)
    problems = validate(g)
    if problems:
        raise UsageError("invalid instance: " + "; ".join(problems))
    check_compatible(g, args.engine, args.eps)
    dim = rank_dimension(g)
    if args.ranks is not None:
        x = read_rank_file(args.ranks)
        if x.shape[0] != dim:
            raise UsageError(f"rank file has {x.shape[0]} values, instance needs {dim}")
    else:
        x = seeding.trial_ranks(args.seed if args.seed is not None else 0, 0, dim)
    rec = run_engine(g, args.engine, x, args.eps)
    out = io.StringIO()
    out.write(f"engine {args.engine}\n")
    if args.eps is not None:
        out.write(f"eps {_fmt(args.eps)}\n")
    out.write("ranks " + " ".join(repr(float(v)) for v in x) + "\n")
    out.write(f"objective {_fmt(rec.objective)}\n")
    for a, b in sorted(rec.matching):
        out.write(f"pair {a} {b}\n")
    if isinstance(g, BipartiteInstance) and g.weighted:
        for j, r in enumerate(rec.revenue):
            out.write(f"revenue {j} {_fmt(r)}\n")
        for i, u in enumerate(rec.utility):
            out.write(f"utility {i} {_fmt(u)}\n")
    _emit(out.getvalue(), args.output)
    return EXIT_OK


CHECK_COLUMNS = ("lemma_id", "engine", "seed", "holds", "f_x", "f_xprime", "bound")


def cmd_check(args) -> int:
    if args.lemma not in checks.LEMMAS:
        raise UsageError(f"unknown lemma id {args.lemma!r}; choose from {', '.join(checks.LEMMAS)}")
    if args.cases < 1:
        raise UsageError("--cases must be >= 1")
    eps = args.eps
    if eps is not None and checks.LEMMA_ENGINE[args.lemma] != "eps_ranking":
        raise UsageError(f"--eps does not apply to {args.lemma}")
    rows = []
    failed = 0
    for case_seed, rep in checks.run_suite(args.lemma, args.cases,
                                           args.seed if args.seed is not None else 0, eps):
        rows.append({"lemma_id": rep.lemma_id, "engine": rep.engine, "seed": case_seed,
                     "holds": rep.holds, "f_x": rep.f_x, "f_xprime": rep.f_xprime,
                     "bound": rep.bound})
        if not rep.holds and rep.lemma_id in checks.EXACT_LEMMAS:
            failed += 1
    out = io.StringIO()
    _write_csv(rows, CHECK_COLUMNS, out)
    _emit(out.getvalue(), args.output)
    print(f"{args.lemma}: {args.cases} cases, {failed} violations", file=sys.stderr)
    return EXIT_VIOLATION if failed else EXIT_OK


def _config_from_args(args) -> ExperimentConfig:
    if args.config is not None:
        try:
            cfg = ExperimentConfig.from_json(Path(args.config).read_text())
        except json.JSONDecodeError as exc:
            raise UsageError(f"config {args.config}: {exc}") from exc
    else:
        cfg = ExperimentConfig()
    for name in ("theorem", "instance", "engine", "eps", "trials", "workers"):
        v = getattr(args, name)
        if v is not None:
            setattr(cfg, name, v)
    if args.seed is not None:
        cfg.master_seed = args.seed
    if args.alphas is not None:
        cfg.alphas = [float(a) for a in args.alphas.split(",")]
    if args.output is not None:
        cfg.output = args.output
    if args.family is not None:
        cfg.generator = _spec_from_args(args).to_dict()
    if cfg.theorem not in experiments.THEOREM_ENGINE:
        raise UsageError(f"unknown theorem {cfg.theorem!r}")
    return cfg


def cmd_concentrate(args) -> int:
    cfg = _config_from_args(args)
    if args.save_config:
        Path(args.save_config).write_text(cfg.to_json())
    g, ident = cfg.load_instance()
    problems = validate(g)
    if problems:
        raise UsageError("invalid instance: " + "; ".join(problems))
    try:
        rows, _ = experiments.run_concentration(
            g, cfg.theorem, cfg.trials, cfg.master_seed, engine=cfg.engine, eps=cfg.eps,
            alphas=cfg.alphas, instance_id=ident, workers=cfg.workers)
    except oracles.OracleTooLarge as exc:
        raise UsageError(str(exc)) from exc
    out = io.StringIO()
    _write_csv(rows, experiments.RESULT_COLUMNS, out)
    if cfg.output in (None, "-"):
        sys.stdout.write(out.getvalue())
        table = sys.stderr
    else:
        Path(cfg.output).write_text(out.getvalue())
        table = sys.stdout
    print(f"{'alpha':>6} {'threshold':>12} {'empirical':>10} {'ci_upper':>10} {'bound':>10}  ok",
          file=table)
    for r in rows:
        print(f"{r['alpha']:>6.2f} {r['threshold']:>12.4g} {r['empirical_tail']:>10.5f} "
              f"{r['ci_upper']:>10.5f} {r['theoretical_bound']:>10.5f}  {_fmt(r['satisfied'])}",
              file=table)
    return EXIT_OK if all(r["satisfied"] for r in rows) else EXIT_VIOLATION


def _common(p):
    p.add_argument("--seed", type=int, default=None, help="master seed")
    p.add_argument("-o", "--output", default=None, help="output path ('-' for stdout)")
    p.add_argument("--format", choices=["csv"], default="csv")


def _generator_args(p, family_positional: bool):
    if family_positional:
        p.add_argument("family", help="upper-triangular | random-bipartite | figure1 | "
                                      "random-fully-online | disjoint-perfect")
    else:
        p.add_argument("--family", default=None)
    p.add_argument("--n", type=int)
    p.add_argument("--ns", type=int)
    p.add_argument("--nb", type=int)
    p.add_argument("--p", type=float)
    p.add_argument("--weights", type=float, nargs=2, metavar=("LO", "HI"),
                   help="log-uniform seller weights in [LO, HI]")
    p.add_argument("--capacity-max", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="onlinerank",
                                     description="Ranking-family online matching experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write an instance file")
    _generator_args(p, True)
    p.add_argument("--with-oracle", action="store_true")
    _common(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("oracle", help="exact offline optimum of an instance")
    p.add_argument("instance")
    p.add_argument("--weighted", action="store_true", help="maximise seller weight")
    _common(p)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("run", help="one run of an engine")
    p.add_argument("instance")
    p.add_argument("--engine", required=True, choices=ENGINES)
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--ranks", default=None, help="file of decimal rank literals")
    _common(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("check", help="randomized structural property suite")
    p.add_argument("lemma", help=", ".join(checks.LEMMAS))
    p.add_argument("--cases", type=int, default=1000)
    p.add_argument("--eps", type=float, default=None)
    _common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("concentrate", help="Monte Carlo tail experiment")
    p.add_argument("--config", default=None, help="ExperimentConfig JSON")
    p.add_argument("--save-config", default=None, help="write the effective config here")
    p.add_argument("--instance", default=None)
    p.add_argument("--theorem", choices=["T1", "T2", "T3"], default=None)
    p.add_argument("--engine", choices=ENGINES, default=None)
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--alphas", default=None, help="comma-separated alpha grid")
    p.add_argument("--workers", type=int, default=None)
    _generator_args(p, False)
    _common(p)
    p.set_defaults(func=cmd_concentrate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_USAGE
    try:
        return args.func(args)
    except (UsageError, EngineError, checks.CheckError, instance_io.InstanceFormatError,
            ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
