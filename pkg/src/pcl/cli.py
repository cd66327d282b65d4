"""Command-line harness.

Exit codes: 0 on success, 1 when an experiment suite records a failing check,
2 on usage or input errors.  ``PCL_SEED`` supplies the default seed.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys

import numpy as np

from . import core, dimensions, disambiguation, experiments, geometry, learners, online
from . import serialize
from .serialize import FormatError


def _default_seed() -> int:
    env = os.environ.get("PCL_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise FormatError(f"PCL_SEED must be an integer, got {env!r}") from None


def _emit(obj, out_path):
    text = serialize.dump_json(obj, out_path)
    if out_path is None:
        print(text)
    else:
        print(f"wrote {out_path}", file=sys.stderr)


def cmd_dim(args) -> int:
    cls, names = serialize.class_from_dict(serialize.load_json(args.input))
    report = dimensions.measure_report(cls, args.measure, witness=args.witness)
    out = {
        "measure": report.measure,
        "value": report.value,
        "domain_size": cls.domain_size,
        "class_size": len(cls),
    }
    if args.witness:
        if report.measure == "vc":
            out["witness"] = list(report.witness or ())
        elif report.measure == "td" and report.witness:
            pts, hs = report.witness
            out["witness"] = {"points": list(pts), "concepts": [str(h) for h in hs]}
        elif report.measure == "ld":
            tree = online.littlestone_tree(cls, report.value)
            out["witness"] = _tree_dict(tree)
        out["witness_verified"] = report.verify(cls)
    if names:
        out["names"] = names
    _emit(out, args.out)
    return 0


def _tree_dict(tree):
    if tree is None:
        return None
    return {
        "point": tree.point,
        "zero": _tree_dict(tree.zero),
        "one": _tree_dict(tree.one),
    }


def cmd_learn(args) -> int:
    cls, _ = serialize.class_from_dict(serialize.load_json(args.input))
    sample = serialize.sample_from_list(serialize.load_json(args.sample))
    seed = args.seed if args.seed is not None else _default_seed()
    if args.mode == "realizable":
        schedule = learners.pac_schedule(
            dimensions.vc_dimension(cls), args.eps, args.delta
        )
        if len(sample) < schedule.total:
            raise FormatError(
                f"sample has {len(sample)} points but the wrapper needs "
                f"m = {schedule.total} at eps={args.eps}, delta={args.delta}"
            )
        hyp = learners.pac_learn_realizable(cls, sample, args.eps, args.delta, seed)
        out = {
            "mode": "realizable",
            "hypothesis": serialize.hypothesis_to_dict(hyp),
            "schedule": {
                "batches": schedule.batches,
                "batch_size": schedule.batch_size,
                "validation": schedule.validation_size,
                "m": schedule.total,
            },
            "empirical_error": str(hyp.sample_error(sample)),
        }
    elif args.mode == "agnostic":
        hyp, rep = learners.agnostic_learn(cls, sample, args.delta, seed)
        out = {
            "mode": "agnostic",
            "hypothesis": serialize.hypothesis_to_dict(hyp),
            "empirical_error": str(rep.hypothesis_error),
            "class_error": str(rep.class_error),
            "kept": rep.kept,
            "bound": rep.bound,
        }
    elif args.mode == "compress":
        hyp, comp = learners.alpha_boost_compress(cls, sample, seed)
        out = {
            "mode": "compress",
            "hypothesis": serialize.hypothesis_to_dict(hyp),
            "compression": serialize.compression_to_dict(comp),
            "size": comp.size,
        }
    else:  # ld-compress
        comp = learners.ld_compress(cls, sample)
        hyp = learners.reconstruct(cls, comp)
        out = {
            "mode": "ld-compress",
            "hypothesis": serialize.hypothesis_to_dict(hyp),
            "compression": serialize.compression_to_dict(comp),
            "size": comp.size,
            "ld": dimensions.littlestone_dimension(cls),
        }
    _emit(out, args.out)
    return 0


def cmd_online(args) -> int:
    cls, _ = serialize.class_from_dict(serialize.load_json(args.input))
    seed = args.seed if args.seed is not None else _default_seed()
    rng = random.Random(seed)
    if args.mode == "soa":
        if args.sample is None:
            raise FormatError("soa mode needs --sample with the round sequence")
        seq = serialize.sample_from_list(serialize.load_json(args.sample))
        transcript = online.play_sequence(cls, online.Soa(cls), seq.pairs)
        out = {
            "mode": "soa",
            "mistakes": transcript.mistakes,
            "regret": transcript.regret,
            "ld": dimensions.littlestone_dimension(cls),
            "rounds": [
                {"x": r.x, "prediction": r.prediction, "y": r.y, "mistake": r.mistake}
                for r in transcript.rounds
            ],
        }
    elif args.mode == "agnostic":
        learner = online.agnostic_online_learn(cls, args.T, seed)
        stats = []
        for t in range(args.trials):
            trial_rng = experiments.split_rng(seed, "cli-online", t)
            seq = [
                (trial_rng.randrange(cls.domain_size), trial_rng.randint(0, 1))
                for _ in range(args.T)
            ]
            res = learner.run(seq)
            stats.append(res.expected_regret)
        out = {
            "mode": "agnostic",
            "T": args.T,
            "experts": learner.n_experts,
            "regret_bound": learner.regret_bound(),
            "mean_expected_regret": sum(stats) / len(stats),
            "max_expected_regret": max(stats),
        }
    elif args.mode == "adversary-mistake":
        adv = online.mistake_adversary(cls, args.d)
        exact = adv.exact_expected_mistakes(online.Soa(cls)) if args.d <= 10 else None
        means = []
        soa = online.Soa(cls)
        for _ in range(args.trials):
            means.append(adv.play(soa, rng).mistakes)
        out = {
            "mode": "adversary-mistake",
            "d": args.d,
            "mc_mean_mistakes": sum(means) / len(means) if means else 0.0,
            "exact_expected_vs_soa": str(exact) if exact is not None else None,
            "lower_bound": args.d / 2,
        }
    else:  # adversary-regret
        adv = online.regret_adversary(cls, args.d, args.T, seed)
        total = 0.0
        for _ in range(args.trials):
            seq = adv.generate(rng)
            total += online.play_sequence(
                cls, online.constant_learner(0), seq
            ).regret
        out = {
            "mode": "adversary-regret",
            "d": args.d,
            "T": args.T,
            "mc_mean_regret_constant0": total / max(args.trials, 1),
            "lower_bound": 0.25 * (args.d * args.T) ** 0.5,
        }
    _emit(out, args.out)
    return 0


def cmd_disambiguate(args) -> int:
    cls, _ = serialize.class_from_dict(serialize.load_json(args.input))
    if args.algo == "majority":
        res = disambiguation.vc_majority_disambiguate(cls)
    elif args.algo == "weighted":
        res = disambiguation.weighted_disambiguate(cls)
    elif args.algo == "support":
        res = disambiguation.support_indicator_disambiguation(cls)
    else:  # compression
        scheme = learners.ld_compression_scheme(cls)
        res = disambiguation.compression_to_disambiguation(cls, scheme)
    out = serialize.disambiguation_to_dict(res)
    out["strong_verified"] = (
        disambiguation.strong_violation(cls, res.totals) is None
        if res.extension_of is not None
        else None
    )
    out["weak_verified_len3"] = disambiguation.is_disambiguation(
        cls, res.totals, "weak", max_len=3
    )
    _emit(out, args.out)
    return 0


def cmd_construct(args) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    if args.kind == "biclique":
        if args.complete is not None:
            inst = disambiguation.star_partition_instance(args.complete)
        elif args.graph is not None:
            inst = serialize.biclique_from_dict(serialize.load_json(args.graph))
        else:
            raise FormatError("construct biclique needs --graph or --complete")
        cls = disambiguation.biclique_class(inst)
        out = {
            "instance": serialize.biclique_to_dict(inst),
            "class": serialize.class_to_dict(cls),
            "vc": dimensions.vc_dimension(cls),
            "td": dimensions.threshold_dimension(cls),
        }
    elif args.kind == "margin":
        pts = geometry.orthonormal_points(args.radius, args.gamma)
        certs = geometry.certify_orthonormal_labelings(args.radius, args.gamma)
        out = {
            "points": [[float(v) for v in p] for p in pts],
            "radius": args.radius,
            "gamma": args.gamma,
            "labelings": len(certs),
            "all_separable": all(c.witness_ok and c.generic_ok for c in certs),
        }
    elif args.kind == "general-margin":
        side = np.linspace(0.0, 1.0, args.grid)
        grid = np.array([[x, y] for x in side for y in side])
        packing = geometry.greedy_packing(grid, args.gamma)
        out = {
            "points": [[float(v) for v in p] for p in grid],
            "gamma": args.gamma,
            "packing": {
                "chosen": list(packing.chosen),
                "min_pairwise": packing.min_pairwise,
                "cells": list(packing.cells),
            },
        }
    elif args.kind == "gamma-boost":
        base, _ = serialize.class_from_dict(serialize.load_json(args.base))
        base = core.total_class(base.domain_size, base.concepts)
        sample = serialize.sample_from_list(serialize.load_json(args.sample))
        game = geometry.weak_learning_game(base, sample)
        gamma = 1 - 2 * game.value
        out = {
            "game_value": str(game.value),
            "max_gamma": str(gamma),
        }
        if gamma > 0:
            hyp, rep = geometry.boosting_disambiguate_sample(base, sample, gamma)
            out["hypothesis"] = serialize.hypothesis_to_dict(hyp)
            out["rounds"] = rep.rounds
            out["dual_dimension"] = rep.dual_dimension
    else:  # erm-failure
        res = geometry.erm_failure_simulate(args.n, args.m, args.trials, seed)
        out = {
            "n": args.n,
            "m": args.m,
            "trials": args.trials,
            "proper_mean_error": str(res.proper_mean_error),
            "improper_mean_error": str(res.improper_mean_error),
        }
    _emit(out, args.out)
    return 0


def cmd_experiment(args) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    params = {}
    for item in args.param or []:
        key, _, value = item.partition("=")
        if not value:
            raise FormatError(f"--param needs key=value, got {item!r}")
        try:
            params[key.replace("-", "_")] = json.loads(value)
        except json.JSONDecodeError:
            params[key.replace("-", "_")] = value
    cfg = experiments.ExperimentConfig(
        experiment=args.name,
        seed=seed,
        trials=args.trials,
        params=params,
    )
    report = experiments.run_experiment(cfg)
    payload = report.to_dict()
    if args.out:
        serialize.dump_json(payload, args.out + ".json")
        with open(args.out + ".csv", "w") as fh:
            fh.write(report.to_csv())
        print(f"wrote {args.out}.json and {args.out}.csv", file=sys.stderr)
    else:
        print(serialize.dump_json(payload, None))
    for check in report.checks:
        status = "pass" if check.passed else "FAIL"
        print(f"[{status}] {args.name}: {check.name}", file=sys.stderr)
    return 0 if report.n_failed == 0 else 1


def cmd_scaling(args) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    header, rows = experiments.emit_scaling_table(args.name, args.grid, seed)
    import csv as _csv

    writer = _csv.writer(sys.stdout if args.out is None else open(args.out, "w"))
    writer.writerow(header)
    writer.writerows(rows)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pcl",
        description="Partial concept classes: dimensions, learners, disambiguation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dim", help="compute a complexity measure of a class")
    p.add_argument("--input", required=True)
    p.add_argument(
        "--measure",
        required=True,
        choices=["vc", "ld", "td", "strength", "natarajan", "graph", "support-vc", "dual"],
    )
    p.add_argument("--witness", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_dim)

    p = sub.add_parser("learn", help="run a batch learner on a sample")
    p.add_argument("--input", required=True)
    p.add_argument("--sample", required=True)
    p.add_argument(
        "--mode",
        required=True,
        choices=["realizable", "agnostic", "compress", "ld-compress"],
    )
    p.add_argument("--eps", type=float, default=0.2)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_learn)

    p = sub.add_parser("online", help="online games, learners and adversaries")
    p.add_argument("--input", required=True)
    p.add_argument(
        "--mode",
        required=True,
        choices=["soa", "agnostic", "adversary-mistake", "adversary-regret"],
    )
    p.add_argument("--sample")
    p.add_argument("--T", type=int, default=10)
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_online)

    p = sub.add_parser("disambiguate", help="build a total class from a partial one")
    p.add_argument("--input", required=True)
    p.add_argument(
        "--algo", required=True, choices=["majority", "weighted", "compression", "support"]
    )
    p.add_argument("--out")
    p.set_defaults(func=cmd_disambiguate)

    p = sub.add_parser("construct", help="build the example instances")
    p.add_argument(
        "kind", choices=["biclique", "margin", "gamma-boost", "general-margin", "erm-failure"]
    )
    p.add_argument("--graph")
    p.add_argument("--complete", type=int)
    p.add_argument("--radius", type=float, default=2.0)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--grid", type=int, default=5)
    p.add_argument("--base")
    p.add_argument("--sample")
    p.add_argument("--n", type=int, default=20)
    p.add_argument("--m", type=int, default=5)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("experiment", help="run a named bound-checking suite")
    p.add_argument("name", choices=sorted(experiments.SUITES))
    p.add_argument("--seed", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--param", action="append", metavar="KEY=VALUE")
    p.add_argument("--out", help="output path prefix for the .json/.csv report")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("scaling", help="emit a measured-vs-envelope CSV table")
    p.add_argument("name", choices=["compression-size", "disambiguation-size"])
    p.add_argument("--grid", type=int, nargs="*", default=[8, 16, 32, 64])
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_scaling)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (FormatError, core.ContractViolation, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
