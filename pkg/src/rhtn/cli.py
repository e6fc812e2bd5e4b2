"""Command line entry point: ``rhtn sweep | episode | replay``.

Exit codes: 0 on success, 1 for invalid configuration or input files,
2 for failures while running.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict
from typing import Optional, Sequence

from rhtn.errors import ScenarioError
from rhtn.gridworld import MONSTER, ORESCHU
from rhtn.harness import ConfigError, ExperimentConfig, csv_text, episode_seed, run_episode, run_sweep
from rhtn.planner import Policy
from rhtn import scenario

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _name_list(text: str) -> tuple[str, ...]:
    return tuple(x.strip() for x in text.split(",") if x.strip())


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rhtn", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sweep = sub.add_parser("sweep", help="run the policy x probability experiment grid")
    sweep.add_argument("--domain", choices=[ORESCHU, MONSTER, "all"], default="all")
    sweep.add_argument("--policy", type=_name_list, default=tuple(p.value for p in Policy),
                       help="comma-separated policies (default: all three)")
    sweep.add_argument("--probs", type=_int_list, default=None, help="comma-separated percents (default: 0,5,...,50)")
    sweep.add_argument("--episodes", type=int, default=100)
    sweep.add_argument("--seed", type=int, default=0)
    sweep.add_argument("--out", default="-", help="CSV path, '-' for stdout")
    sweep.add_argument("--trace", default=None, help="write per-tick trace lines to this file")
    sweep.add_argument("--jobs", type=int, default=1)

    ep = sub.add_parser("episode", help="run one seeded episode")
    ep.add_argument("--domain", choices=[ORESCHU, MONSTER], default=ORESCHU)
    ep.add_argument("--policy", choices=[p.value for p in Policy], default=Policy.ADAPTIVE.value)
    ep.add_argument("--probs", type=int, default=0, help="respawn probability in percent")
    ep.add_argument("--seed", type=int, default=0, help="base seed")
    ep.add_argument("--index", type=int, default=0, help="episode index within the cell")
    ep.add_argument("--trace", action="store_true", help="print the per-tick trace")

    rp = sub.add_parser("replay", help="run a hand-written scenario file")
    rp.add_argument("scenario")
    rp.add_argument("--policy", choices=[p.value for p in Policy], default=Policy.COMPLIANT.value)
    rp.add_argument("--probs", type=int, default=0)
    rp.add_argument("--seed", type=int, default=0)
    rp.add_argument("--ticks", type=int, default=200, help="stop after this many ticks")
    rp.add_argument("--trace", action="store_true")
    return parser


def _sweep(args: argparse.Namespace) -> int:
    domains = [ORESCHU, MONSTER] if args.domain == "all" else [args.domain]
    kwargs = {} if args.probs is None else {"probabilities": args.probs}
    configs = [
        ExperimentConfig(d, policies=args.policy, episodes_per_cell=args.episodes, base_seed=args.seed,
                         out_path=args.out, **kwargs)
        for d in domains
    ]
    chunks = []
    for i, config in enumerate(configs):
        trace = None
        if args.trace:
            trace = args.trace if len(configs) == 1 else f"{args.trace}.{config.domain}"
        result = run_sweep(config, jobs=args.jobs, trace_path=trace)
        failures = [r for r in result.records if r.error]
        if failures:
            logging.getLogger("rhtn").warning("%d episodes failed in %s", len(failures), config.domain)
        text = csv_text(result)
        chunks.append(text if i == 0 else text.split("\n", 1)[1])
    out = "".join(chunks)
    if args.out == "-":
        sys.stdout.write(out)
    else:
        try:
            with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(out)
        except OSError as exc:
            raise OSError(f"cannot write sweep CSV to {args.out}: {exc}") from exc
    return EXIT_OK


def _episode(args: argparse.Namespace) -> int:
    ExperimentConfig(args.domain, policies=(args.policy,), probabilities=(args.probs,))
    seed = episode_seed(args.seed, args.domain, args.probs, args.index)
    trace: Optional[list[str]] = [] if args.trace else None
    record = run_episode(args.domain, args.policy, args.probs, seed, trace=trace)
    if trace:
        print("\n".join(trace))
    print(json.dumps(asdict(record), sort_keys=True))
    return EXIT_OK


def _replay(args: argparse.Namespace) -> int:
    scen = scenario.load(args.scenario)
    trace: Optional[list[str]] = [] if args.trace else None
    record = run_episode(ORESCHU, args.policy, args.probs, args.seed, grid=scen.map, goals=scen.goals,
                         budget=scen.budget, tick_cap=args.ticks, trace=trace)
    if trace:
        print("\n".join(trace))
    print(json.dumps(asdict(record), sort_keys=True))
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    handler = {"sweep": _sweep, "episode": _episode, "replay": _replay}[args.command]
    try:
        return handler(args)
    except (ConfigError, ScenarioError, FileNotFoundError) as exc:
        print(f"rhtn: invalid input: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:
        print(f"rhtn: failed: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
