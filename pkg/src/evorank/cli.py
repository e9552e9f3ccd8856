"""Command-line front end.

Subcommands: ``rank``, ``sweep``, ``mcc``, ``graph``, ``replicate``,
``simulate``, ``validate``.  Exit codes: 0 on success, 1 on domain errors
(a JSON error envelope goes to stderr), 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import alpharank, evodyn, mcc, metagame, replicator, simulator, stationary
from .errors import EvoRankError, SizeMismatch
from .evodyn import EvoParams, SparseMarkovChain
from .metagame import MetaGame


def export_dot(
    chain: SparseMarkovChain,
    pi: np.ndarray,
    m: int,
    edge_threshold: float = 1.0,
    labels: list[str] | None = None,
) -> str:
    """DOT digraph of the evolutionary chain annotated with its distribution.

    Nodes show the state and its stationary mass and are shaded by mass.
    Self-loops are omitted, as are edges whose fixation probability is below
    ``edge_threshold`` times the neutral baseline ``1/m``; surviving edges
    are labeled with the fixation probability as a multiple of ``1/m``.
    """
    if len(pi) != chain.num_states:
        raise SizeMismatch(
            f"distribution over {len(pi)} states for a chain with "
            f"{chain.num_states}"
        )
    if labels is not None and len(labels) != chain.num_states:
        raise SizeMismatch(
            f"{len(labels)} labels for a chain with {chain.num_states} states"
        )
    names = labels if labels is not None else [f"s{i}" for i in range(chain.num_states)]
    lines = ["digraph evolutionary_chain {"]
    lines.append('  rankdir=LR;\n  node [shape=circle, style=filled, fontcolor=black];')
    for i in range(chain.num_states):
        mass = float(pi[i])
        # lerp white -> steel blue with stationary mass
        red = int(round(255 - 185 * mass))
        green = int(round(255 - 125 * mass))
        blue = int(round(255 - 74 * mass))
        fill = f"#{red:02x}{green:02x}{blue:02x}"
        lines.append(
            f'  s{i} [label="{names[i]}\\n{mass:.2f}", fillcolor="{fill}"];'
        )
    baseline = 1.0 / m
    for i, row in enumerate(chain.rows):
        for col, prob in row:
            if col == i:
                continue
            rho = prob / chain.eta if chain.eta > 0 else 0.0
            if rho < edge_threshold * baseline:
                continue
            lines.append(f'  s{i} -> s{col} [label="{rho * m:.3g}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def _add_io_arguments(parser: argparse.ArgumentParser, formats: list[str]) -> None:
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--game", help="game description in JSON format")
    source.add_argument("--winrates", help="win-rate matrix in CSV format")
    parser.add_argument(
        "--format", choices=formats, default=formats[0], help="output format"
    )
    parser.add_argument("--out", help="output path (default: stdout)")


def _add_model_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--m", type=int, default=50, help="population size")
    parser.add_argument(
        "--tol", type=float, default=1e-10, help="stationary solver residual tolerance"
    )
    parser.add_argument(
        "--prob-floor",
        type=float,
        default=0.0,
        help="tiny floor on transition probabilities; keeps the chain "
        "connected at extreme intensities (try 1e-300)",
    )


def _add_sweep_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--alpha-start", type=float, help="first grid intensity")
    parser.add_argument("--alpha-factor", type=float, help="geometric grid factor")
    parser.add_argument("--alpha-points", type=int, help="number of grid points")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="evorank",
        description="Evolutionary ranking of strategies in K-player meta-games.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    rank = sub.add_parser("rank", help="rank all pure strategy profiles")
    _add_io_arguments(rank, ["text", "csv", "json"])
    _add_model_arguments(rank)
    rank.add_argument("--alpha", type=float, help="single ranking intensity")
    _add_sweep_arguments(rank)

    sweep = sub.add_parser("sweep", help="stationary distribution vs intensity grid")
    _add_io_arguments(sweep, ["csv", "text", "json"])
    _add_model_arguments(sweep)
    _add_sweep_arguments(sweep)

    mcc_cmd = sub.add_parser("mcc", help="response graph sink components")
    _add_io_arguments(mcc_cmd, ["text", "json", "dot"])
    mcc_cmd.add_argument("--m", type=int, default=50, help="population size")
    mcc_cmd.add_argument(
        "--epsilon",
        type=float,
        help="equal-payoff transition weight (default: 1/m)",
    )

    graph = sub.add_parser("graph", help="chain graph annotated with the distribution")
    _add_io_arguments(graph, ["dot", "csv"])
    _add_model_arguments(graph)
    graph.add_argument("--alpha", type=float, required=True, help="ranking intensity")
    graph.add_argument(
        "--edge-threshold",
        type=float,
        default=1.0,
        help="hide edges below this multiple of the neutral baseline 1/m "
        "(dot output only)",
    )

    repl = sub.add_parser("replicate", help="integrate replicator trajectories")
    _add_io_arguments(repl, ["csv"])
    repl.add_argument("--x0", help="initial state, e.g. '0.5,0.3,0.2' or per-population 'a,b;c,d'")
    repl.add_argument("--step", type=float, default=0.01, help="integration step size")
    repl.add_argument("--horizon", type=float, default=10.0, help="integration end time")

    sim = sub.add_parser("simulate", help="stochastic copy/mutate simulation")
    _add_io_arguments(sim, ["json", "text"])
    sim.add_argument("--m", type=int, default=50, help="population size")
    sim.add_argument("--alpha", type=float, required=True, help="ranking intensity")
    sim.add_argument("--mu", type=float, default=1e-3, help="mutation rate")
    sim.add_argument("--steps", type=int, default=10**6, help="number of events")
    sim.add_argument("--seed", type=int, default=1, help="PRNG seed")

    val = sub.add_parser(
        "validate", help="cross-model consistency checks on the given game"
    )
    _add_io_arguments(val, ["text", "json"])
    val.add_argument("--m", type=int, default=50, help="population size")

    return parser


def _load_game(args: argparse.Namespace) -> MetaGame:
    if args.game is not None:
        return metagame.load_game(args.game)
    return metagame.load_winrate_csv(args.winrates)


def _emit(args: argparse.Namespace, text: str) -> None:
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _sweep_kwargs(args: argparse.Namespace) -> dict:
    kwargs = {}
    if args.alpha_start is not None:
        kwargs["alpha_start"] = args.alpha_start
    if args.alpha_factor is not None:
        kwargs["factor"] = args.alpha_factor
    if args.alpha_points is not None:
        kwargs["num_points"] = args.alpha_points
    return kwargs


def _cmd_rank(args, parser: argparse.ArgumentParser) -> str:
    game = _load_game(args)
    sweep_flags = any(
        v is not None for v in (args.alpha_start, args.alpha_factor, args.alpha_points)
    )
    if args.alpha is not None and sweep_flags:
        parser.error("--alpha and --alpha-start/--alpha-factor/--alpha-points "
                     "are mutually exclusive")
    if args.alpha is not None:
        result = alpharank.alpha_rank(
            game,
            EvoParams(ranking_intensity=args.alpha, population_size=args.m),
            tol=args.tol,
            prob_floor=args.prob_floor,
        )
    else:
        sweep = alpharank.alpha_sweep(
            game, m=args.m, tol=args.tol, prob_floor=args.prob_floor,
            **_sweep_kwargs(args),
        )
        alpha = sweep.converged_at
        if alpha is None:
            valid = [a for a, d in zip(sweep.alphas, sweep.distributions) if d is not None]
            if not valid:
                raise EvoRankError("no sweep point could be solved")
            alpha = valid[-1]
        index = sweep.alphas.index(alpha)
        result = alpharank.ranking_from_distribution(
            game, sweep.distributions[index], alpha
        )
    if args.format == "text":
        return result.to_text()
    if args.format == "csv":
        return result.to_csv()
    return result.to_json()


def _cmd_sweep(args) -> str:
    game = _load_game(args)
    sweep = alpharank.alpha_sweep(
        game, m=args.m, tol=args.tol, prob_floor=args.prob_floor,
        **_sweep_kwargs(args),
    )
    if args.format == "csv":
        return alpharank.sweep_to_csv(game, sweep)
    if args.format == "json":
        payload = {
            "alphas": list(sweep.alphas),
            "states": game.state_labels(),
            "distributions": [
                None if d is None else [float(p) for p in d]
                for d in sweep.distributions
            ],
            "errors": list(sweep.errors),
            "converged_at": sweep.converged_at,
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"
    lines = [f"{'alpha':>12}  distribution"]
    for alpha, dist, err in zip(sweep.alphas, sweep.distributions, sweep.errors):
        if dist is None:
            lines.append(f"{alpha:12.6g}  {err}")
        else:
            lines.append(f"{alpha:12.6g}  " + " ".join(f"{p:.4f}" for p in dist))
    lines.append(f"converged_at: {sweep.converged_at}")
    return "\n".join(lines) + "\n"


def _cmd_mcc(args) -> str:
    game = _load_game(args)
    epsilon = args.epsilon if args.epsilon is not None else 1.0 / args.m
    result = mcc.mcc_chains(game, epsilon)
    if args.format == "dot":
        return mcc.response_graph_to_dot(game)
    labels = game.state_labels()
    if args.format == "json":
        payload = {
            "epsilon": result.epsilon,
            "components": [
                {
                    "states": [labels[s] for s in comp],
                    "chain": chain.tolist(),
                }
                for comp, chain in zip(result.components, result.chains)
            ],
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"
    lines = [f"sink components (epsilon={result.epsilon:g}):"]
    for c, (comp, chain) in enumerate(zip(result.components, result.chains)):
        names = ", ".join(labels[s] for s in comp)
        lines.append(f"  component {c}: {{{names}}}")
        for row_state, row in zip(comp, chain):
            cells = " ".join(f"{p:.4f}" for p in row)
            lines.append(f"    {labels[row_state]:>12}  [{cells}]")
    return "\n".join(lines) + "\n"


def _cmd_graph(args) -> str:
    game = _load_game(args)
    params = EvoParams(ranking_intensity=args.alpha, population_size=args.m)
    chain = evodyn.transition_matrix(game, params, prob_floor=args.prob_floor)
    if args.format == "csv":
        return evodyn.chain_to_coo_csv(chain)
    dist = stationary.stationary_distribution(chain, tol=args.tol)
    return export_dot(
        chain,
        dist.probabilities,
        m=args.m,
        edge_threshold=args.edge_threshold,
        labels=game.state_labels(),
    )


def _parse_x0(game: MetaGame, text: str | None):
    if text is None:
        return tuple(np.full(n, 1.0 / n) for n in game.shape)
    blocks = [blk for blk in text.split(";") if blk.strip()]
    return tuple(
        np.asarray([float(v) for v in blk.split(",")], dtype=float) for blk in blocks
    )


def _cmd_replicate(args, parser: argparse.ArgumentParser) -> str:
    game = _load_game(args)
    if args.step <= 0 or args.horizon <= 0:
        parser.error("--step and --horizon must be positive")
    num_steps = max(1, round(args.horizon / args.step))
    trajectory = replicator.integrate(game, _parse_x0(game, args.x0), args.step, num_steps)
    return replicator.trajectory_to_csv(game, trajectory)


def _cmd_simulate(args) -> str:
    game = _load_game(args)
    config = simulator.SimConfig(
        population_size=args.m,
        ranking_intensity=args.alpha,
        mutation_rate=args.mu,
        steps=args.steps,
        seed=args.seed,
    )
    report = simulator.simulate(game, config)
    if args.format == "json":
        return report.to_json(game)
    labels = game.state_labels()
    lines = ["state occupancy (monomorphic dwell fractions):"]
    for label, value in zip(labels, report.occupancy):
        lines.append(f"  {label:>12}  {value:.4f}")
    lines.append(f"fixations: {report.fixations}")
    lines.append(f"mixed fraction: {report.mixed_fraction:.4f}")
    return "\n".join(lines) + "\n"


def _single_population_chain_reference(
    matrix: np.ndarray, alpha: float, m: int
) -> np.ndarray:
    """Literal dense single-population construction, for cross-checking."""
    n = matrix.shape[0]
    eta = 1.0 / (n - 1) if n > 1 else 0.0
    out = np.zeros((n, n))
    for res in range(n):
        for mut in range(n):
            if mut == res:
                continue
            out[res, mut] = eta * evodyn.fixation_probability(
                matrix[mut, res], matrix[res, mut], alpha, m
            )
        out[res, res] = 1.0 - out[res].sum()
    return out


def _cmd_validate(args) -> str:
    game = _load_game(args)
    m = args.m
    checks: list[dict] = []

    if game.single_population and game.num_players == 2:
        worst = 0.0
        for alpha in (0.1, 1.0):
            chain = evodyn.transition_matrix(
                game, EvoParams(ranking_intensity=alpha, population_size=m)
            )
            reference = _single_population_chain_reference(
                game.payoffs[0], alpha, m
            )
            worst = max(worst, float(np.max(np.abs(chain.to_dense() - reference))))
        checks.append(
            {
                "name": "single-population reduction",
                "detail": "general builder vs pairwise construction, "
                "max entry difference",
                "value": float(worst),
                "ok": bool(worst <= 1e-14),
            }
        )

    worst = 0.0
    for alpha in (0.1, 1.0, 10.0):
        for diff in np.linspace(-3.0, 3.0, 13):
            for share in np.linspace(0.0, 1.0, 11):
                direct = replicator.edge_mean_dynamics(diff, 0.0, alpha, share)
                fermi_gap = evodyn.fermi_copy_prob(
                    0.0, diff, alpha
                ) - evodyn.fermi_copy_prob(diff, 0.0, alpha)
                worst = max(worst, abs(direct - share * (1.0 - share) * fermi_gap))
    checks.append(
        {
            "name": "edge mean dynamics",
            "detail": "tanh form vs copy-probability difference, max gap",
            "value": float(worst),
            "ok": bool(worst <= 1e-12),
        }
    )

    report = mcc.check_limit_correspondence(game, m, (1.0, 10.0, 100.0))
    monotone = all(
        later <= earlier + 1e-12
        for earlier, later in zip(report.max_chain_deviation, report.max_chain_deviation[1:])
    ) and all(
        later <= earlier + 1e-12
        for earlier, later in zip(report.off_component_mass, report.off_component_mass[1:])
    )
    checks.append(
        {
            "name": "infinite-intensity limit",
            "detail": "macro chain vs sink-component chain at eps=1/m over "
            f"alphas {list(report.alphas)}: deviations "
            f"{[f'{v:.3g}' for v in report.max_chain_deviation]}, "
            f"off-component mass {[f'{v:.3g}' for v in report.off_component_mass]}",
            "value": float(report.max_chain_deviation[-1]),
            "ok": bool(monotone),
        }
    )

    if args.format == "json":
        return json.dumps({"checks": checks}, indent=2, sort_keys=True) + "\n"
    lines = []
    for check in checks:
        status = "ok" if check["ok"] else "FAILED"
        lines.append(f"[{status}] {check['name']}: {check['detail']} = {check['value']:.3g}")
    return "\n".join(lines) + "\n"


def run(argv: list[str]) -> int:
    """Parse and execute one invocation; returns the process exit code.

    0 on success; 1 on domain or I/O failures, with a machine-readable
    ``{"error": {"type", "message"}}`` envelope on stderr; 2 on usage errors.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)

        if getattr(args, "m", None) is not None and args.m < 2:
            parser.error("--m must be at least 2")
        if getattr(args, "alpha", None) is not None and args.alpha < 0:
            parser.error("--alpha must be non-negative")
        if getattr(args, "steps", None) is not None and args.steps < 1:
            parser.error("--steps must be positive")

        try:
            if args.command == "rank":
                output = _cmd_rank(args, parser)
            elif args.command == "sweep":
                output = _cmd_sweep(args)
            elif args.command == "mcc":
                output = _cmd_mcc(args)
            elif args.command == "graph":
                output = _cmd_graph(args)
            elif args.command == "replicate":
                output = _cmd_replicate(args, parser)
            elif args.command == "simulate":
                output = _cmd_simulate(args)
            else:
                output = _cmd_validate(args)
            _emit(args, output)
            return 0
        except (EvoRankError, OSError, json.JSONDecodeError, ValueError) as exc:
            envelope = {"error": {"type": type(exc).__name__, "message": str(exc)}}
            sys.stderr.write(json.dumps(envelope) + "\n")
            return 1
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
