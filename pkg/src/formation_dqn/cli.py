"""Command-line interface: train, eval, smooth, plot.

Exit codes: 0 on success, 1 for usage/config/input errors, 2 when training
hits a numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import sys

from . import formation, harness
from .formation import FormationFormatError
from .network import ModelFormatError, NumericalFailureError
from .plotting import PlotInputError, export_plot_data
from .smoothing import savitzky_golay

USAGE_ERROR = 1
NUMERICAL_ERROR = 2


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on usage errors; remap to 1 so exit code 2
    # stays reserved for numerical failures.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(USAGE_ERROR, f"{self.prog}: error: {message}\n")


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="formation-dqn",
                     description="Train and evaluate Q-learning formation controllers.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_train = sub.add_parser("train", help="run a training experiment")
    p_train.add_argument("--config", help="flat `key = value` config file")
    p_train.add_argument("--sensor", choices=["loc", "landmark"],
                         help="sensory input (default: loc)")
    p_train.add_argument("--episodes", type=int)
    p_train.add_argument("--seed", type=int)
    p_train.add_argument("--model-out", required=True)
    p_train.add_argument("--metrics-out", required=True)
    p_train.add_argument("--quiet", action="store_true", help="suppress progress lines")

    p_eval = sub.add_parser("eval", help="evaluate a trained model on a formation")
    p_eval.add_argument("--model", required=True)
    p_eval.add_argument("--formation", required=True,
                        help="figure8, star, or a path to a formation JSON file")
    p_eval.add_argument("--uavs", type=int, default=5)
    p_eval.add_argument("--episodes", type=int, default=1)
    p_eval.add_argument("--seed", type=int, default=0)
    p_eval.add_argument("--traj-out", required=True)

    p_smooth = sub.add_parser("smooth", help="Savitzky-Golay smooth a metrics CSV")
    p_smooth.add_argument("--in", dest="in_path", required=True)
    p_smooth.add_argument("--window", type=int, required=True, help="odd window length")
    p_smooth.add_argument("--poly", type=int, required=True, help="polynomial order")
    p_smooth.add_argument("--out", required=True)

    p_plot = sub.add_parser("plot", help="render a metrics or trajectory CSV to SVG")
    p_plot.add_argument("--in", dest="in_path", required=True)
    p_plot.add_argument("--out", required=True)
    return parser


def _cmd_train(args) -> int:
    file_values = harness.parse_config_file(args.config) if args.config else {}
    cfg = harness.make_run_config(
        file_values,
        sensor_mode=harness.parse_sensor(args.sensor) if args.sensor else None,
        episodes=args.episodes,
        seed=args.seed,
        model_out=args.model_out,
        metrics_out=args.metrics_out,
    )

    def progress(m):
        if not args.quiet and (m.episode % 25 == 0 or m.episode == cfg.episodes - 1):
            print(
                f"episode {m.episode:4d}  total_clipped_reward {m.total_clipped_reward:9.2f}  "
                f"mean_loss {m.mean_loss:.5f}  epsilon {m.epsilon:.2f}"
            )

    harness.train(cfg, on_episode=progress)
    print(f"model written to {cfg.model_out}; metrics written to {cfg.metrics_out}")
    return 0


def _resolve_formation(token: str, n_uavs: int):
    if token == "figure8":
        return formation.figure8(n_uavs)
    if token == "star":
        return formation.star(n_uavs)
    spec = formation.load_formation(token)
    if spec.n_uavs != n_uavs:
        raise harness.ConfigError(
            f"formation file is for {spec.n_uavs} UAVs, --uavs was {n_uavs}"
        )
    return spec


def _cmd_eval(args) -> int:
    spec = _resolve_formation(args.formation, args.uavs)
    summary = harness.evaluate(
        args.model, spec, args.uavs, args.episodes, args.seed, traj_out=args.traj_out
    )
    print(
        f"{summary.formation_kind}: {summary.episodes} episode(s), {summary.n_uavs} UAV(s); "
        f"mean per-step reward {summary.mean_reward:.4f}; "
        f"mean tracking error over final {harness.TRACKING_WINDOW} steps "
        f"{summary.mean_tracking_error:.4f}"
    )
    print(f"trajectories written to {args.traj_out}")
    return 0


def _cmd_smooth(args) -> int:
    with open(args.in_path, "r", encoding="utf-8", newline="") as fh:
        rows = [row for row in csv.reader(fh) if row]
    if len(rows) < 2:
        raise harness.ConfigError(f"no data rows in {args.in_path}")
    header, data = rows[0], rows[1:]
    if "total_clipped_reward" in header:
        column = header.index("total_clipped_reward")
    else:
        column = len(header) - 1
    values = [float(r[column]) for r in data]
    smoothed = savitzky_golay(values, args.window, args.poly)
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row, value in zip(data, smoothed):
            out_row = list(row)
            out_row[column] = value
            writer.writerow(out_row)
    print(f"smoothed column {header[column]!r} ({len(values)} rows) -> {args.out}")
    return 0


def _cmd_plot(args) -> int:
    export_plot_data(args.in_path, args.out)
    print(f"chart written to {args.out}")
    return 0


_COMMANDS = {
    "train": _cmd_train,
    "eval": _cmd_eval,
    "smooth": _cmd_smooth,
    "plot": _cmd_plot,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except NumericalFailureError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return NUMERICAL_ERROR
    except (harness.ConfigError, ModelFormatError, FormationFormatError,
            PlotInputError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
