"""Command line interface.

Subcommands: run (full scenario), overhead (report only), linkbudget (one
ISL evaluation), validate (config check). Exit codes: 0 success, 1 config
error, 2 runtime error.
"""

import argparse
import sys
from dataclasses import replace

from .config import ConfigError, load_config, validate_config
from .optical_link import db, evaluate_link
from .orbits import SatIndex, distance, validate_index
from .scenario import emit_overhead_report, run_scenario
from .seeding import Substreams


def _sat_index(text: str) -> SatIndex:
    try:
        plane, slot = text.split(",")
        return SatIndex(int(plane), int(slot))
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected plane,slot (e.g. 3,14), got {text!r}"
        ) from None


def _add_common(sub: argparse.ArgumentParser):
    sub.add_argument("config", help="scenario config file")
    sub.add_argument("--seed", type=int, default=None, help="override master seed")
    sub.add_argument("--out", default=None, help="override output directory")
    sub.add_argument(
        "--paper-literal", action="store_true",
        help="verbatim-equation fidelity bundle (rotation sign, phasing, "
             "fixed-denominator aggregation, optical-power SNR)",
    )
    sub.add_argument("--workers", type=int, default=None, help="parallel workers")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fello-sim",
        description="Federated learning simulator for optical LEO constellations",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="execute the scenario and write metrics")
    _add_common(run)
    over = sub.add_parser("overhead", help="write the overhead report only")
    _add_common(over)
    link = sub.add_parser("linkbudget", help="evaluate one inter-satellite link")
    _add_common(link)
    link.add_argument("--from", dest="sat_from", type=_sat_index, required=True,
                      metavar="L,K", help="transmitting satellite plane,slot")
    link.add_argument("--to", dest="sat_to", type=_sat_index, required=True,
                      metavar="L,K", help="receiving satellite plane,slot")
    link.add_argument("--time", type=float, default=0.0, help="simulated seconds")
    val = sub.add_parser("validate", help="check a config file")
    _add_common(val)
    return parser


def _load(args) -> "ScenarioConfig":
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg = replace(cfg, master_seed=args.seed)
    if args.out is not None:
        cfg = replace(cfg, output_dir=args.out)
    if args.paper_literal:
        cfg = replace(cfg, paper_literal=True)
    if args.workers is not None:
        cfg = replace(cfg, workers=args.workers)
    validate_config(cfg)
    return cfg


def _linkbudget(cfg, sat_from: SatIndex, sat_to: SatIndex, t: float) -> int:
    walker = cfg.walker()
    validate_index(walker, sat_from)
    validate_index(walker, sat_to)
    d = distance(walker, sat_from, sat_to, t)
    rng = Substreams(cfg.master_seed).derive(
        "linkbudget", sat_from.plane, sat_from.slot, sat_to.plane, sat_to.slot, t
    )
    sample = evaluate_link(cfg.isl_optics(), d, rng)
    print(f"distance_km        {sample.distance_km:.3f}")
    print(f"theta_t_rad        {sample.theta_t_rad:.3e}")
    print(f"theta_r_rad        {sample.theta_r_rad:.3e}")
    print(f"received_power_w   {sample.received_power_w:.6e}")
    print(f"noise_power        {sample.noise_power:.6e}")
    print(f"snr_linear         {sample.snr_linear:.6e}")
    print(f"snr_db             {db(sample.snr_linear):.3f}")
    print(f"ber                {sample.ber:.6e}")
    print(f"rate_bps           {sample.rate_bps:.6e}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _load(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 1
    try:
        if args.command == "run":
            return run_scenario(cfg)
        if args.command == "overhead":
            emit_overhead_report(cfg)
            return 0
        if args.command == "linkbudget":
            return _linkbudget(cfg, args.sat_from, args.sat_to, args.time)
        if args.command == "validate":
            sweep = cfg.sweep_parameter or "none"
            print(
                f"OK: architectures={','.join(cfg.architectures)} "
                f"rounds={cfg.lesc_rounds} dataset={cfg.dataset_kind} sweep={sweep}"
            )
            return 0
    except IndexError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 1
    except Exception:
        import traceback

        traceback.print_exc()
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
