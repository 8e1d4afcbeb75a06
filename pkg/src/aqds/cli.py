"""Command-line entry point: protocol demos, attack suites, and planners.

Every command is deterministic under --seed and emits byte-stable CSV (or
an aligned table with --format table) to stdout or --output.  Exit codes:
0 success, 2 usage error, 3 attack bound violated, 4 infeasible or
malformed configuration.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import os
import sys
from dataclasses import replace
from importlib import resources
from pathlib import Path
from random import Random

from . import adversary, netsim, qkd_model
from .keymat import SecurityParams, required_n, total_consumption

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_BOUND = 3
EXIT_CONFIG = 4


class ConfigurationError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Argument helpers


def _parse_size(text: str) -> int:
    """Byte count with optional binary suffix: 8, 1K, 1M, 2G."""
    text = text.strip()
    factor = 1
    if text and text[-1].upper() in "KMG":
        factor = {"K": 1 << 10, "M": 1 << 20, "G": 1 << 30}[text[-1].upper()]
        text = text[:-1]
    value = int(text) * factor
    if value < 1:
        raise argparse.ArgumentTypeError("size must be at least 1 byte")
    return value


def _parse_size_list(text: str) -> list[int]:
    return [_parse_size(x) for x in text.split(",") if x.strip()]


def _parse_float_list(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _parse_int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _parse_range(text: str) -> list[float]:
    """Comma list or start:stop:step (inclusive of stop within tolerance)."""
    if ":" in text:
        start, stop, step = (float(x) for x in text.split(":"))
        if step <= 0 or stop < start:
            raise argparse.ArgumentTypeError("range needs start<=stop, step>0")
        out = []
        x = start
        while x <= stop + 1e-9:
            out.append(round(x, 9))
            x += step
        return out
    return _parse_float_list(text)


def _epsilon(text: str) -> float:
    value = float(text)
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError("epsilon must be strictly between 0 and 1")
    return value


def _epsilon_list(text: str) -> list[float]:
    return [_epsilon(x) for x in text.split(",") if x.strip()]


# ---------------------------------------------------------------------------
# Output


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def _render(header: list[str], rows: list[tuple], fmt: str) -> str:
    cells = [[_fmt(v) for v in row] for row in rows]
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(cells)
        return buf.getvalue()
    widths = [max(len(h), *(len(r[i]) for r in cells)) if cells else len(h)
              for i, h in enumerate(header)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths)).rstrip()]
    for row in cells:
        lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip())
    return "\n".join(lines) + "\n"


def _resolve_output(path: str | None) -> Path | None:
    if path is None:
        return None
    p = Path(path)
    base = os.environ.get("AQDS_OUTPUT_DIR")
    if base and not p.is_absolute():
        p = Path(base) / p
    return p


def _emit(text: str, path: str | None) -> None:
    target = _resolve_output(path)
    if target is None:
        sys.stdout.write(text)
    else:
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(text)


# ---------------------------------------------------------------------------
# Commands


def cmd_sign_round(args) -> int:
    security = SecurityParams(m_bits=8 * args.message_bytes, eps_f=args.epsilon,
                              k=args.receivers)
    script = netsim.load_script(args.script) if args.script else None
    topology = netsim.Topology.fully_connected(args.receivers,
                                               deadline=args.deadline)
    transcript = netsim.run_round(topology, security, script, seed=args.seed)
    rows = [(rid, transcript.outcomes[rid].value, security.n,
             transcript.consumed_bits_per_link)
            for rid in topology.receiver_ids]
    _emit(_render(["receiver", "outcome", "n", "bits_per_link"], rows,
                  args.format), args.output)
    if args.transcript:
        _emit(transcript.render(), args.transcript)
    return EXIT_OK


def cmd_attack(args) -> int:
    suites = ("robustness", "forgery", "repudiation")
    chosen = suites if args.suite == "all" else (args.suite,)
    rows = []
    ok = True
    for suite in chosen:
        rng = Random(f"{args.seed}:{suite}")
        results: list[tuple[str, adversary.AttackResult]] = []
        if suite == "robustness":
            topology = netsim.Topology.fully_connected(args.receivers)
            sec = SecurityParams.for_n(args.n, args.m_bits, args.receivers)
            results.append(("all-honest", adversary.robustness_experiment(
                topology, args.trials, rng, sec)))
        elif suite == "forgery":
            results.append(("blind", adversary.forgery_blind(
                args.n, args.trials, rng, args.m_bits)))
            results.append(("known-signature", adversary.forgery_known_signature(
                args.n, args.m_bits, args.trials, rng)))
        else:
            topology = netsim.Topology.fully_connected(args.receivers)
            sec = SecurityParams.for_n(args.n, args.m_bits, args.receivers)
            results.append(("inconsistent-broadcast",
                            adversary.repudiation_experiment(
                                topology, args.trials, rng, sec)))
        for case, res in results:
            ok &= res.within_bound
            rows.append((suite, case, args.n, args.m_bits, res.trials,
                         res.successes, res.rate, res.bound, res.threshold,
                         "pass" if res.within_bound else "FAIL"))
    _emit(_render(["suite", "case", "n", "m_bits", "trials", "successes",
                   "observed", "bound", "threshold", "result"], rows,
                  args.format), args.output)
    return EXIT_OK if ok else EXIT_BOUND


def cmd_consumption(args) -> int:
    rows = []
    for m_bytes in sorted(args.message_bytes):
        for eps in sorted(args.epsilon):
            for k in sorted(args.receivers):
                rows.append((m_bytes, eps, k,
                             total_consumption(8 * m_bytes, eps, k)))
    _emit(_render(["m_bytes", "eps", "k", "bits"], rows, args.format),
          args.output)
    return EXIT_OK


def _source_params(args) -> qkd_model.SourceParams:
    if args.params:
        params = qkd_model.load_source_params(args.params)
    else:
        params = qkd_model.PRESETS[args.preset]
    overrides = {}
    if args.q_sift is not None:
        overrides["q_sift"] = args.q_sift
    if args.f_ec is not None:
        overrides["f_ec"] = args.f_ec
    return replace(params, **overrides) if overrides else params


def cmd_curve(args) -> int:
    # rate-curve and time-curve share columns; infeasible distances are
    # flagged per row rather than failing the sweep
    params = _source_params(args)
    m_bits = 8 * args.message_bytes
    rows = []
    for d in args.distance_km:
        rate = qkd_model.rate_at_distance(params, d).secure_rate
        try:
            seconds = _fmt(qkd_model.time_to_sign(params, d, m_bits, args.epsilon))
        except qkd_model.InfeasibleDistanceError:
            seconds = "inf"
        rows.append((d, rate, seconds))
    _emit(_render(["distance_km", "rate_bps", "seconds"], rows, args.format),
          args.output)
    return EXIT_OK


def _load_link_keys(path: str | None):
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    cp.optionxform = str
    if path is None:
        text = (resources.files("aqds") / "data" / "eight_user_network.ini"
                ).read_text()
        cp.read_string(text)
    elif not cp.read(path):
        raise ConfigurationError(f"cannot read keys file {path}")
    scenarios = {}
    for name in cp.sections():
        sec = cp[name]
        links = {}
        meta = {"message-bytes": 1024, "epsilon": 1e-10, "arbitrator-link": "AI"}
        for key, val in sec.items():
            if key in ("message-bytes",):
                meta["message-bytes"] = int(val)
            elif key in ("epsilon",):
                meta["epsilon"] = float(val)
            elif key in ("arbitrator-link",):
                meta["arbitrator-link"] = val.strip()
            else:
                links[key] = int(val)
        if meta["arbitrator-link"] not in links:
            raise ConfigurationError(
                f"scenario {name!r} lacks its arbitrator link "
                f"{meta['arbitrator-link']!r}")
        scenarios[name] = (meta, links)
    if not scenarios:
        raise ConfigurationError("keys file defines no scenarios")
    return scenarios


def cmd_scenario(args) -> int:
    if args.name != "eight-user":
        raise ConfigurationError(f"unknown scenario {args.name!r}")
    scenarios = _load_link_keys(args.keys)
    rows = []
    for name, (meta, links) in scenarios.items():
        m_bytes = args.message_bytes or meta["message-bytes"]
        eps = args.epsilon or meta["epsilon"]
        m_bits = 8 * m_bytes
        per_round = 3 * required_n(m_bits, eps)
        bottleneck = min(links, key=lambda link: (links[link], link))
        rounds = qkd_model.supported_rounds(list(links.values()), m_bits, eps)
        rows.append((name, m_bytes, eps, bottleneck, links[bottleneck],
                     per_round, rounds))
    _emit(_render(["scenario", "m_bytes", "eps", "min_link", "min_link_bits",
                   "bits_per_round", "supported_rounds"], rows, args.format),
          args.output)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", default=None,
                   help="write here instead of stdout (AQDS_OUTPUT_DIR applies)")
    p.add_argument("--format", choices=("csv", "table"), default="csv")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aqds",
        description="Arbitrated multi-receiver signature demos and planners")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sign-round", help="run one simulated signing round")
    p.add_argument("--receivers", type=int, default=3)
    p.add_argument("--message-bytes", type=_parse_size, default=1024)
    p.add_argument("--epsilon", type=_epsilon, default=1e-10)
    p.add_argument("--deadline", type=int, default=10)
    p.add_argument("--script", default=None, help="adversary script (INI)")
    p.add_argument("--transcript", default=None, help="write event transcript here")
    _add_common(p)
    p.set_defaults(func=cmd_sign_round)

    p = sub.add_parser("attack", help="run Monte Carlo attack suites")
    p.add_argument("--suite", choices=("robustness", "forgery", "repudiation",
                                       "all"), default="all")
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--m-bits", type=int, default=32)
    p.add_argument("--trials", type=int, default=5000)
    p.add_argument("--receivers", type=int, default=3)
    _add_common(p)
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("consumption", help="sweep total key consumption")
    p.add_argument("--epsilon", type=_epsilon_list, default=[1e-10, 1e-14])
    p.add_argument("--receivers", type=_parse_int_list, default=[2, 6, 10])
    p.add_argument("--message-bytes", type=_parse_size_list,
                   default=[1, 1 << 10, 1 << 20])
    _add_common(p)
    p.set_defaults(func=cmd_consumption)

    for name, helptext in (("rate-curve", "secure key rate versus distance"),
                           ("time-curve", "per-round signing time versus distance")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--preset", choices=sorted(qkd_model.PRESETS), default="table1")
        p.add_argument("--params", default=None, help="source parameter file (INI)")
        p.add_argument("--distance-km", type=_parse_range,
                       default=_parse_range("0:400:20"),
                       help="comma list or start:stop:step")
        p.add_argument("--q-sift", type=float, default=None)
        p.add_argument("--f-ec", type=float, default=None)
        p.add_argument("--message-bytes", type=_parse_size, default=1 << 20)
        p.add_argument("--epsilon", type=_epsilon, default=1e-20)
        _add_common(p)
        p.set_defaults(func=cmd_curve)

    p = sub.add_parser("scenario", help="supported rounds on a stored network")
    p.add_argument("--name", default="eight-user")
    p.add_argument("--keys", default=None, help="link key stocks (INI)")
    p.add_argument("--message-bytes", type=_parse_size, default=None)
    p.add_argument("--epsilon", type=_epsilon, default=None)
    _add_common(p)
    p.set_defaults(func=cmd_scenario)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigurationError, netsim.ScriptError,
            qkd_model.InfeasibleDistanceError) as exc:
        print(f"aqds: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
