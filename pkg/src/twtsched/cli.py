"""Command-line entry point: ``twtsched {run,sweep,group,validate}``.

Exit codes: 0 success, 2 configuration error, 3 invariant violation.
Every output file carries the resolved configuration and seeds, so a run
can be reproduced from its own outputs.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from importlib import resources
from pathlib import Path
from typing import Sequence

from . import config as cfgmod
from .engine import METRIC_COLUMNS, check_schedule, run_episode
from .errors import ConfigError, InvariantError
from .experiments import make_grouping, map_jobs, sweep
from .model import GroupAssignment

log = logging.getLogger("twtsched")

EXIT_OK, EXIT_CONFIG, EXIT_INVARIANT = 0, 2, 3
BUNDLED_CONFIG = "tables12.json"


def bundled_config_path() -> Path:
    return Path(str(resources.files("twtsched") / "configs" / BUNDLED_CONFIG))


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def parse_seeds(text: str) -> list[int]:
    """``"1,2,5-7"`` -> [1, 2, 5, 6, 7]."""
    seeds: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            if "-" in part:
                lo, hi = part.split("-", 1)
                seeds.extend(range(int(lo), int(hi) + 1))
            else:
                seeds.append(int(part))
        except ValueError:
            raise ConfigError(f"--seeds: cannot parse {part!r}") from None
    if not seeds:
        raise ConfigError("--seeds: at least one seed is required")
    return seeds


def load(args) -> dict:
    path = args.config or bundled_config_path()
    doc = cfgmod.load_config(path, args.override or ())
    cfgmod.check_routines(doc)
    return doc


def _csv_text(header_lines: Sequence[str], columns: Sequence[str], rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    for line in header_lines:
        buf.write(f"# {line}\n")
    w = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    for r in rows:
        w.writerow({k: _fmt(r.get(k, "")) for k in columns})
    return buf.getvalue()


def _fmt(v):
    return repr(v) if isinstance(v, float) else v


def _groups_doc(ga: GroupAssignment, routine: str) -> dict:
    return {"routine": routine, "groups": [
        {"group": l + 1, "stas": sorted(g.stas),
         "triplet": {"offset_blocks": g.triplet.offset_blocks,
                     "wake_interval_blocks": g.triplet.wake_interval_blocks,
                     "sp_blocks": g.triplet.sp_blocks}}
        for l, g in enumerate(ga.groups)]}


def _write(out: Path, name: str, text: str) -> Path:
    out.mkdir(parents=True, exist_ok=True)
    p = out / name
    p.write_text(text)
    log.info("wrote %s", p)
    return p


def _episode(args):
    scenario, ga, ra, horizon, seed = args
    return run_episode(scenario, ga, ra, horizon, seed)


def cmd_run(args) -> int:
    doc = load(args)
    seeds = parse_seeds(args.seeds) if args.seeds else [int(s) for s in doc["run"]["seeds"]]
    doc["run"]["seeds"] = seeds
    horizon = int(doc["run"]["horizon_blocks"])
    scenario = cfgmod.scenario(doc)
    ra = doc["ra"]["routine"]
    routine = doc["grouping"]["routine"]
    ga = make_grouping(doc, scenario, routine, ra)
    check_schedule(scenario, ga)
    metrics = map_jobs(_episode, [(scenario, ga, ra, horizon, s) for s in seeds], args.jobs)

    rows = [r for m in metrics for r in m.rows()]
    violations = {str(m.seed): m.violations for m in metrics}
    out = Path(args.out)
    _write(out, "metrics.csv", _csv_text([f"config={_dump(doc)}", f"seeds={_dump(seeds)}"],
                                         METRIC_COLUMNS, rows))
    _write(out, "metrics.json", json.dumps({"config": doc, "seeds": seeds, "horizon_blocks": horizon,
                                            "groups": _groups_doc(ga, routine), "rows": rows,
                                            "violations": violations}, indent=2, sort_keys=True) + "\n")
    _write(out, "groups.json", json.dumps({"config": doc, **_groups_doc(ga, routine)},
                                          indent=2, sort_keys=True) + "\n")
    for m in metrics:
        print(f"seed {m.seed}: system timely throughput {m.system_timely_throughput:.4f} packets/block, "
              f"violations {m.total_violations}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    doc = load(args)
    sw = doc["sweep"]
    if args.seeds:
        sw["seeds"] = parse_seeds(args.seeds)
    values = list(sw["values"] or [])
    if not values:
        raise ConfigError("sweep.values must list at least one axis value")
    if not sw["seeds"]:
        raise ConfigError("sweep.seeds must list at least one seed")
    result = sweep(doc, sw["axis"], values, [tuple(c) for c in sw["combos"]],
                   [int(s) for s in sw["seeds"]], int(sw["horizon_blocks"]), jobs=args.jobs)
    sta_cols = sorted({k for r in result.rows for k in r if k.startswith("sta")}, key=lambda c: int(c[3:]))
    columns = ["axis_value", "grouping", "ra", "seed", "system_timely_throughput"] + sta_cols
    header = [f"config={_dump(doc)}", f"axis={sw['axis']}"]
    out = Path(args.out)
    _write(out, "sweep.csv", _csv_text(header, columns, result.rows))
    summary = result.summary()
    _write(out, "sweep_summary.csv", _csv_text(header, ["axis_value", "grouping", "ra", "n", "mean", "stderr"],
                                               summary))
    groupings = [{"axis_value": v, "grouping": g, "ra": ra, "groups": members}
                 for (v, g, ra), members in result.groupings.items()]
    _write(out, "groups.json", json.dumps({"config": doc, "groupings": groupings}, indent=2, sort_keys=True) + "\n")
    for s in summary:
        print(f"{sw['axis']}={s['axis_value']} {s['grouping']}+{s['ra']}: "
              f"{s['mean']:.4f} +- {s['stderr']:.4f} (n={s['n']})")
    return EXIT_OK


def cmd_group(args) -> int:
    doc = load(args)
    scenario = cfgmod.scenario(doc)
    routine = doc["grouping"]["routine"]
    ga = make_grouping(doc, scenario, routine, doc["ra"]["routine"])
    check_schedule(scenario, ga)
    _write(Path(args.out), "groups.json", json.dumps({"config": doc, **_groups_doc(ga, routine)},
                                                     indent=2, sort_keys=True) + "\n")
    for l, members in enumerate(ga.members()):
        print(f"group {l + 1}: {sorted(members)}")
    return EXIT_OK


def cmd_validate(args) -> int:
    doc = load(args)
    scenario = cfgmod.scenario(doc)
    if doc["grouping"]["routine"] == "fixed":
        ga = cfgmod.fixed_groups(doc, list(scenario.triplets))
    else:
        # any grouping that makes every group non-empty exercises the SP overlap check
        ga = make_grouping(doc, scenario, "rr", doc["ra"]["routine"])
    check_schedule(scenario, ga)
    print(json.dumps(doc, indent=2, sort_keys=True))
    return EXIT_OK


COMMANDS = {"run": cmd_run, "sweep": cmd_sweep, "group": cmd_group, "validate": cmd_validate}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="twtsched", description="Broadcast TWT uplink scheduling simulator.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)
    for name, help_ in [("run", "simulate one configuration over one or more seeds"),
                        ("sweep", "sweep p_avg or the number of STAs over grouping/RA combos"),
                        ("group", "compute a grouping and write groups.json"),
                        ("validate", "check a config and print it normalised")]:
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--config", type=Path, default=None,
                        help=f"JSON config (default: bundled {BUNDLED_CONFIG})")
        sp.add_argument("--override", action="append", metavar="KEY=VALUE",
                        help="dot-path override, value parsed as JSON when possible (repeatable)")
        if name != "validate":
            sp.add_argument("--out", default="out", help="output directory (default: ./out)")
        if name in ("run", "sweep"):
            sp.add_argument("--seeds", help="comma list or ranges, e.g. 1,2,5-9")
            sp.add_argument("--jobs", type=int, default=1, help="worker processes")
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "jobs", 1) < 1:
        print("error: --jobs must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return COMMANDS[args.command](args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except InvariantError as e:
        print(f"invariant violated: {e}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
