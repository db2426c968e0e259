"""JSON experiment configuration.

Layout (every section optional, defaults below)::

    {
      "system":   {GlobalConfig fields},
      "stas":     {"count", "weight", "payload_bits", "buffer_cap", "p_avg",
                   "traffic": [traffic entries, cycled over STA ids],
                   "profiles": [{"id": 3, ...per-STA overrides...}]},
      "twt":      [{"offset_blocks", "wake_interval_blocks", "sp_blocks"}, ...],
      "ra":       {"routine": "dpp" | "rr" | "greedy" | "gbu", "v_param"},
      "grouping": {"routine": "greedy" | "rr" | "fixed", "groups": [[ids], ...],
                   "eval_horizon", "eval_seeds", "eval_ra"},
      "run":      {"horizon_blocks", "seeds"},
      "sweep":    {"axis": "p_avg" | "num_stas", "values", "combos": [[grouping, ra], ...],
                   "horizon_blocks", "seeds"}
    }

A traffic entry is ``{"kind": "bernoulli", "batch_size", "prob"}``,
``{"kind": "bv", "fps", "target_rate_bps", ...}``, ``{"kind": "cbr",
"burst_bytes", "interval_blocks"}`` or ``{"preset": "bv" | "cbr1" | "cbr2"}``,
each with an optional ``deadline_blocks``.
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any, Iterable

from .errors import ConfigError
from .model import GlobalConfig, GroupAssignment, Scenario, StaProfile, TwtTriplet
from .ra import RA_ROUTINES
from .traffic import PRESETS, Bernoulli, BufferedVideo, Cbr, TrafficModel

GROUPING_ROUTINES = ("greedy", "rr", "fixed")
SWEEP_AXES = ("p_avg", "num_stas")

TABLE2_TRIPLETS = [
    {"offset_blocks": 2, "wake_interval_blocks": 30, "sp_blocks": 7},
    {"offset_blocks": 16, "wake_interval_blocks": 150, "sp_blocks": 2},
    {"offset_blocks": 10, "wake_interval_blocks": 90, "sp_blocks": 5},
]

DEFAULTS: dict[str, Any] = {
    "system": {
        "num_rus": 4,
        "ru_bandwidth_hz": 20e6,
        "noise_power_w": 1e-3,
        "ftt_seconds": 1e-3,
        "p_max": 1.0,
        "power_levels": [0.2, 0.4, 0.6, 0.8, 1.0],
        "gain_set": [10.0, 0.1, 0.001],
        "gain_probs": None,
        "a_max": 40,
    },
    "stas": {
        "count": 8,
        "weight": 1.0,
        "payload_bits": 12000,
        "buffer_cap": 50,
        "p_avg": 0.2,
        "traffic": [{"kind": "bernoulli", "batch_size": 10, "prob": 0.7, "deadline_blocks": 30}],
        "profiles": [],
    },
    "twt": TABLE2_TRIPLETS,
    "ra": {"routine": "dpp", "v_param": 1e4},
    "grouping": {"routine": "rr", "groups": None, "eval_horizon": 20000,
                 "eval_seeds": [101, 102, 103], "eval_ra": None},
    "run": {"horizon_blocks": 100000, "seeds": [1]},
    "sweep": {"axis": "p_avg", "values": [0.2, 0.4, 0.6, 0.8],
              "combos": [["rr", "dpp"], ["rr", "greedy"], ["rr", "gbu"], ["rr", "rr"]],
              "horizon_blocks": 50000, "seeds": list(range(1, 11))},
}

_SECTION_KEYS = {
    "system": set(DEFAULTS["system"]),
    "stas": set(DEFAULTS["stas"]),
    "ra": set(DEFAULTS["ra"]),
    "grouping": set(DEFAULTS["grouping"]),
    "run": set(DEFAULTS["run"]),
    "sweep": set(DEFAULTS["sweep"]),
}


def _merge(base: dict, extra: dict, path: str = "") -> dict:
    out = copy.deepcopy(base)
    for k, v in extra.items():
        where = f"{path}{k}"
        if isinstance(out.get(k), dict) and isinstance(v, dict):
            out[k] = _merge(out[k], v, where + ".")
        else:
            out[k] = copy.deepcopy(v)
    return out


def parse_override(text: str) -> tuple[list[str], Any]:
    if "=" not in text:
        raise ConfigError(f"override {text!r} is not of the form key.path=value")
    key, raw = text.split("=", 1)
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    parts = [p for p in key.strip().split(".") if p]
    if not parts:
        raise ConfigError(f"override {text!r} has an empty key")
    return parts, value


def apply_overrides(doc: dict, overrides: Iterable[str]) -> dict:
    doc = copy.deepcopy(doc)
    for text in overrides:
        parts, value = parse_override(text)
        node = doc
        for p in parts[:-1]:
            if isinstance(node, list):
                try:
                    node = node[int(p)]
                except (ValueError, IndexError):
                    raise ConfigError(f"override {text!r}: bad list index {p!r}") from None
                continue
            node = node.setdefault(p, {})
            if not isinstance(node, (dict, list)):
                raise ConfigError(f"override {text!r}: {p!r} is not a section")
        last = parts[-1]
        if isinstance(node, list):
            try:
                node[int(last)] = value
            except (ValueError, IndexError):
                raise ConfigError(f"override {text!r}: bad list index {last!r}") from None
        else:
            node[last] = value
    return doc


def resolve(doc: dict | None = None, overrides: Iterable[str] = ()) -> dict:
    """Defaults + document + overrides, with unknown keys rejected."""
    doc = doc or {}
    if not isinstance(doc, dict):
        raise ConfigError("config root must be a JSON object")
    merged = apply_overrides(_merge(DEFAULTS, doc), overrides)
    for section, value in merged.items():
        if section == "twt":
            continue
        if section not in _SECTION_KEYS:
            raise ConfigError(f"unknown config section {section!r}")
        if not isinstance(value, dict):
            raise ConfigError(f"config section {section!r} must be an object")
        extra = set(value) - _SECTION_KEYS[section]
        if extra:
            raise ConfigError(f"unknown key(s) {sorted(extra)} in section {section!r}")
    return merged


def load_config(path: str | Path, overrides: Iterable[str] = ()) -> dict:
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file not found: {p}")
    try:
        doc = json.loads(p.read_text())
    except json.JSONDecodeError as e:
        raise ConfigError(f"{p}: invalid JSON at line {e.lineno} column {e.colno}: {e.msg}") from None
    return resolve(doc, overrides)


# --- typed views -----------------------------------------------------------------------------

def _build(cls, data: dict, where: str):
    try:
        return cls(**data)
    except TypeError as e:
        raise ConfigError(f"{where}: {e}") from None
    except ConfigError as e:
        raise ConfigError(f"{where}: {e}") from None


def system_config(doc: dict) -> GlobalConfig:
    s = dict(doc["system"])
    for key in ("power_levels", "gain_set", "gain_probs"):
        if s.get(key) is not None:
            s[key] = tuple(float(x) for x in s[key])
    s["v_param"] = float(doc["ra"]["v_param"])
    return _build(GlobalConfig, s, "system")


def traffic_model(entry: dict, where: str) -> tuple[TrafficModel, int | None]:
    entry = dict(entry)
    deadline = entry.pop("deadline_blocks", None)
    if "preset" in entry:
        name = entry.pop("preset")
        if name not in PRESETS:
            raise ConfigError(f"{where}: unknown traffic preset {name!r}; expected one of {sorted(PRESETS)}")
        if entry:
            raise ConfigError(f"{where}: preset entries only accept deadline_blocks")
        model, preset_deadline = PRESETS[name]()
        return model, deadline if deadline is not None else preset_deadline
    kind = entry.pop("kind", None)
    cls = {"bernoulli": Bernoulli, "bv": BufferedVideo, "cbr": Cbr}.get(kind)
    if cls is None:
        raise ConfigError(f"{where}: traffic kind must be bernoulli, bv or cbr (got {kind!r})")
    return _build(cls, entry, where), deadline


def sta_profiles(doc: dict, num_stas: int | None = None, p_avg: float | None = None) -> list[StaProfile]:
    s = doc["stas"]
    count = int(s["count"] if num_stas is None else num_stas)
    cycle = s["traffic"]
    if count < 1:
        raise ConfigError("stas.count must be >= 1")
    if not cycle:
        raise ConfigError("stas.traffic must list at least one traffic entry")
    per_id = {}
    for j, prof in enumerate(s["profiles"]):
        if "id" not in prof:
            raise ConfigError(f"stas.profiles[{j}]: missing id")
        per_id[int(prof["id"])] = prof
    out = []
    for m in range(1, count + 1):
        over = per_id.get(m, {})
        where = f"stas.traffic[{(m - 1) % len(cycle)}]"
        entry = over.get("traffic", cycle[(m - 1) % len(cycle)])
        model, deadline = traffic_model(entry, where)
        deadline = over.get("deadline_blocks", deadline)
        if deadline is None:
            raise ConfigError(f"{where}: deadline_blocks is required for custom traffic")
        pa = over.get("p_avg", s["p_avg"] if p_avg is None else p_avg)
        out.append(_build(StaProfile, dict(
            id=m, weight=float(over.get("weight", s["weight"])),
            payload_bits=int(over.get("payload_bits", s["payload_bits"])),
            deadline_blocks=int(deadline), buffer_cap=int(over.get("buffer_cap", s["buffer_cap"])),
            p_avg=float(pa), traffic=model), f"sta {m}"))
    return out


def triplets(doc: dict) -> list[TwtTriplet]:
    tw = doc["twt"]
    if not isinstance(tw, list) or not tw:
        raise ConfigError("twt must be a non-empty list of triplets")
    return [_build(TwtTriplet, dict(t), f"twt[{i}]") for i, t in enumerate(tw)]


def scenario(doc: dict, num_stas: int | None = None, p_avg: float | None = None) -> Scenario:
    try:
        return Scenario(system_config(doc), tuple(sta_profiles(doc, num_stas, p_avg)), tuple(triplets(doc)))
    except ConfigError:
        raise
    except (TypeError, ValueError) as e:
        raise ConfigError(str(e)) from None


def fixed_groups(doc: dict, trips: list[TwtTriplet]) -> GroupAssignment:
    groups = doc["grouping"]["groups"]
    if not groups:
        raise ConfigError("grouping.groups is required when grouping.routine is 'fixed'")
    return GroupAssignment.from_lists(groups, trips)


def check_routines(doc: dict) -> None:
    if doc["ra"]["routine"] not in RA_ROUTINES:
        raise ConfigError(f"ra.routine must be one of {RA_ROUTINES}")
    if doc["grouping"]["routine"] not in GROUPING_ROUTINES:
        raise ConfigError(f"grouping.routine must be one of {GROUPING_ROUTINES}")
    eval_ra = doc["grouping"]["eval_ra"]
    if eval_ra is not None and eval_ra not in RA_ROUTINES:
        raise ConfigError(f"grouping.eval_ra must be null or one of {RA_ROUTINES}")
    sw = doc["sweep"]
    if sw["axis"] not in SWEEP_AXES:
        raise ConfigError(f"sweep.axis must be one of {SWEEP_AXES}")
    for c in sw["combos"]:
        if len(c) != 2 or c[0] not in GROUPING_ROUTINES or c[1] not in RA_ROUTINES:
            raise ConfigError(f"sweep.combos entry {c!r} must be [grouping, ra]")


def config_fields() -> list[str]:
    return [f.name for f in fields(GlobalConfig)]
