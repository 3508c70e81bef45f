"""Bundled corpus fans and their golden constants files."""

from __future__ import annotations

import json
from importlib import resources

from .fan import Fan

NAMES = (
    "p1",
    "p2",
    "p1xp1",
    "hirzebruch1",
    "dp6",
    "p1-norm-one",
    "p1xp1-swap",
    "p2-threecycle",
)


def fan_from_dict(data) -> Fan:
    return Fan(
        data["dim"],
        data["rays"],
        data["max_cones"],
        data.get("galois", ()),
    )


def fan_to_dict(fan: Fan) -> dict:
    out = {
        "dim": fan.dim,
        "rays": [list(r) for r in fan.rays],
        "max_cones": [list(c) for c in fan.max_cones],
    }
    if fan.galois:
        out["galois"] = [[list(row) for row in g] for g in fan.galois]
    return out


def _read(relative):
    return (
        resources.files("toricount").joinpath(relative).read_text(encoding="utf-8")
    )


def fan(name) -> Fan:
    if name not in NAMES:
        raise KeyError("unknown corpus fan %r (have %s)" % (name, list(NAMES)))
    return fan_from_dict(json.loads(_read("corpus/%s.json" % name)))


def fan_json_path(name):
    """Filesystem path of a bundled corpus file (for CLI tests)."""
    return str(resources.files("toricount").joinpath("corpus/%s.json" % name))


def golden_constants(name) -> dict:
    return json.loads(_read("corpus/golden/%s.constants.json" % name))


def all_fans():
    return {name: fan(name) for name in NAMES}
