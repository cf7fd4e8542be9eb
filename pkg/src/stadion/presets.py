"""Case presets A, B, C and loading of custom case files."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Optional

from .stadium_geometry import OrbitTangentSet, StadiumSpec


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class CaseConfig:
    name: str
    stadium: StadiumSpec
    tangents: OrbitTangentSet
    orbits: Optional[int] = None
    irrationals: tuple = ()  # generator indices approximated by the Diophantine step
    source: str = ""
    extra: dict = field(default_factory=dict)

    @property
    def tangent_units(self) -> Optional[tuple]:
        u = self.tangents.units
        return None if u is None else tuple(k for k in u if k >= 0)


def _preset_table() -> dict:
    text = resources.files("stadion").joinpath("data/cases.json").read_text(encoding="utf-8")
    return json.loads(text)


PRESET_NAMES = ("A", "B", "C")


def case_from_dict(name: str, d: dict) -> CaseConfig:
    try:
        L = d.get("L", 1)
        if isinstance(L, str):
            L = Fraction(L)
        stadium = StadiumSpec(L, name)
        if "tangent_units" in d:
            units = [int(k) for k in d["tangent_units"]]
            if any(k < 0 or k >= 8 for k in units):
                raise ConfigError("tangent_units must lie in 0..7 (multiples of pi/16)")
            tangents = OrbitTangentSet.symmetric_units(units)
        elif "tangent_angles" in d:
            angles = sorted({float(a) for a in d["tangent_angles"]} | {-float(a) for a in d["tangent_angles"]})
            tangents = OrbitTangentSet(tuple(angles))
        else:
            raise ConfigError("case needs tangent_units or tangent_angles")
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid case {name!r}: {exc}") from exc
    return CaseConfig(
        name=name,
        stadium=stadium,
        tangents=tangents,
        orbits=d.get("orbits"),
        irrationals=tuple(d.get("irrationals", ())),
        source=d.get("source", ""),
        extra={k: v for k, v in d.items()
               if k not in ("L", "tangent_units", "tangent_angles", "orbits", "irrationals", "source")},
    )


def load_case(name: str, L=None) -> CaseConfig:
    table = _preset_table()
    key = str(name).upper()
    if key not in table:
        raise ConfigError(f"unknown case {name!r}; presets are {', '.join(sorted(table))}")
    d = dict(table[key])
    if L is not None:
        d["L"] = L
    return case_from_dict(key, d)


def load_case_file(path: str) -> CaseConfig:
    with open(path, encoding="utf-8") as fh:
        d = json.load(fh)
    if "case" in d and str(d["case"]).upper() in PRESET_NAMES and "tangent_units" not in d:
        return load_case(d["case"], d.get("L"))
    return case_from_dict(str(d.get("case", "custom")), d)
