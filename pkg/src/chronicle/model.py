"""Release identifiers, lot identifiers, and the attribute schema."""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

__all__ = [
    "ReleaseId",
    "LotId",
    "AttributeKind",
    "Attribute",
    "AttributeSchema",
    "default_schema",
    "DEFAULT_RENAMES",
]


@dataclass(frozen=True, order=True)
class ReleaseId:
    """One dated dataset version, e.g. 2011.1 = first half of 2011.

    Ordering is (year, half) lexicographic, which the dataclass field order
    provides for free.
    """

    year: int
    half: int

    def __post_init__(self):
        if self.half not in (1, 2):
            raise ValueError(f"half must be 1 or 2, got {self.half}")

    def __str__(self) -> str:
        return f"{self.year}.{self.half}"

    @classmethod
    def parse(cls, text: str) -> "ReleaseId":
        year, _, half = str(text).partition(".")
        return cls(int(year), int(half or 1))


@dataclass(frozen=True)
class LotId:
    """A lot's identity: borough code plus block and lot codes.

    The composite key (the BBL) is exactly the concatenation of the three
    codes, so it is derivable and unique per release.
    """

    borough: int
    block: str
    lot: str

    @property
    def bbl(self) -> str:
        return f"{self.borough}{self.block}{self.lot}"

    def __str__(self) -> str:
        return self.bbl


class AttributeKind(str, Enum):
    CATEGORICAL = "categorical"
    STABLE = "numerical-stable"
    UNSTABLE = "numerical-unstable"


NUMERIC_KINDS = (AttributeKind.STABLE, AttributeKind.UNSTABLE)


@dataclass(frozen=True)
class Attribute:
    name: str
    kind: AttributeKind
    unit: str = ""


class AttributeSchema:
    """The canonical attribute list, partitioned into the three kinds."""

    def __init__(self, attributes: list[Attribute]):
        names = [a.name for a in attributes]
        if len(set(names)) != len(names):
            raise ValueError("duplicate attribute names in schema")
        self.attributes = list(attributes)
        self.by_name = {a.name: a for a in attributes}

    def __iter__(self):
        return iter(self.attributes)

    def __contains__(self, name: str) -> bool:
        return name in self.by_name

    def names(self, kind: AttributeKind | None = None) -> list[str]:
        if kind is None:
            return [a.name for a in self.attributes]
        return [a.name for a in self.attributes if a.kind == kind]

    def kind_of(self, name: str) -> AttributeKind:
        return self.by_name[name].kind

    def is_numeric(self, name: str) -> bool:
        return self.by_name[name].kind in NUMERIC_KINDS

    def to_json(self) -> dict:
        return {
            "attributes": [
                {"name": a.name, "kind": a.kind.value, "unit": a.unit}
                for a in self.attributes
            ]
        }

    @classmethod
    def from_json(cls, doc: dict) -> "AttributeSchema":
        return cls(
            [
                Attribute(a["name"], AttributeKind(a["kind"]), a.get("unit", ""))
                for a in doc["attributes"]
            ]
        )

    @classmethod
    def load(cls, path: str | Path) -> "AttributeSchema":
        return cls.from_json(json.loads(Path(path).read_text()))


def default_schema() -> AttributeSchema:
    """The stock tax-lot schema shipped with the engine."""
    cat = AttributeKind.CATEGORICAL
    sta = AttributeKind.STABLE
    uns = AttributeKind.UNSTABLE
    return AttributeSchema(
        [
            Attribute("BLDGCLASS", cat, "building class code"),
            Attribute("LANDUSE", cat, "land use category"),
            Attribute("SPDIST", cat, "special purpose district"),
            Attribute("LOTAREA", sta, "sq ft"),
            Attribute("RESAREA", sta, "sq ft"),
            Attribute("COMAREA", sta, "sq ft"),
            Attribute("OFFICEAREA", sta, "sq ft"),
            Attribute("NUMBLDGS", sta, "count"),
            Attribute("NUMFLOORS", sta, "count"),
            Attribute("ASSESSLAND", uns, "USD"),
            Attribute("ASSESSTOTAL", uns, "USD"),
            Attribute("BUILTFAR", uns, "ratio"),
            Attribute("RESIDFAR", uns, "ratio"),
        ]
    )


# Historical spellings seen across release vintages, mapped to canonical
# names. Users extend this through the --renames CSV.
DEFAULT_RENAMES = {
    "AssessLand": "ASSESSLAND",
    "AssessTot": "ASSESSTOTAL",
    "AssessTotal": "ASSESSTOTAL",
    "BldgClass": "BLDGCLASS",
    "BuiltFAR": "BUILTFAR",
    "ResidFAR": "RESIDFAR",
    "LandUse": "LANDUSE",
    "LandUse2": "LANDUSE",
    "LotArea": "LOTAREA",
    "ResArea": "RESAREA",
    "ComArea": "COMAREA",
    "OfficeArea": "OFFICEAREA",
    "NumBldgs": "NUMBLDGS",
    "NumFloors": "NUMFLOORS",
    "SPDist1": "SPDIST",
    "SpDist1": "SPDIST",
}
