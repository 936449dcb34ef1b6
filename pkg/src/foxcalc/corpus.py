"""The default corpus of small groups, and loading/resolving corpus files.

A corpus is a JSON list of entries::

    {"name": "D4", "preset": "D4",
     "within": "r",                        # optional: use this subgroup as the group
     "subgroups": ["*", "r", "r^2,s"],     # "*" whole group, "" trivial
     "normals": ["", "r^2"],               # normal subgroups N for relative quotients
     "series": [{"kind": "gamma"},
                {"kind": "custom", "terms": ["*", "r", "r^2"]},
                {"kind": "action"}, {"kind": "induced"}]}

``table`` (a path to a group table file) may replace ``preset``.  Series of
kind ``action`` and ``induced`` need ``within``: they are the series
K_(i+1) = [K_(i), Gamma] and K n gamma_i(Gamma) of the subgroup K inside the
ambient group Gamma.  Subgroup strings are comma separated element labels.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

from .groups import (
    DEFAULT_MAX_ORDER,
    FiniteGroup,
    GroupError,
    GroupSeries,
    Subgroup,
    action_series,
    build_preset,
    induced_series,
    is_normal,
    load_table,
    lower_central_series,
    parse_subgroup,
)

DEFAULT_CORPUS: list[dict] = [
    {"name": "C2", "preset": "C2", "subgroups": ["*", ""], "normals": [""], "series": [{"kind": "gamma"}]},
    {"name": "C3", "preset": "C3", "subgroups": ["*", ""], "normals": [""], "series": [{"kind": "gamma"}]},
    {
        "name": "C4",
        "preset": "C4",
        "subgroups": ["*", "a^2"],
        "normals": ["", "a^2"],
        "series": [{"kind": "gamma"}, {"kind": "custom", "terms": ["*", "a^2"]}],
    },
    {
        "name": "C6",
        "preset": "C6",
        "subgroups": ["*", "a^2", "a^3"],
        "normals": ["", "a^3"],
        "series": [{"kind": "gamma"}, {"kind": "custom", "terms": ["*", "a^2"]}],
    },
    {
        "name": "C8",
        "preset": "C8",
        "subgroups": ["*", "a^2", "a^4"],
        "normals": ["", "a^4"],
        "series": [{"kind": "gamma"}, {"kind": "custom", "terms": ["*", "a^2", "a^4"]}],
    },
    {
        "name": "C2xC2",
        "preset": "C2xC2",
        "subgroups": ["*", "a", "b"],
        "normals": ["", "a"],
        "series": [{"kind": "gamma"}, {"kind": "custom", "terms": ["*", "a"]}],
    },
    {
        "name": "C2xC4",
        "preset": "C2xC4",
        "subgroups": ["*", "a", "b", "a,b^2"],
        "normals": ["", "b^2"],
        "series": [{"kind": "gamma"}, {"kind": "custom", "terms": ["*", "a,b^2", "b^2"]}],
    },
    {
        "name": "S3",
        "preset": "S3",
        "subgroups": ["*", "(123)", "(12)"],
        "normals": ["", "(123)"],
        "series": [{"kind": "gamma"}],
    },
    {
        "name": "D4",
        "preset": "D4",
        "subgroups": ["*", "r", "r^2,s", "s"],
        "normals": ["", "r^2", "r"],
        "series": [{"kind": "gamma"}, {"kind": "custom", "terms": ["*", "r", "r^2"]}],
    },
    {
        "name": "Q8",
        "preset": "Q8",
        "subgroups": ["*", "i", "-1"],
        "normals": ["", "-1"],
        "series": [{"kind": "gamma"}],
    },
    {
        "name": "D6",
        "preset": "dihedral:6",
        "subgroups": ["*", "r", "r^2,s", "r^3,s"],
        "normals": ["", "r^3", "r^2"],
        "series": [{"kind": "gamma"}],
    },
    {
        "name": "A4",
        "preset": "A4",
        "subgroups": ["*", "(12)(34),(13)(24)", "(123)"],
        "normals": ["", "(12)(34),(13)(24)"],
        "series": [{"kind": "gamma"}],
    },
    {
        "name": "Heis3",
        "preset": "Heis3",
        "subgroups": ["*", "x,z", "z", "x"],
        "normals": ["", "z"],
        "series": [{"kind": "gamma"}],
    },
    {
        "name": "D8",
        "preset": "dihedral:8",
        "subgroups": ["*", "r"],
        "normals": ["", "r^4"],
        "series": [{"kind": "gamma"}],
    },
    # normal subgroups of semidirect products, with the series induced by the ambient group
    {
        "name": "C4<D4",
        "preset": "D4",
        "within": "r",
        "subgroups": ["*", "r^2"],
        "normals": [""],
        "series": [{"kind": "action"}, {"kind": "induced"}],
    },
    {
        "name": "C3xC3<Heis3",
        "preset": "Heis3",
        "within": "x,z",
        "subgroups": ["*", "x", "z"],
        "normals": ["", "z"],
        "series": [{"kind": "action"}, {"kind": "induced"}],
    },
    {
        "name": "C6<D6",
        "preset": "dihedral:6",
        "within": "r",
        "subgroups": ["*", "r^2", "r^3"],
        "normals": [""],
        "series": [{"kind": "action"}],
    },
    {
        "name": "V4<A4",
        "preset": "A4",
        "within": "(12)(34),(13)(24)",
        "subgroups": ["*", "(12)(34)"],
        "normals": [""],
        "series": [{"kind": "action"}],
    },
    {
        "name": "C4<Q8",
        "preset": "Q8",
        "within": "i",
        "subgroups": ["*"],
        "normals": [""],
        "series": [{"kind": "action"}],
    },
]


class CorpusError(ValueError):
    pass


@dataclass
class ResolvedEntry:
    name: str
    group: FiniteGroup
    series: dict[str, GroupSeries]
    subgroups: dict[str, Subgroup]
    normals: dict[str, Subgroup] = field(default_factory=dict)


@dataclass
class Instance:
    """One (G, N-series, H) triple from the corpus."""

    entry: str
    series_name: str
    subgroup_name: str
    group: FiniteGroup
    series: GroupSeries
    h: Subgroup

    @property
    def key(self) -> str:
        return f"{self.entry}|{self.series_name}|H=<{self.subgroup_name or '1'}>"


def subgroup_from_text(group: FiniteGroup, text: str) -> Subgroup:
    if text == "*":
        return group.whole
    return parse_subgroup(group, text)


def series_from_terms(group: FiniteGroup, terms: list, kind: str = "custom") -> GroupSeries:
    subs = [subgroup_from_text(group, t) if isinstance(t, str) else parse_subgroup(group, t) for t in terms]
    if not subs or subs[0] != group.whole:
        raise GroupError("the first term of a series must be the whole group")
    subs.append(group.trivial)
    return GroupSeries(group, subs, kind).validate()


def resolve_entry(entry: dict, max_order: int = DEFAULT_MAX_ORDER, base_dir: str = ".") -> ResolvedEntry:
    try:
        if "preset" in entry:
            ambient = build_preset(entry["preset"], max_order)
        elif "table" in entry:
            path = entry["table"]
            if not os.path.isabs(path):
                path = os.path.join(base_dir, path)
            ambient = load_table(path, max_order)
        else:
            raise CorpusError(f"entry {entry.get('name')!r} needs 'preset' or 'table'")
    except KeyError as exc:
        raise CorpusError(f"entry is missing field {exc}") from None
    name = entry.get("name", ambient.name)
    within = entry.get("within")
    if within is not None:
        k = subgroup_from_text(ambient, within)
        group, old = k.as_group()
        group.name = name
    else:
        k, group, old = None, ambient, None
    series: dict[str, GroupSeries] = {}
    for spec in entry.get("series", [{"kind": "gamma"}]):
        kind = spec.get("kind")
        if kind == "gamma":
            series["gamma"] = lower_central_series(group)
        elif kind == "custom":
            series[spec.get("name", "custom")] = series_from_terms(group, spec["terms"])
        elif kind in ("action", "induced", "intersect"):
            if k is None:
                raise CorpusError(f"series kind {kind!r} needs 'within' in entry {name!r}")
            if kind == "action":
                s = action_series(k)
            else:
                s = induced_series(lower_central_series(ambient), k)
            series[spec.get("name", kind)] = s.transport(group, old).validate()
        else:
            raise CorpusError(f"unknown series kind {kind!r} in entry {name!r}")
    subgroups = {t: subgroup_from_text(group, t) for t in entry.get("subgroups", ["*"])}
    normals = {}
    for t in entry.get("normals", [""]):
        n = subgroup_from_text(group, t)
        if not is_normal(n):
            raise CorpusError(f"subgroup <{t}> of {name} is not normal")
        normals[t] = n
    return ResolvedEntry(name, group, series, subgroups, normals)


def corpus_path() -> str | None:
    return os.environ.get("FOXCALC_CORPUS") or None


def load_corpus(path: str | None = None) -> tuple[list[dict], str]:
    """Entries from ``path``, else from $FOXCALC_CORPUS, else the built-in corpus."""
    path = path or corpus_path()
    if path is None:
        return DEFAULT_CORPUS, "."
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise CorpusError(f"cannot read corpus {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise CorpusError(f"corpus {path} is not valid JSON: {exc.msg}") from None
    if not isinstance(data, list):
        raise CorpusError("a corpus file holds a JSON list of entries")
    return data, os.path.dirname(os.path.abspath(path))


def resolve_corpus(entries: list[dict], max_order: int = DEFAULT_MAX_ORDER, base_dir: str = ".") -> list[ResolvedEntry]:
    """Resolve every entry up front so bad input fails before any computation."""
    return [resolve_entry(e, max_order, base_dir) for e in entries]


def instances(resolved: list[ResolvedEntry]) -> list[Instance]:
    out = []
    for r in resolved:
        for sname, s in r.series.items():
            for hname, h in r.subgroups.items():
                out.append(Instance(r.name, sname, hname, r.group, s, h))
    return out
