import json

import pytest

from foxcalc.corpus import (
    DEFAULT_CORPUS,
    CorpusError,
    instances,
    load_corpus,
    resolve_corpus,
    resolve_entry,
    series_from_terms,
)
from foxcalc.groups import GroupError, InvalidTable, build_preset


def test_default_corpus_resolves():
    resolved = resolve_corpus(DEFAULT_CORPUS)
    assert len(resolved) == len(DEFAULT_CORPUS)
    assert any(e.name == "Heis3" for e in resolved)
    keys = [i.key for i in instances(resolved)]
    assert len(keys) == len(set(keys))


def test_intersect_is_an_alias_for_induced():
    base = {"name": "C4<D4", "preset": "D4", "within": "r"}
    a = resolve_entry({**base, "series": [{"kind": "induced"}]})
    b = resolve_entry({**base, "series": [{"kind": "intersect"}]})
    assert [t.elements for t in a.series["induced"].terms] == [t.elements for t in b.series["intersect"].terms]


def test_custom_series_from_terms():
    g = build_preset("Heis3")
    s = series_from_terms(g, ["*", "z"])
    assert [t.order for t in s.terms[:3]] == [27, 3, 1]
    with pytest.raises(GroupError):
        series_from_terms(g, ["z"])


def test_custom_series_in_entry():
    e = resolve_entry({"name": "thick", "preset": "Heis3", "series": [{"kind": "custom", "name": "thick", "terms": ["*", "*", "z", "z"]}]})
    assert list(e.series) == ["thick"]


@pytest.mark.parametrize(
    "entry,error",
    [
        ({"name": "x"}, CorpusError),
        ({"preset": "nosuch"}, GroupError),
        ({"table": "missing.json"}, InvalidTable),
        ({"preset": "S3", "normals": ["(12)"]}, CorpusError),
        ({"preset": "D4", "series": [{"kind": "action"}]}, CorpusError),
        ({"preset": "D4", "series": [{"kind": "weird"}]}, CorpusError),
    ],
)
def test_bad_entries(entry, error, tmp_path):
    with pytest.raises(error):
        resolve_entry(entry, base_dir=str(tmp_path))


def test_table_entries_resolve_relative_to_corpus_file(tmp_path):
    (tmp_path / "c3.json").write_text(json.dumps({"order": 3, "table": [[0, 1, 2], [1, 2, 0], [2, 0, 1]]}))
    path = tmp_path / "corpus.json"
    path.write_text(json.dumps([{"name": "C3t", "table": "c3.json"}]))
    entries, base = load_corpus(str(path))
    resolved = resolve_corpus(entries, base_dir=base)
    assert resolved[0].group.order == 3


def test_load_corpus_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(CorpusError):
        load_corpus(str(bad))
    obj = tmp_path / "obj.json"
    obj.write_text("{}")
    with pytest.raises(CorpusError):
        load_corpus(str(obj))
    with pytest.raises(CorpusError):
        load_corpus(str(tmp_path / "absent.json"))


def test_environment_variable_selects_corpus(tmp_path, monkeypatch):
    path = tmp_path / "env.json"
    path.write_text(json.dumps([{"name": "C2", "preset": "C2"}]))
    monkeypatch.setenv("FOXCALC_CORPUS", str(path))
    entries, _ = load_corpus()
    assert entries == [{"name": "C2", "preset": "C2"}]
    monkeypatch.delenv("FOXCALC_CORPUS")
    assert load_corpus()[0] is DEFAULT_CORPUS
