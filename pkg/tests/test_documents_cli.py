import json
import os
import subprocess
import sys
from fractions import Fraction as F

import pytest

from stairfold import documents as docs
from stairfold.cli import main
from stairfold.crooked import PLIntervalMap
from stairfold.gallery import arc_fold, fold_sequence, snake, triod_separator
from stairfold.graph_core import ClosedSet
from stairfold.stairwell import Stairwell


def corpus_names(corpus_path):
    return sorted(os.listdir(corpus_path("")))


def write_json(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


class TestDocuments:
    def test_rationals(self):
        assert docs.rat(F(3, 4)) == "3/4"
        assert docs.rat(F(2)) == "2"
        assert docs.parse_rat("3/4") == F(3, 4)
        for bad in ("0.75", "1e3", "1/0", 0.5):
            with pytest.raises(docs.DocumentError):
                docs.parse_rat(bad)

    def test_every_corpus_file_round_trips(self, corpus_path):
        for name in corpus_names(corpus_path):
            with open(corpus_path(name), encoding="utf-8") as fh:
                text = fh.read()
            doc = docs.loads(text)
            assert docs.dumps(doc) == text, name
            assert docs.canonical(text) == text, name

    def test_objects_survive(self, tmp_path):
        for kind, payload in [("stairwell", snake(5)), ("fold_sequence", fold_sequence(arc_fold())),
                              ("interval_maps", [PLIntervalMap.tent()])]:
            path = tmp_path / f"{kind}.json"
            docs.save(docs.Document(kind, payload, {"note": "x"}), path)
            back = docs.load(path)
            assert back.kind == kind and back.meta == {"note": "x"}
            if kind == "fold_sequence":
                assert back.payload.top.edge_ids == payload.top.edge_ids
                assert back.payload.folds[0].images() == payload.folds[0].images()
            else:
                assert back.payload == payload

    def test_separator_keeps_radius(self, tmp_path):
        path = tmp_path / "sep.json"
        docs.save(docs.Document("separator", (triod_separator(), F(1, 32))), path)
        M, radius = docs.load(path).payload
        assert M == triod_separator() and radius == F(1, 32)

    @pytest.mark.parametrize("text", ["{", "[]", '{"schema_version": 2, "kind": "graph", "payload": {}}',
                                      '{"schema_version": 1, "kind": "mystery", "payload": {}}',
                                      '{"schema_version": 1, "kind": "graph", "payload": {}}'])
    def test_malformed(self, text):
        with pytest.raises(docs.DocumentError):
            docs.loads(text)

    def test_not_utf8(self, tmp_path):
        path = tmp_path / "latin.json"
        path.write_bytes(b'{"note": "\xe9"}')
        with pytest.raises(docs.DocumentError):
            docs.load(path)


class TestVerify:
    def test_every_corpus_file(self, corpus_path, capsys):
        for name in corpus_names(corpus_path):
            assert main(["verify", corpus_path(name)]) == 0, name
        assert capsys.readouterr().out.count("ok: ") == len(corpus_names(corpus_path))

    def test_reports(self, corpus_path, capsys):
        main(["verify", corpus_path("snake_height5.json")])
        main(["verify", corpus_path("broken_pit2.json")])
        out = capsys.readouterr().out
        assert "ok: stairwell of height 5" in out
        assert "ok: broken stairwell of height 3, pit at level 2" in out

    def test_kind_mismatch(self, corpus_path):
        assert main(["verify", corpus_path("snake_height5.json"), "--kind", "graph"]) == 1

    def test_missing_file(self, tmp_path):
        assert main(["verify", str(tmp_path / "absent.json")]) == 2

    def test_bad_arguments(self):
        assert main(["verify"]) == 2
        assert main(["frobnicate"]) == 2

    def test_empty_stairwell(self, tmp_path, capsys):
        g = snake(1).graph
        path = tmp_path / "empty.json"
        docs.save(docs.Document("stairwell", Stairwell(g, [], [], [])), path)
        assert main(["verify", str(path)]) == 1
        assert capsys.readouterr().err


class TestStairwellCommand:
    def test_triod(self, corpus_path, tmp_path, capsys):
        out = tmp_path / "s.json"
        assert main(["stairwell", corpus_path("triod_separator.json"), "--out", str(out)]) == 0
        height = int(capsys.readouterr().out.split()[-1])
        assert height % 2 == 1
        doc = docs.load(out)
        assert doc.kind == "stairwell" and doc.payload.height == height
        assert main(["verify", str(out)]) == 0

    def test_zigzag(self, corpus_path, capsys):
        assert main(["stairwell", corpus_path("zigzag_separator.json")]) == 0
        assert capsys.readouterr().out.strip() == "height 5"

    def test_wrong_kind(self, corpus_path):
        assert main(["stairwell", corpus_path("snake_height3.json")]) == 1

    def test_not_a_separator(self, tmp_path, corpus_path, capsys):
        doc = json.loads(open(corpus_path("flat_separator.json"), encoding="utf-8").read())
        doc["payload"]["segments"] = doc["payload"]["segments"][:1]
        path = write_json(tmp_path / "leaky.json", doc)
        assert main(["verify", path]) == 1
        assert main(["stairwell", path]) == 1
        assert "not a separator" in capsys.readouterr().err

    def test_thin_tube(self, corpus_path, capsys):
        assert main(["stairwell", corpus_path("flat_separator.json"), "--tube-radius", "1/1073741824"]) == 3
        assert "tube too thin" in capsys.readouterr().err

    def test_bad_radius(self, corpus_path):
        assert main(["stairwell", corpus_path("flat_separator.json"), "--tube-radius", "abc"]) == 2


class TestUnfoldCommand:
    def test_outputs(self, corpus_path, tmp_path, capsys):
        out = tmp_path / "run"
        assert main(["unfold", corpus_path("snake_height5.json"), "--out", str(out)]) == 0
        assert sorted(os.listdir(out)) == ["final.json", "folds.json", "trace.json"]
        printed = capsys.readouterr().out
        assert printed.splitlines()[0].split("\t") == ["step", "event", "height", "pit", "vertices",
                                                       "edges"]
        assert printed.strip().endswith("folds 2")
        final = docs.load(out / "final.json").payload
        folds = docs.load(out / "folds.json").payload
        assert final.height == 1
        assert len(folds) == 2
        assert final.levels[0].base == ClosedSet.full(folds.top)
        trace = json.loads((out / "trace.json").read_text())
        assert trace[0]["event"] == "start" and trace[-1]["height"] == 1
        assert main(["verify", str(out / "final.json")]) == 0

    def test_invalid_stairwell(self, corpus_path, tmp_path):
        doc = json.loads(open(corpus_path("snake_height3.json"), encoding="utf-8").read())
        doc["payload"]["betas"][0] = []
        path = write_json(tmp_path / "bad.json", doc)
        assert main(["unfold", path, "--out", str(tmp_path / "o")]) == 1


class TestRender:
    def test_stairwell_polylines(self, corpus_path, tmp_path):
        out = tmp_path / "s.svg"
        assert main(["render", corpus_path("snake_height5.json"), "--out", str(out)]) == 0
        svg = out.read_text()
        assert svg.startswith("<svg") or svg.startswith("<?xml")
        assert svg.count("<polyline") == 5
        assert svg.count('fill="#000"') == 4

    def test_broken_dots(self, corpus_path, tmp_path):
        out = tmp_path / "b.svg"
        assert main(["render", corpus_path("broken_pit2.json"), "--out", str(out)]) == 0
        svg = out.read_text()
        assert svg.count('fill="#aaa"') == 2
        assert 'fill="#000"' in svg

    def test_empty_stairwell(self, tmp_path):
        g = snake(1).graph
        path = tmp_path / "empty.json"
        docs.save(docs.Document("stairwell", Stairwell(g, [], [], [])), path)
        assert main(["render", str(path), "--out", str(tmp_path / "e.svg")]) == 1

    def test_deterministic(self, corpus_path, tmp_path):
        for name in corpus_names(corpus_path):
            a, b = tmp_path / "a.svg", tmp_path / "b.svg"
            main(["render", corpus_path(name), "--out", str(a)])
            main(["render", corpus_path(name), "--out", str(b)])
            assert a.read_bytes() == b.read_bytes()


class TestCrookedCommand:
    def test_delta_one(self, corpus_path, capsys):
        assert main(["crooked", corpus_path("interval_maps.json"), "--delta", "1"]) == 0
        assert capsys.readouterr().out.count("verified net") == 3

    def test_identity_fails_small_delta(self, corpus_path, capsys):
        assert main(["crooked", corpus_path("interval_maps.json"), "--delta", "1/8"]) == 1
        out = capsys.readouterr().out
        assert "map 1: delta 1/8 not verified" in out
        assert "failing quadruple" in out

    def test_chain(self, corpus_path, capsys):
        code = main(["crooked", corpus_path("interval_maps.json"), "--chain"])
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "n\tk\tverified"
        assert len(lines) == 1 + 6
        assert code == (0 if all(r.endswith("yes") for r in lines[1:]) else 1)

    def test_needs_mode(self, corpus_path):
        assert main(["crooked", corpus_path("interval_maps.json")]) == 2


def test_console_entry_point(corpus_path):
    proc = subprocess.run([sys.executable, "-m", "stairfold.cli", "verify",
                           corpus_path("snake_height3.json")], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.strip() == "ok: stairwell of height 3"
