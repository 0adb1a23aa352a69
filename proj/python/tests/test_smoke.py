import itertools
import os
from pathlib import Path

import pytest

import presheaf as ps

MODELS = Path(os.environ.get("PSH_MODELS_DIR", Path(__file__).resolve().parents[2] / "models"))


def model(name):
    return ps.load_model(str(MODELS / name))


def test_org_sections():
    p = ps.compile(model("org.psh"))
    got = {(s["size"], s["levels"]) for s in p.sections(["size", "levels"])}
    assert got == {("l", "m"), ("l", "f"), ("s", "f")}
    assert ps.validate_laws(p).passed


def test_wine_has_two_uniform_sections():
    sections = ps.global_sections(ps.compile(model("wine.psh")))
    assert len(sections) == 2
    assert all(len(set(s.values())) == 1 for s in sections)
    assert "A------------A" in ps.render_canvas(model("wine.psh"))


def test_compile_matches_brute_force():
    for seed in range(1, 30):
        m = ps.random_model(seed)
        p = ps.compile(m)
        for obj in p.objects:
            fibers = [m.fibers[f] for f in obj]
            brute = [dict(zip(obj, vals)) for vals in itertools.product(*fibers)]
            admitted = [b for b in brute if p.contains(b)]
            assert sorted(map(sorted, map(dict.items, admitted))) == sorted(
                map(sorted, map(dict.items, ps.oracle_sections(m, obj)))
            )


def test_camcorder_blocking():
    p = ps.compile(model("camcorder.psh"))
    a = {"film": "prof_and_amateur", "edit": "quick_and_easy_editing"}
    assert ps.extensions(p, a, ["edit", "film", "screen"]) == []
    assert ps.blocking_sets(p, a) == [["edit", "film", "screen"]]


def test_imovie_and_itunes():
    s = ps.load_session(str(MODELS / "hub.pshw"))
    assert s.artifacts == ["PC", "Camcorder", "ITunes", "IMovieHub", "ITunesHub", "DigitalHub"]
    assert s.checks == [("ITunes", True)]
    merged = ps.amalgamate(s.model("PC"), s.model("Camcorder"), "IMovieHub")
    imovie = {"film": "prof_and_amateur", "screen": "large", "computing": "large",
              "edit": "quick_and_easy_editing"}
    assert imovie in ps.emergent_sections(merged, s.model("PC"), s.model("Camcorder"))
    t = ps.transfer(s.identification("h"), merged.model, "T")
    itunes = {"music": "music_usage_everywhere", "storage": "large", "computing": "large",
              "share": "bought_and_shared_online"}
    assert itunes in ps.global_sections(ps.compile(t))
    assert ps.analogy_check(s.identification("h"), merged.model, s.model("ITunes")).passed


def test_laws_and_yoneda():
    assert ps.check_adjunction_triple(["a"], ["a", "b", "c"]).passed
    ok, nat, elements = ps.yoneda_count(3, 5, ["a", "b"])
    assert ok and nat == elements


def test_round_trip_and_errors():
    text = str(model("org.psh"))
    assert ps.canonicalize(text) == text
    assert ps.parse_model(text) == model("org.psh")
    with pytest.raises(ps.ParseError):
        ps.parse_model("model M\nfeature size: l | s\nallow (size): (xl)\n")
    with pytest.raises(ps.Error):
        ps.compile(model("org.psh")).sections(["nope"])


def test_cli_exit_codes():
    code, out, _ = ps.run_cli(["sections", str(MODELS / "org.psh"), "--count"])
    assert (code, out) == (0, "3\n")
    assert ps.run_cli(["check", str(MODELS / "camcorder_literal.pshw")])[0] == 1
    assert ps.run_cli(["bogus"])[0] == 2
