import pytest

import sandhi


def test_transliteration_round_trip():
    slp = sandhi.devanagari_to_slp1("विद्यालयः")
    assert slp == "vidyAlayaH"
    assert sandhi.slp1_to_devanagari(slp) == "विद्यालयः"
    assert sandhi.is_slp1_word("punarapi")
    assert not sandhi.is_slp1_word("ka#")


def test_errors_carry_code():
    with pytest.raises(sandhi.SandhiError) as info:
        sandhi.apply_rules("deva", "kula")
    assert info.value.code == "NoRule"
    with pytest.raises(ValueError):
        sandhi.apply_rules("", "api")


def test_corpus_helpers():
    assert sandhi.filter_triple("vidyA", "AlayaH", "vidyAlayaH") == (True, "Ok")
    assert sandhi.filter_triple("abcd", "efgh", "abxgh") == (False, "LengthRelation")
    w = sandhi.annotate_window("punaH", "api", "punarapi")
    assert "punarapi".startswith("punarapi"[: w["start"]] + w["window"])
    assert 2 <= len(w["window"]) <= 5
    assert sandhi.best_window([0.0, 0.1, 0.9, 0.8, 0.7, 0.2, 0.0], 3) == (2, 3)


def test_rules_and_synthetic():
    assert sandhi.apply_rules("rAma", "iti") == "rAmeti"
    assert sandhi.apply_rule("punaH", "api") == ("punarapi", "visarga-r")
    triples = sandhi.generate_synthetic(200, seed=3)
    assert len(triples) == 200
    assert triples == sandhi.generate_synthetic(200, seed=3)
    for w1, w2, cw in triples:
        assert sandhi.apply_rules(w1, w2) == cw


def test_train_save_load(tmp_path):
    data = sandhi.generate_synthetic(120, seed=5)
    joiner = sandhi.train_joiner(data, hidden=8, epochs=2)
    assert len(joiner.history) == 2
    joiner.save(tmp_path / "j.ckpt")
    again = sandhi.Joiner.load(tmp_path / "j.ckpt")
    for w1, w2, _ in data[:20]:
        try:
            expected = joiner.join(w1, w2)
        except sandhi.SandhiError as e:
            with pytest.raises(sandhi.SandhiError):
                again.join(w1, w2)
            assert e.code == "MalformedDecode"
            continue
        assert again.join(w1, w2) == expected
    assert 0.0 <= joiner.accuracy(data) <= 1.0

    splitter = sandhi.train_splitter(data, hidden=8, epochs=1)
    splitter.save(tagger=tmp_path / "t.ckpt", wsplitter=tmp_path / "w.ckpt")
    loaded = sandhi.Splitter.load(tmp_path / "t.ckpt", tmp_path / "w.ckpt")
    assert set(loaded.metrics(data[:50])) >= {"location", "split"}
    with pytest.raises(sandhi.SandhiError) as info:
        loaded.split("a")
    assert info.value.code == "WordTooShort"
    with pytest.raises(sandhi.SandhiError) as info:
        sandhi.Joiner.load(tmp_path / "t.ckpt")
    assert info.value.code == "KindMismatch"
