import pytest

from timeline_generator.models import EventKind
from timeline_generator.vocab import UnknownTokenError, Vocabulary, build_vocabulary, reserved_tokens


def test_reserved_tokens_come_first(base_vocab):
    assert len(base_vocab) == len(EventKind) + 13 + 10
    assert base_vocab.itos[: len(EventKind)] == [k.name for k in EventKind]
    assert base_vocab.itos[-1] == "Q10"


def test_observed_tokens_sorted_after_reserved():
    vocab = build_vocabulary([["LAB//K", "ADMISSION"], ["ICD//I", "LAB//K"]])
    reserved = reserved_tokens()
    assert vocab.itos[: len(reserved)] == reserved
    assert vocab.itos[len(reserved):] == ["ICD//I", "LAB//K"]


def test_specials_and_intervals(base_vocab):
    assert base_vocab.decode(base_vocab.special("death")) == "DEATH"
    assert set(base_vocab.specials) == {"death", "discharge", "admission", "icu_admission", "icu_discharge"}
    assert base_vocab.decode(base_vocab.interval_id(12)) == "INT//6mt"
    minutes = base_vocab.interval_minutes
    assert len(minutes) == 13
    assert minutes[base_vocab.encode("INT//1d")] == pytest.approx(1440.0)


def test_unknown_tokens_raise(base_vocab):
    with pytest.raises(UnknownTokenError):
        base_vocab.encode("LAB//NOPE")
    with pytest.raises(UnknownTokenError):
        base_vocab.decode(len(base_vocab))


def test_missing_specials_rejected():
    with pytest.raises(ValueError):
        Vocabulary(itos=["ADMISSION", "LAB//K"])


def test_duplicates_rejected():
    with pytest.raises(ValueError):
        Vocabulary(itos=reserved_tokens() + ["ADMISSION"])


def test_save_and_load(tmp_path):
    vocab = build_vocabulary([["LAB//K", "DRG//DRG291"]])
    path = tmp_path / "vocab.txt"
    vocab.save(path)
    assert Vocabulary.load(path).itos == vocab.itos


def test_sparse_ids_rejected():
    text = "".join(f"{i}\t{t}\n" for i, t in enumerate(reserved_tokens()))
    with pytest.raises(ValueError):
        Vocabulary.from_text(text + "999\tLAB//K\n")
