import json

import pytest

from induction.data import (
    DataError,
    Record,
    SPECIALS,
    Vocabulary,
    build_vocabulary,
    load_manifest,
    tokenize,
)
from induction.steps import EOS_INSTRUCTION


def test_tokenize():
    assert tokenize("Grab the cup, then sit!") == ["grab", "the", "cup", "then", "sit"]
    assert tokenize("") == []


def test_load_manifest_errors(tmp_path):
    p = tmp_path / "bad.jsonl"
    p.write_text("not json\n")
    with pytest.raises(DataError):
        load_manifest(p)
    p.write_text(json.dumps({"id": "a", "description": "d"}) + "\n")
    with pytest.raises(DataError):
        load_manifest(p)
    p.write_text("")
    with pytest.raises(DataError):
        load_manifest(p)


def test_vocabulary_structure(vocab):
    assert list(vocab.words[:4]) == list(SPECIALS)
    assert vocab.actions[0] == "<EOS>"
    assert vocab.instructions[0] == EOS_INSTRUCTION
    # indices dense and consistent
    assert all(vocab.word_index[w] == i for i, w in enumerate(vocab.words))
    assert all(vocab.instruction_index[ins] == i for i, ins in enumerate(vocab.instructions))


def test_encode_words_unk_and_empty(vocab):
    ids = vocab.encode_words("zzzunseenzzz")
    assert ids == [vocab.word_index["<unk>"]]
    assert vocab.encode_words("") == [vocab.word_index["<bos>"]]


def test_encode_words_token_count(vocab, small_train):
    r = small_train[0]
    assert len(vocab.encode_words(r.description)) == len(tokenize(r.description))


def test_encode_program_eos_terminated(vocab, small_train):
    r = small_train[0]
    idxs = vocab.encode_program(r.program)
    assert len(idxs) == len(r.program) + 1
    assert idxs[-1] == vocab.instruction_index[EOS_INSTRUCTION]


def test_encode_program_rejects_unseen_instruction(vocab):
    with pytest.raises(DataError):
        vocab.encode_program(["[Put] <UNICORN> (1) <SPACESHIP> (1)"])


def test_vocab_round_trip(vocab):
    again = Vocabulary.from_doc(json.loads(json.dumps(vocab.to_doc())))
    assert again.words == vocab.words
    assert again.instructions == vocab.instructions


def test_schema_valid_padding_instructions(small_train):
    vocab = build_vocabulary(small_train)
    # every single-object action over every seen class is available
    for cls in vocab.objects:
        assert ("Run", (cls,)) in vocab.instruction_index


def test_instruction_cap(small_train):
    vocab = build_vocabulary(small_train, max_instructions=10)
    assert len(vocab.instructions) == 10
    assert vocab.instructions[0] == EOS_INSTRUCTION


def test_build_vocabulary_empty_raises():
    with pytest.raises(DataError):
        build_vocabulary([])
