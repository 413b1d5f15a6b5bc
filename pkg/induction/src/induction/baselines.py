"""Non-neural baselines: random sampling, random retrieval, and
nearest-description retrieval by term-frequency cosine."""
from __future__ import annotations

import random

from sklearn.feature_extraction.text import TfidfVectorizer
from sklearn.metrics.pairwise import cosine_similarity

from .data import Record, tokenize
from .steps import ACTION_ARITY, instructions_to_program, program_to_instructions


def random_sampling(train: list[Record], test: list[Record], seed: int) -> dict[str, list[str]]:
    """Per step, a uniformly random action with uniformly random object
    classes; program length drawn from the training length distribution."""
    rng = random.Random(seed)
    lengths = [len(r.program) for r in train]
    classes = sorted({
        c for r in train for _, objs in program_to_instructions(r.program) for c in objs
    })
    actions = sorted(ACTION_ARITY)
    preds = {}
    for r in test:
        n = rng.choice(lengths)
        instructions = []
        for _ in range(n):
            action = rng.choice(actions)
            objs = tuple(rng.choice(classes) for _ in range(ACTION_ARITY[action]))
            instructions.append((action, objs))
        preds[r.id] = instructions_to_program(instructions)
    return preds


def random_retrieval(train: list[Record], test: list[Record], seed: int) -> dict[str, list[str]]:
    rng = random.Random(seed)
    return {r.id: list(rng.choice(train).program) for r in test}


def nearest_retrieval(train: list[Record], test: list[Record]) -> dict[str, list[str]]:
    """Program of the training description closest in TF-IDF cosine space
    (a lightweight stand-in for learned sentence embeddings)."""
    vectorizer = TfidfVectorizer(tokenizer=tokenize, preprocessor=lambda s: s,
                                 token_pattern=None)
    train_mat = vectorizer.fit_transform([r.description for r in train])
    test_mat = vectorizer.transform([r.description for r in test])
    sims = cosine_similarity(test_mat, train_mat)
    return {
        r.id: list(train[int(sims[k].argmax())].program)
        for k, r in enumerate(test)
    }
