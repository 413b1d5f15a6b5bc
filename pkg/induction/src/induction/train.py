"""MLE pretraining and self-critical policy-gradient fine-tuning."""
from __future__ import annotations

import random
import time

import torch
import torch.nn.functional as F

from .data import DataError, Record, Vocabulary, build_vocabulary
from .model import ModelConfig, Seq2Prog
from .scorer import ScorerClient, reward_from_response
from .steps import instructions_to_program


def _examples(model: Seq2Prog, records: list[Record]):
    vocab = model.vocab
    out = []
    for r in records:
        out.append((vocab.encode_words(r.description), vocab.encode_program(r.program), r))
    return out


def train_mle(records: list[Record], cfg: ModelConfig,
              vocab: Vocabulary | None = None,
              log=lambda msg: None) -> tuple[Seq2Prog, list[float]]:
    """Teacher-forced cross-entropy training from scratch. Returns the model
    and the per-epoch mean loss (nats per step)."""
    if not records:
        raise DataError("empty training split")
    torch.manual_seed(cfg.seed)
    vocab = vocab or build_vocabulary(records, cfg.max_instructions)
    model = Seq2Prog(vocab, cfg)
    needed = max(len(r.program) for r in records) + 1
    if cfg.max_decode_len < needed:
        raise DataError(f"max_decode_len {cfg.max_decode_len} < longest program + 1 ({needed})")
    examples = _examples(model, records)
    opt = torch.optim.Adam(model.parameters(), lr=cfg.lr_mle)
    order = random.Random(cfg.seed)
    curve = []
    for epoch in range(cfg.epochs_mle):
        started = time.time()
        order.shuffle(examples)
        total_nats = total_steps = 0.0
        for token_ids, target, _ in examples:
            enc, state = model.encode(token_ids)
            logits = model.decode_teacher_forced(enc, state, target)
            loss = F.cross_entropy(logits, torch.tensor(target), reduction="sum")
            opt.zero_grad()
            loss.backward()
            opt.step()
            total_nats += float(loss.item())
            total_steps += len(target)
        curve.append(total_nats / total_steps)
        log(f"mle epoch {epoch + 1}/{cfg.epochs_mle}: "
            f"{curve[-1]:.4f} nats/step ({time.time() - started:.1f}s)")
    model.eval()
    return model, curve


def predict(model: Seq2Prog, record: Record) -> list[str]:
    """Greedy decode of one description into step strings."""
    with torch.no_grad():
        enc, state = model.encode(model.vocab.encode_words(record.description))
        idxs, _ = model.decode_search(enc, state, greedy=True)
    return instructions_to_program([model.vocab.instructions[i] for i in idxs])


def train_pg(model: Seq2Prog, records: list[Record], cfg: ModelConfig,
             scorer: ScorerClient, env: str = "demo_home",
             log=lambda msg: None) -> Seq2Prog:
    """Self-critical REINFORCE: advantage = r(sampled) - r(greedy decode).
    Rewards come from the scoring service; lambda_sim selects between the
    LCS-only and LCS+Sim objectives."""
    if not records:
        raise DataError("empty training split")
    torch.manual_seed(cfg.seed + 1)
    gen = torch.Generator().manual_seed(cfg.seed + 1)
    model.train()
    examples = _examples(model, records)
    opt = torch.optim.Adam(model.parameters(), lr=cfg.lr_pg)
    order = random.Random(cfg.seed + 1)
    for epoch in range(cfg.epochs_pg):
        started = time.time()
        order.shuffle(examples)
        mean_adv = 0.0
        for token_ids, _, record in examples:
            enc, state = model.encode(token_ids)
            with torch.no_grad():
                greedy_idx, _ = model.decode_search(enc, state, greedy=True)
            sampled_idx, logprob = model.decode_search(enc, state, greedy=False,
                                                       generator=gen)
            decoded = [
                instructions_to_program([model.vocab.instructions[i] for i in idxs])
                for idxs in (greedy_idx, sampled_idx)
            ]
            resp_g, resp_s = scorer.score_batch([
                {"candidate": lines, "reference": record.program,
                 "env": env, "prep": True, "seed": 0}
                for lines in decoded
            ])
            advantage = (reward_from_response(resp_s, cfg.lambda_sim)
                         - reward_from_response(resp_g, cfg.lambda_sim))
            mean_adv += advantage
            if advantage == 0.0:
                continue  # self-critical identity: no update
            loss = -advantage * logprob
            opt.zero_grad()
            loss.backward()
            opt.step()
        log(f"pg epoch {epoch + 1}/{cfg.epochs_pg}: mean advantage "
            f"{mean_adv / len(examples):+.4f} ({time.time() - started:.1f}s)")
    model.eval()
    return model
