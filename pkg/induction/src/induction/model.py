"""Encoder-decoder with attention for description-to-program induction.

The decoder scores a fixed inventory of instructions: each instruction's
vector is the mean of its action embedding and object-class embeddings,
L2-normalized, and dotted against a linear map of the concatenated decoder
state and attention context. Attention weights come from a softmax over a
linear score of the concatenated decoder state and each encoder state.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path

import torch
import torch.nn as nn
import torch.nn.functional as F

from .data import Vocabulary


@dataclass
class ModelConfig:
    hidden_dim: int = 100
    embed_dim: int = 64
    word_embed_dim: int = 64
    max_decode_len: int = 40
    lr_mle: float = 1e-3
    lr_pg: float = 1e-4
    lambda_sim: float = 0.1
    epochs_mle: int = 12
    epochs_pg: int = 1
    max_instructions: int = 4000
    seed: int = 0

    def __post_init__(self):
        for name in ("hidden_dim", "embed_dim", "word_embed_dim", "max_decode_len"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    @classmethod
    def from_file(cls, path) -> "ModelConfig":
        with open(path, encoding="utf-8") as f:
            return cls(**json.load(f))

    def to_doc(self) -> dict:
        return asdict(self)


class Attention(nn.Module):
    """x_att = sum_j alpha_j * h_enc_j with alpha = softmax_j of
    v . W_att[h ; h_enc_j]."""

    def __init__(self, hidden_dim: int, att_dim: int | None = None):
        super().__init__()
        att_dim = att_dim or hidden_dim
        self.w_att = nn.Linear(2 * hidden_dim, att_dim, bias=False)
        self.v = nn.Parameter(torch.empty(att_dim))
        nn.init.normal_(self.v, std=att_dim**-0.5)

    def forward(self, h: torch.Tensor, h_enc: torch.Tensor):
        """h: (H,), h_enc: (J, H) -> (x_att: (H,), alpha: (J,))."""
        joined = torch.cat([h.expand(h_enc.size(0), -1), h_enc], dim=1)
        scores = self.w_att(joined) @ self.v
        alpha = torch.softmax(scores, dim=0)
        return alpha @ h_enc, alpha


class InstructionHead(nn.Module):
    """Softmax over instruction vectors: p = softmax(V_hat @ W_v[h ; x_att])
    where V_hat holds the L2-normalized instruction embeddings."""

    def __init__(self, hidden_dim: int, embed_dim: int):
        super().__init__()
        self.w_v = nn.Linear(2 * hidden_dim, embed_dim, bias=False)

    def forward(self, h: torch.Tensor, x_att: torch.Tensor, vectors: torch.Tensor):
        """h, x_att: (H,); vectors: (N, d) unnormalized -> logits (N,)."""
        v_hat = F.normalize(vectors, dim=1, eps=1e-8)
        return v_hat @ self.w_v(torch.cat([h, x_att]))


class InstructionEmbedder(nn.Module):
    """Instruction vector = mean of the action embedding and the object-class
    embeddings (zero-object instructions use the action embedding alone)."""

    def __init__(self, vocab: Vocabulary, embed_dim: int):
        super().__init__()
        self.action_emb = nn.Embedding(len(vocab.actions), embed_dim)
        self.object_emb = nn.Embedding(len(vocab.objects), embed_dim)
        max_objs = max((len(c) for _, c in vocab.instructions), default=0)
        act_idx = []
        obj_idx = []
        obj_mask = []
        for action, classes in vocab.instructions:
            act_idx.append(vocab.action_index[action])
            padded = [vocab.object_index[c] for c in classes]
            obj_mask.append([1.0] * len(padded) + [0.0] * (max_objs - len(padded)))
            obj_idx.append(padded + [0] * (max_objs - len(padded)))
        self.register_buffer("_act_idx", torch.tensor(act_idx, dtype=torch.long))
        self.register_buffer("_obj_idx", torch.tensor(obj_idx, dtype=torch.long))
        self.register_buffer("_obj_mask", torch.tensor(obj_mask))

    def forward(self) -> torch.Tensor:
        """(N, d) unnormalized instruction vectors."""
        vecs = self.action_emb(self._act_idx)
        if self._obj_idx.numel():
            obj_vecs = self.object_emb(self._obj_idx) * self._obj_mask.unsqueeze(-1)
            vecs = (vecs + obj_vecs.sum(dim=1)) / (1.0 + self._obj_mask.sum(dim=1, keepdim=True))
        return vecs


class Seq2Prog(nn.Module):
    def __init__(self, vocab: Vocabulary, cfg: ModelConfig):
        super().__init__()
        self.vocab = vocab
        self.cfg = cfg
        H, d = cfg.hidden_dim, cfg.embed_dim
        self.word_emb = nn.Embedding(len(vocab.words), cfg.word_embed_dim)
        self.encoder = nn.LSTM(cfg.word_embed_dim, H)
        self.decoder = nn.LSTMCell(d + H, H)
        self.attention = Attention(H)
        self.head = InstructionHead(H, d)
        self.instr = InstructionEmbedder(vocab, d)
        self.eos_index = vocab.instruction_index[("<EOS>", ())]

    def encode(self, token_ids: list[int]) -> tuple[torch.Tensor, tuple]:
        """Per-token encoder states (J, H) plus the final (h, c) pair used to
        initialize the decoder."""
        x = self.word_emb(torch.tensor(token_ids, dtype=torch.long)).unsqueeze(1)
        out, (h_n, c_n) = self.encoder(x)
        return out.squeeze(1), (h_n.squeeze(0).squeeze(0), c_n.squeeze(0).squeeze(0))

    def _instruction_vectors(self) -> torch.Tensor:
        return self.instr()

    def decode_teacher_forced(self, enc, state, target: list[int]) -> torch.Tensor:
        """Logits (T, N) with the ground-truth instruction fed at each step."""
        vectors = self._instruction_vectors()
        v_hat = F.normalize(vectors, dim=1, eps=1e-8)
        h, c = state
        prev = v_hat[self.eos_index]  # BOS stand-in: the EOS/start embedding
        logits = []
        for t in target:
            x_att, _ = self.attention(h, enc)
            h, c = self.decoder(torch.cat([prev, x_att]).unsqueeze(0), (h.unsqueeze(0), c.unsqueeze(0)))
            h, c = h.squeeze(0), c.squeeze(0)
            step_logits = self.head(h, x_att, vectors)
            logits.append(step_logits)
            prev = v_hat[t]
        return torch.stack(logits)

    def decode_search(self, enc, state, greedy: bool, max_len: int | None = None,
                      generator: torch.Generator | None = None):
        """Decode to EOS or max_decode_len. Returns (instruction indices
        excluding EOS, summed log-probability of the emitted sequence
        including its terminator)."""
        max_len = max_len or self.cfg.max_decode_len
        vectors = self._instruction_vectors()
        v_hat = F.normalize(vectors, dim=1, eps=1e-8)
        h, c = state
        prev = v_hat[self.eos_index]
        out: list[int] = []
        logprob = torch.zeros(())
        for _ in range(max_len):
            x_att, _ = self.attention(h, enc)
            h, c = self.decoder(torch.cat([prev, x_att]).unsqueeze(0), (h.unsqueeze(0), c.unsqueeze(0)))
            h, c = h.squeeze(0), c.squeeze(0)
            logp = torch.log_softmax(self.head(h, x_att, vectors), dim=0)
            if greedy:
                idx = int(torch.argmax(logp).item())
            else:
                idx = int(torch.multinomial(torch.exp(logp), 1, generator=generator).item())
            logprob = logprob + logp[idx]
            if idx == self.eos_index:
                break
            out.append(idx)
            prev = v_hat[idx]
        return out, logprob


def save_checkpoint(model: Seq2Prog, out_dir) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    torch.save(model.state_dict(), out / "model.pt")
    with open(out / "vocab.json", "w", encoding="utf-8") as f:
        json.dump(model.vocab.to_doc(), f)
    with open(out / "config.json", "w", encoding="utf-8") as f:
        json.dump(model.cfg.to_doc(), f, indent=2)


def load_checkpoint(ckpt_dir) -> Seq2Prog:
    ckpt = Path(ckpt_dir)
    with open(ckpt / "vocab.json", encoding="utf-8") as f:
        vocab = Vocabulary.from_doc(json.load(f))
    cfg = ModelConfig.from_file(ckpt / "config.json")
    model = Seq2Prog(vocab, cfg)
    model.load_state_dict(torch.load(ckpt / "model.pt", weights_only=True))
    model.eval()
    return model
