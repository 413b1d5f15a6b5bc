"""Description-to-program induction: attention encoder-decoder with MLE and
self-critical policy-gradient training, plus retrieval baselines and an
evaluation harness built on the program-scoring toolkit's CLI."""
from .data import DataError, Record, Vocabulary, build_vocabulary, by_split, load_manifest
from .model import (
    Attention,
    InstructionEmbedder,
    InstructionHead,
    ModelConfig,
    Seq2Prog,
    load_checkpoint,
    save_checkpoint,
)
from .scorer import ScorerClient, ServiceUnavailable, reward_from_response
from .train import predict, train_mle, train_pg

__version__ = "0.1.0"

__all__ = [
    "Attention",
    "DataError",
    "InstructionEmbedder",
    "InstructionHead",
    "ModelConfig",
    "Record",
    "ScorerClient",
    "Seq2Prog",
    "ServiceUnavailable",
    "Vocabulary",
    "build_vocabulary",
    "by_split",
    "load_checkpoint",
    "load_manifest",
    "predict",
    "reward_from_response",
    "save_checkpoint",
    "train_mle",
    "train_pg",
    "__version__",
]
