"""Classifier model: vocabulary, network, training, prediction and checkpoints."""

from src.model.config import ModelConfig, TrainConfig
from src.model.network import ClassifierModel, EncoderOutput, forward
from src.model.persistence import load_model, save_model
from src.model.training import EpochRecord, History, predict, train
from src.model.vocab import CLS_ID, PAD_ID, UNK_ID, Vocab, build_vocab, encode_text, tokenize

__all__ = [
    "CLS_ID",
    "ClassifierModel",
    "EncoderOutput",
    "EpochRecord",
    "History",
    "ModelConfig",
    "PAD_ID",
    "TrainConfig",
    "UNK_ID",
    "Vocab",
    "build_vocab",
    "encode_text",
    "forward",
    "load_model",
    "predict",
    "save_model",
    "tokenize",
    "train",
]
