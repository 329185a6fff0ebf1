"""Classify integers by their residue mod p.

Two routes: an exact linear regression on a periodic sine/cosine basis
(with a closed-form coefficient oracle), and a small from-scratch MLP over
digit-style feature encodings that shows how strongly the feature space,
not model capacity, drives accuracy.
"""

from modlearn.dataset import LabeledDataset, generate, residue_oracle, split
from modlearn.encoders import (
    EncoderSpec,
    FeatureMatrix,
    IntegerEncoder,
    decode,
    encode,
    encode_batch,
    encode_dataset,
)
from modlearn.fourier import (
    ClassifiedPrediction,
    FourierRegressionClassifier,
    closed_form_coefficients,
    evaluate_accuracy,
    sawtooth,
)
from modlearn.harness import (
    ExperimentConfig,
    ExperimentReport,
    emit_plot_data,
    reproduce_table,
    run,
)
from modlearn.mlp import MlpClassifier, gradient_check
from modlearn.ols import OlsFit

__version__ = "0.1.0"

__all__ = [
    "ClassifiedPrediction",
    "EncoderSpec",
    "ExperimentConfig",
    "ExperimentReport",
    "FeatureMatrix",
    "FourierRegressionClassifier",
    "IntegerEncoder",
    "LabeledDataset",
    "MlpClassifier",
    "OlsFit",
    "closed_form_coefficients",
    "decode",
    "emit_plot_data",
    "encode",
    "encode_batch",
    "encode_dataset",
    "evaluate_accuracy",
    "generate",
    "gradient_check",
    "reproduce_table",
    "residue_oracle",
    "run",
    "sawtooth",
    "split",
]
