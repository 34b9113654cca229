from .networks import MLP, Adam, BinaryClassifier, GaussianRegressor, Standardizer
from .sampler import (
    BaseSampler,
    GaussianSampler,
    InsufficientData,
    LearnedSampler,
    OracleSampler,
    SamplerConfig,
    TrivialSampler,
    fit_samplers,
    oracle_samplers,
    sample,
    sampler_from_dict,
)

__all__ = [
    "MLP", "Adam", "BinaryClassifier", "GaussianRegressor", "Standardizer",
    "BaseSampler", "GaussianSampler", "InsufficientData", "LearnedSampler",
    "OracleSampler", "SamplerConfig", "TrivialSampler", "fit_samplers",
    "oracle_samplers", "sample", "sampler_from_dict",
]
