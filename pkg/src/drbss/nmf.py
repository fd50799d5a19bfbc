"""Low-rank nonnegative variance model for the separated sources.

Each source's time-frequency variance is r[n] = bases[n].T @
activations[n].T, updated with multiplicative rules that never increase
the Itakura-Saito fit between the output power and the model.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import VARIANCE_FLOOR

# Lower bound applied to the nonnegative factors themselves, so a
# factor driven to zero cannot wedge later multiplicative updates.
FACTOR_FLOOR = 1e-12


@dataclass
class NmfVarianceModel:
    """Per-source factors: bases (N, K, F), activations (N, T, K)."""

    bases: np.ndarray
    activations: np.ndarray
    floor: float = VARIANCE_FLOOR

    @property
    def n_sources(self) -> int:
        return self.bases.shape[0]

    @property
    def n_bases(self) -> int:
        return self.bases.shape[1]


def init_model(
    n_sources: int, n_bases: int, n_bins: int, n_frames: int, seed: int
) -> NmfVarianceModel:
    """Unit bases, activations drawn uniformly from [0.1, 1)."""
    if min(n_sources, n_bases, n_bins, n_frames) < 1:
        raise ValueError("model dimensions must be positive")
    rng = np.random.default_rng(seed)
    bases = np.ones((n_sources, n_bases, n_bins))
    activations = rng.uniform(0.1, 1.0, size=(n_sources, n_frames, n_bases))
    return NmfVarianceModel(bases, activations)


def variance(model: NmfVarianceModel) -> np.ndarray:
    """Modelled variances, shape (N, F, T), floored away from zero."""
    r = np.einsum("nkf,ntk->nft", model.bases, model.activations)
    return np.maximum(r, model.floor)


def nmf_update(model: NmfVarianceModel, power: np.ndarray) -> np.ndarray:
    """One multiplicative sweep (bases, then activations) against ``power``.

    ``power`` is the output power |y|^2 with shape (N, F, T). The
    variances are refreshed between the two half-updates; the refreshed
    (N, F, T) variance tensor is returned.
    """
    if power.shape != (model.n_sources, model.bases.shape[2], model.activations.shape[1]):
        raise ValueError("power tensor shape does not match the model")
    if np.any(power < 0):
        raise ValueError("power tensor must be nonnegative")

    r = variance(model)
    ratio = power / (r * r)
    inv = 1.0 / r
    num = np.einsum("ntk,nft->nkf", model.activations, ratio)
    den = np.einsum("ntk,nft->nkf", model.activations, inv)
    model.bases *= np.sqrt(num / np.maximum(den, FACTOR_FLOOR))
    np.maximum(model.bases, FACTOR_FLOOR, out=model.bases)

    r = variance(model)
    ratio = power / (r * r)
    inv = 1.0 / r
    num = np.einsum("nkf,nft->ntk", model.bases, ratio)
    den = np.einsum("nkf,nft->ntk", model.bases, inv)
    model.activations *= np.sqrt(num / np.maximum(den, FACTOR_FLOOR))
    np.maximum(model.activations, FACTOR_FLOOR, out=model.activations)

    return variance(model)


def model_cost(power: np.ndarray, variances: np.ndarray) -> float:
    """Sum of power/r + log r, the variance-model part of the objective."""
    return float(np.sum(power / variances + np.log(variances)))
