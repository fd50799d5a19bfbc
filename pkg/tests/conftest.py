"""Shared fixtures: seeded desk-scale mixtures and iteration histories."""

import numpy as np
import pytest

from drbss import (
    AlgorithmVariant,
    StftConfig,
    SyntheticRoomConfig,
    TapConfig,
    analyze,
    make_sources,
    mix,
    run,
)

FS = 8000
DESK_FRAME = 256
DESK_HOP = 128
DESK_SAMPLES = 15000
DESK_TAPS = TapConfig(5, 2)
DESK_SEEDS = tuple(range(10))

ITERATIVE_VARIANTS = (
    AlgorithmVariant.ILRMA_IP,
    AlgorithmVariant.ILRMA_ISS,
    AlgorithmVariant.ILRMA_T_IP,
    AlgorithmVariant.ILRMA_T_ISS_JOINT,
    AlgorithmVariant.ILRMA_T_ISS_SEQ,
)
TAPPED_VARIANTS = (
    AlgorithmVariant.ILRMA_T_IP,
    AlgorithmVariant.ILRMA_T_ISS_JOINT,
    AlgorithmVariant.ILRMA_T_ISS_SEQ,
)


def desk_mixture(seed, n_sources=2, n_samples=DESK_SAMPLES, rt60=0.3, snr=1e4, **kwargs):
    sources = make_sources(n_sources, n_samples, FS, seed=seed)
    room = SyntheticRoomConfig(
        n_sources, sample_rate=FS, rt60=rt60, snr=snr, seed=seed, **kwargs
    )
    return mix(sources, room)


def desk_spectrogram(seed, frame_len=DESK_FRAME, hop=DESK_HOP, **kwargs):
    result = desk_mixture(seed, **kwargs)
    return analyze(result.mixture, StftConfig(frame_len, hop, FS))


@pytest.fixture(scope="session")
def desk_histories():
    """Cost histories for the five iterative variants, 10 seeds x 100 iters.

    Computed once; the monotonicity and final-cost parity checks both
    read from here.
    """
    histories = {}
    for variant in ITERATIVE_VARIANTS:
        per_seed = []
        for seed in DESK_SEEDS:
            spec = desk_spectrogram(seed)
            result = run(
                variant, spec, iterations=100, taps=DESK_TAPS, n_bases=2, seed=seed
            )
            per_seed.append(np.asarray(result.trace.costs))
        histories[variant] = per_seed
    return histories
