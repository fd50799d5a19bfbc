"""Weighted prediction-error dereverberation.

Late reverberation is modelled as a linear prediction from delayed
stacked frames; the predictable part is subtracted and the per-frame
residual variance re-estimated, alternating until the implicit
objective sum(|z|^2 / (M r) + log r) stops improving.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import VARIANCE_FLOOR, SolveCounter, add_loading, checked_solve
from .stacking import StackedObservation, TapConfig, build_stacked
from .stft import Spectrogram


@dataclass
class WpeState:
    """Prediction coefficients (F, M, M*taps) and variance track (F, T)."""

    coeffs: np.ndarray
    variances: np.ndarray
    taps: TapConfig = field(default_factory=lambda: TapConfig(5, 2))


def wpe_variance_update(dereverbed: np.ndarray) -> np.ndarray:
    """Channel-averaged power of the residual, floored: shape (F, T)."""
    return np.maximum(np.mean(np.abs(dereverbed) ** 2, axis=1), VARIANCE_FLOOR)


def wpe_filter_update(
    state: WpeState,
    sx: StackedObservation,
    spec: Spectrogram,
    counter: SolveCounter | None = None,
) -> np.ndarray:
    """Re-solve the prediction coefficients for the current variances.

    One (loaded) normal-equation solve per frequency, shared by all
    channels. Returns the new (F, M, M*taps) coefficients and stores
    them on ``state``.
    """
    if sx.n_frames == 0:
        raise ValueError("cannot fit a prediction filter on zero frames")
    x = spec.data.transpose(0, 2, 1)  # (F, M, T)
    past = sx.past
    inv = 1.0 / state.variances  # (F, T)
    weighted = past * inv[:, None, :]
    normal = weighted @ past.conj().swapaxes(1, 2)  # (F, NL, NL)
    rhs = weighted @ x.conj().swapaxes(1, 2)  # (F, NL, M)
    sol = checked_solve(add_loading(normal), rhs, "prediction normal matrix", counter, sx.n_bins)
    coeffs = sol.conj().swapaxes(1, 2)  # (F, M, NL)
    state.coeffs = coeffs
    return coeffs


def wpe_dereverb(state: WpeState, spec: Spectrogram, sx: StackedObservation) -> Spectrogram:
    """Subtract the predicted late reverberation from the observation."""
    x = spec.data.transpose(0, 2, 1)
    z = x - state.coeffs @ sx.past
    return Spectrogram(z.transpose(0, 2, 1), spec.config, spec.n_samples)


def wpe_objective(dereverbed: np.ndarray, variances: np.ndarray) -> float:
    """sum over (f, t) of |z|^2 / (M r) + log r."""
    n_channels = dereverbed.shape[1]
    power = np.sum(np.abs(dereverbed) ** 2, axis=1) / n_channels
    return float(np.sum(power / variances + np.log(variances)))


def wpe_run(
    spec: Spectrogram,
    taps: TapConfig,
    iterations: int,
    counter: SolveCounter | None = None,
    trace: list[float] | None = None,
) -> Spectrogram:
    """Alternate variance, filter, and dereverberation steps.

    If ``trace`` is given, the objective is appended once before the
    first iteration and once after each iteration.
    """
    if iterations < 0:
        raise ValueError("iterations must be non-negative")
    if taps.taps == 0:
        raise ValueError("prediction needs at least one tap")
    sx = build_stacked(spec, taps)
    x = np.ascontiguousarray(spec.data.transpose(0, 2, 1))
    n_bins, n_channels, _ = x.shape
    state = WpeState(
        coeffs=np.zeros((n_bins, n_channels, sx.dim - n_channels), dtype=np.complex128),
        variances=wpe_variance_update(x),
        taps=taps,
    )
    z = x
    if trace is not None:
        trace.append(wpe_objective(z, state.variances))
    out = spec
    for _ in range(iterations):
        wpe_filter_update(state, sx, spec, counter)
        out = wpe_dereverb(state, spec, sx)
        z = out.data.transpose(0, 2, 1)
        state.variances = wpe_variance_update(z)
        if trace is not None:
            trace.append(wpe_objective(z, state.variances))
    return out
