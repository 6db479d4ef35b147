"""Eye-diagram traces for NRZ PAM2, PAM4 and TDHP waveforms."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .analytic import TdhpParams
from .errors import DomainError
from .simulation import Format, _rng, build_frame

__all__ = ["EyeTraceSet", "eye_traces", "EYE_STREAM"]

EYE_STREAM = 2


@dataclass(frozen=True, eq=False)
class EyeTraceSet:
    """Overlaid two-symbol windows of a sampled NRZ waveform.

    ``traces`` has shape ``(n_traces, window_symbols * samples_per_symbol)``.
    Each window starts half a symbol early so a full symbol sits in the
    middle; its decision instant is column ``decision_index``.  When
    ``scale`` differs from 1 the amplitudes were divided by it so that the
    outermost noise-free level sits at +-1.
    """

    format: Format
    params: TdhpParams
    snr: float | None
    samples_per_symbol: int
    window_symbols: int
    traces: np.ndarray
    levels: np.ndarray
    scale: float
    seed: int

    @property
    def decision_index(self) -> int:
        return self.samples_per_symbol

    def decision_samples(self) -> np.ndarray:
        return self.traces[:, self.decision_index]

    def spread(self) -> float:
        """RMS distance of decision-instant samples from their nearest level."""
        x = self.decision_samples()
        nearest = self.levels[np.abs(x[:, None] - self.levels[None, :]).argmin(axis=1)]
        return float(np.sqrt(np.mean((x - nearest) ** 2)))


def eye_traces(
    fmt: Format | str,
    params: TdhpParams | None = None,
    snr: float | None = None,
    samples_per_symbol: int = 16,
    n_traces: int = 1000,
    seed: int = 0,
    normalize: bool = True,
) -> EyeTraceSet:
    """Build eye-diagram traces.

    ``snr=None`` gives the noise-free eye.  Otherwise every sample gets its
    own unit-variance Gaussian draw with symbol amplitudes calibrated to
    ``snr`` exactly as in the Monte-Carlo simulator, so the SNR at each
    decision instant equals the requested one.  PAM2 and PAM4 ignore
    ``params``; TDHP defaults to ``p=0.5, q=0`` and interleaves formats.
    """
    fmt = Format(fmt.upper() if isinstance(fmt, str) else fmt)
    if samples_per_symbol < 2:
        raise DomainError("samples_per_symbol must be >= 2")
    if n_traces < 1:
        raise DomainError("n_traces must be >= 1")
    if snr is not None and snr < 0:
        raise DomainError("snr must be non-negative")
    if fmt is Format.PAM2:
        params = TdhpParams(0.0)
    elif fmt is Format.PAM4:
        params = TdhpParams(1.0)
    elif params is None:
        params = TdhpParams(0.5, 0.0)

    amp_snr = 1.0 if snr is None else snr
    frame = build_frame(n_traces + 2, params, amp_snr, seed, layout="interleaved")
    sps = samples_per_symbol
    wave = np.repeat(frame.amplitudes, sps)
    if snr is not None:
        wave = wave + _rng(seed, 0, EYE_STREAM).standard_normal(wave.size)

    levels = frame.levels()
    scale = float(np.max(np.abs(levels))) if normalize else 1.0
    if scale == 0.0:
        scale = 1.0

    window = 2 * sps
    view = np.lib.stride_tricks.sliding_window_view(wave, window)
    traces = view[sps // 2 : sps // 2 + n_traces * sps : sps] / scale
    return EyeTraceSet(
        format=fmt,
        params=params,
        snr=snr,
        samples_per_symbol=sps,
        window_symbols=2,
        traces=np.ascontiguousarray(traces),
        levels=levels / scale,
        scale=scale,
        seed=seed,
    )
