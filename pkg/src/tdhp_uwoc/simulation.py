"""
Symbol-level Monte-Carlo simulation of a TDHP link.

Pipeline: random bits -> PAM2/PAM4 mapping -> unit-variance AWGN ->
threshold demapping -> error counting.

Signal amplitudes are scaled so that with unit noise variance the measured
BERs follow the closed-form expressions in :mod:`tdhp_uwoc.analytic`:
PAM2 levels are ``+-a2`` with ``a2 = sqrt(snr * (1 - q))`` and PAM4 levels are
``{-3d, -d, d, 3d}`` with ``d = sqrt(snr * (1 + q) / 7)``.

Randomness comes from ``numpy.random.SeedSequence(seed, spawn_key=(chunk, stream))``
so each chunk of a long run has its own reproducible bit and noise streams,
and the result of :func:`measure_ber` does not depend on the worker count.
"""
from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .analytic import TdhpParams, ber_tdhp
from .errors import DomainError

__all__ = [
    "Format",
    "Frame",
    "BerEstimate",
    "LowErrorCountWarning",
    "BITS_STREAM",
    "NOISE_STREAM",
    "DEFAULT_CHUNK",
    "pam2_amplitude",
    "pam4_spacing",
    "pam4_count",
    "build_frame",
    "add_awgn",
    "demap",
    "measure_ber",
    "ci95_halfwidth",
]

BITS_STREAM = 0
NOISE_STREAM = 1
DEFAULT_CHUNK = 1 << 20

# level index (0 = most negative) -> Gray dibit
GRAY_DIBITS = np.array([[0, 0], [0, 1], [1, 1], [1, 0]], dtype=np.uint8)


class Format(str, Enum):
    PAM2 = "PAM2"
    PAM4 = "PAM4"
    TDHP = "TDHP"


class LowErrorCountWarning(UserWarning):
    """Symbol budget too small for a meaningful BER estimate."""


def _rng(seed: int, chunk: int, stream: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(chunk, stream)))


def pam2_amplitude(snr: float, q: float) -> float:
    return math.sqrt(snr * (1.0 - q))


def pam4_spacing(snr: float, q: float) -> float:
    """Half the distance between adjacent PAM4 levels."""
    return math.sqrt(snr * (1.0 + q) / 7.0)


def pam4_count(n: int, p: float) -> int:
    # Python's round() is half-to-even
    return int(round(p * n))


def _pam4_mask(index: np.ndarray, n_total: int, n4: int, layout: str) -> np.ndarray:
    if layout == "contiguous":
        return index < n4
    if layout == "interleaved":
        # evenly spread: symbol k is PAM4 when floor((k+1)*n4/n) steps up
        return ((index + 1) * n4) // n_total - (index * n4) // n_total == 1
    raise DomainError(f"unknown layout {layout!r}")


@dataclass(frozen=True, eq=False)
class Frame:
    """One block of TDHP symbols together with the bits that produced them.

    ``is_pam4`` marks each symbol's format.  Bits are stored in transmission
    order: two per PAM4 symbol (Gray dibit), one per PAM2 symbol.
    """

    n_symbols: int
    params: TdhpParams
    snr: float
    seed: int
    is_pam4: np.ndarray
    amplitudes: np.ndarray
    source_bits: np.ndarray
    layout: str = "contiguous"
    chunk: int = 0

    @property
    def p(self) -> float:
        return self.params.p

    @property
    def q(self) -> float:
        return self.params.q

    @property
    def a2(self) -> float:
        return pam2_amplitude(self.snr, self.params.q)

    @property
    def d(self) -> float:
        return pam4_spacing(self.snr, self.params.q)

    @property
    def n_pam4(self) -> int:
        return int(self.is_pam4.sum())

    @property
    def n_pam2(self) -> int:
        return self.n_symbols - self.n_pam4

    @property
    def n_bits(self) -> int:
        return self.source_bits.size

    @property
    def symbols(self) -> list[tuple[Format, float]]:
        return [
            (Format.PAM4 if f else Format.PAM2, float(a))
            for f, a in zip(self.is_pam4, self.amplitudes)
        ]

    def levels(self) -> np.ndarray:
        """Distinct noise-free amplitudes this frame's formats can take."""
        out = []
        if self.n_pam2:
            out += [-self.a2, self.a2]
        if self.n_pam4:
            out += list(self.d * np.array([-3.0, -1.0, 1.0, 3.0]))
        return np.unique(np.array(out))


def _bit_offsets(is_pam4: np.ndarray) -> np.ndarray:
    widths = np.where(is_pam4, 2, 1)
    return np.cumsum(widths) - widths


def _map(bits: np.ndarray, is_pam4: np.ndarray, a2: float, d: float) -> np.ndarray:
    off = _bit_offsets(is_pam4)
    amps = np.empty(is_pam4.size)
    m2 = ~is_pam4
    amps[m2] = a2 * (2.0 * bits[off[m2]] - 1.0)
    b0 = bits[off[is_pam4]].astype(np.int64)
    b1 = bits[off[is_pam4] + 1].astype(np.int64)
    idx = 2 * b0 + (b0 ^ b1)
    amps[is_pam4] = d * (2.0 * idx - 3.0)
    return amps


def _frame_chunk(
    start: int,
    stop: int,
    n_total: int,
    params: TdhpParams,
    snr: float,
    seed: int,
    layout: str,
    chunk: int,
) -> Frame:
    n4_total = pam4_count(n_total, params.p)
    is_pam4 = _pam4_mask(np.arange(start, stop, dtype=np.int64), n_total, n4_total, layout)
    n_bits = int(stop - start + is_pam4.sum())
    bits = _rng(seed, chunk, BITS_STREAM).integers(0, 2, size=n_bits, dtype=np.uint8)
    amps = _map(bits, is_pam4, pam2_amplitude(snr, params.q), pam4_spacing(snr, params.q))
    return Frame(stop - start, params, snr, seed, is_pam4, amps, bits, layout, chunk)


def build_frame(
    n: int,
    params: TdhpParams,
    snr: float,
    seed: int,
    layout: str = "contiguous",
) -> Frame:
    """Draw ``n`` symbols: ``round(p*n)`` PAM4 and the rest PAM2.

    With ``layout="contiguous"`` the PAM4 block comes first; ``"interleaved"``
    spreads PAM4 symbols evenly through the frame.
    """
    if n < 1:
        raise DomainError("a frame needs at least one symbol")
    if snr < 0:
        raise DomainError("snr must be non-negative")
    return _frame_chunk(0, n, n, params, snr, seed, layout, 0)


def add_awgn(frame: Frame, seed: int | None = None, noise_variance: float = 1.0) -> np.ndarray:
    """Received samples: transmitted amplitudes plus N(0, noise_variance) draws."""
    if noise_variance < 0:
        raise DomainError("noise variance must be non-negative")
    if noise_variance == 0:
        return frame.amplitudes.copy()
    rng = _rng(frame.seed if seed is None else seed, frame.chunk, NOISE_STREAM)
    return frame.amplitudes + math.sqrt(noise_variance) * rng.standard_normal(frame.n_symbols)


def demap(received: np.ndarray, frame: Frame) -> np.ndarray:
    """Hard-decision demapping using the frame's format layout and amplitudes.

    PAM2 decides on sign; PAM4 slices at ``{-2d, 0, 2d}``.  A sample exactly
    on a threshold goes to the lower level.
    """
    received = np.asarray(received, dtype=float)
    if received.shape != (frame.n_symbols,):
        raise ValueError(
            f"expected {frame.n_symbols} received samples, got {received.shape}"
        )
    is_pam4 = frame.is_pam4
    off = _bit_offsets(is_pam4)
    bits = np.empty(frame.n_bits, dtype=np.uint8)
    bits[off[~is_pam4]] = received[~is_pam4] > 0.0
    r4 = received[is_pam4]
    d = frame.d
    idx = (r4 > -2.0 * d).astype(np.int64) + (r4 > 0.0) + (r4 > 2.0 * d)
    dibits = GRAY_DIBITS[idx]
    bits[off[is_pam4]] = dibits[:, 0]
    bits[off[is_pam4] + 1] = dibits[:, 1]
    return bits


@dataclass(frozen=True)
class BerEstimate:
    """Error counts from a Monte-Carlo run, split by format.

    ``ci95_halfwidth`` is the normal-approximation binomial half-width of the
    combined BER.  Per-format BERs are NaN when that format carried no bits.
    """

    bit_errors_pam2: int
    bit_errors_pam4: int
    bits_pam2: int
    bits_pam4: int
    n_symbols: int = 0
    seed: int = 0
    snr: float = float("nan")
    params: TdhpParams = field(default_factory=lambda: TdhpParams(0.0))

    @property
    def total_bits(self) -> int:
        return self.bits_pam2 + self.bits_pam4

    @property
    def total_errors(self) -> int:
        return self.bit_errors_pam2 + self.bit_errors_pam4

    @property
    def ber_pam2(self) -> float:
        return self.bit_errors_pam2 / self.bits_pam2 if self.bits_pam2 else float("nan")

    @property
    def ber_pam4(self) -> float:
        return self.bit_errors_pam4 / self.bits_pam4 if self.bits_pam4 else float("nan")

    @property
    def ber_tdhp(self) -> float:
        return self.total_errors / self.total_bits

    @property
    def ci95_halfwidth(self) -> float:
        return ci95_halfwidth(self.ber_tdhp, self.total_bits)

    @property
    def ber_mixture(self) -> float:
        """Symbol-share weighted BER, ``p*ber_pam4 + (1-p)*ber_pam2``.

        This is the estimator of the closed-form TDHP BER.  It differs from
        :attr:`ber_tdhp` (errors per bit) whenever both formats are present,
        because each PAM4 symbol carries two bits.
        """
        p = self.params.p
        out = 0.0
        if p > 0:
            out += p * self.ber_pam4
        if p < 1:
            out += (1.0 - p) * self.ber_pam2
        return out

    @property
    def ci95_mixture(self) -> float:
        p = self.params.p
        var = 0.0
        if p > 0:
            var += p * p * self.ber_pam4 * (1.0 - self.ber_pam4) / self.bits_pam4
        if p < 1:
            var += (1.0 - p) ** 2 * self.ber_pam2 * (1.0 - self.ber_pam2) / self.bits_pam2
        return 1.96 * math.sqrt(var)

    def __add__(self, other: "BerEstimate") -> "BerEstimate":
        return BerEstimate(
            self.bit_errors_pam2 + other.bit_errors_pam2,
            self.bit_errors_pam4 + other.bit_errors_pam4,
            self.bits_pam2 + other.bits_pam2,
            self.bits_pam4 + other.bits_pam4,
            self.n_symbols + other.n_symbols,
            self.seed,
            self.snr,
            self.params,
        )

    def to_record(self) -> dict:
        return {
            "p": self.params.p,
            "q": self.params.q,
            "snr_db": 10.0 * math.log10(self.snr) if self.snr > 0 else float("-inf"),
            "n_symbols": self.n_symbols,
            "seed": self.seed,
            "bits_pam2": self.bits_pam2,
            "bits_pam4": self.bits_pam4,
            "bit_errors_pam2": self.bit_errors_pam2,
            "bit_errors_pam4": self.bit_errors_pam4,
            "ber_pam2": self.ber_pam2,
            "ber_pam4": self.ber_pam4,
            "ber_tdhp": self.ber_tdhp,
            "ci95_halfwidth": self.ci95_halfwidth,
            "ber_mixture": self.ber_mixture,
            "ci95_mixture": self.ci95_mixture,
        }


def ci95_halfwidth(ber: float, n_bits: int) -> float:
    return 1.96 * math.sqrt(ber * (1.0 - ber) / n_bits)


def _count_chunk(args) -> tuple[int, int, int, int]:
    start, stop, n_total, params, snr, seed, layout, chunk, noise_variance = args
    frame = _frame_chunk(start, stop, n_total, params, snr, seed, layout, chunk)
    rx = demap(add_awgn(frame, noise_variance=noise_variance), frame)
    wrong = rx != frame.source_bits
    pam4_bit = np.repeat(frame.is_pam4, np.where(frame.is_pam4, 2, 1))
    e4 = int(np.count_nonzero(wrong & pam4_bit))
    e2 = int(np.count_nonzero(wrong)) - e4
    b4 = 2 * frame.n_pam4
    return e2, e4, frame.n_bits - b4, b4


def measure_ber(
    params: TdhpParams,
    snr: float,
    n_symbols: int,
    seed: int,
    *,
    noise_variance: float = 1.0,
    layout: str = "contiguous",
    chunk_size: int = DEFAULT_CHUNK,
    threads: int = 1,
) -> BerEstimate:
    """Run the full simulation pipeline and count bit errors.

    The symbol budget is cut into chunks of ``chunk_size``; chunk ``i`` draws
    from streams ``(i, 0)`` (bits) and ``(i, 1)`` (noise) of ``seed``.  With
    ``threads > 1`` chunks run concurrently; the sum is the same either way.
    """
    if n_symbols < 1:
        raise DomainError("n_symbols must be >= 1")
    if chunk_size < 1:
        raise DomainError("chunk_size must be >= 1")
    expected_bits = n_symbols + pam4_count(n_symbols, params.p)
    if noise_variance > 0:
        expected_errors = float(ber_tdhp(snr / noise_variance, params)) * expected_bits
        if expected_errors < 10:
            warnings.warn(
                f"only ~{expected_errors:.1f} bit errors expected; BER estimate will be noisy",
                LowErrorCountWarning,
                stacklevel=2,
            )

    jobs = [
        (start, min(start + chunk_size, n_symbols), n_symbols, params, snr, seed, layout, i, noise_variance)
        for i, start in enumerate(range(0, n_symbols, chunk_size))
    ]
    if threads > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            counts = list(pool.map(_count_chunk, jobs))
    else:
        counts = [_count_chunk(job) for job in jobs]

    e2, e4, b2, b4 = (sum(col) for col in zip(*counts))
    return BerEstimate(e2, e4, b2, b4, n_symbols, seed, snr, params)
