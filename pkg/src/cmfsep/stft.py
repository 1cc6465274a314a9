"""Short-time Fourier analysis and weighted overlap-add synthesis.

The transform uses a square-root Hann window with 50% overlap, so the
squared analysis/synthesis windows satisfy constant overlap-add and the
round trip is exact (to floating point) on the fully overlapped
interior. Spectrograms are one-sided: frame_len/2 + 1 frequency rows,
one column per frame. Only complete frames are analyzed; signals are
never zero-padded.
"""

from dataclasses import dataclass, field

import numpy as np

__all__ = ["StftConfig", "Signal", "dft", "stft", "istft", "sqrt_hann_window"]


@dataclass(frozen=True)
class StftConfig:
    frame_len: int = 512
    hop: int = 256
    window: str = "sqrt_hann"
    sample_rate: int = 16000

    def __post_init__(self):
        n = self.frame_len
        if n < 2 or (n & (n - 1)) != 0:
            raise ValueError(f"frame_len must be a power of two, got {n}")
        if not (0 < self.hop <= n):
            raise ValueError(f"hop must be in (0, frame_len], got {self.hop}")
        if self.window != "sqrt_hann":
            raise ValueError(f"unsupported window {self.window!r}")
        if self.hop != n // 2:
            raise ValueError(
                "sqrt_hann synthesis requires hop = frame_len/2 "
                f"(got hop={self.hop}, frame_len={n})"
            )

    @property
    def freq_bins(self) -> int:
        return self.frame_len // 2 + 1


@dataclass
class Signal:
    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64).ravel()
        if self.samples.size == 0:
            raise ValueError("signal must be non-empty")

    def __len__(self) -> int:
        return self.samples.size


def sqrt_hann_window(n: int) -> np.ndarray:
    """Square root of the periodic Hann window of length n."""
    hann = 0.5 - 0.5 * np.cos(2.0 * np.pi * np.arange(n) / n)
    return np.sqrt(hann)


def _bit_reverse_indices(n: int) -> np.ndarray:
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.int64)
    bits = n.bit_length() - 1
    for _ in range(bits):
        rev = (rev << 1) | (idx & 1)
        idx >>= 1
    return rev


def dft(frame, inverse: bool = False) -> np.ndarray:
    """Radix-2 Cooley-Tukey transform along the last axis.

    Forward applies no scaling; inverse scales by 1/N, so
    ``dft(dft(x), inverse=True) == x``.
    """
    x = np.asarray(frame, dtype=np.complex128)
    n = x.shape[-1]
    if n < 1 or (n & (n - 1)) != 0:
        raise ValueError(f"transform length must be a power of two, got {n}")
    if n == 1:
        return x.copy()

    out = x[..., _bit_reverse_indices(n)].copy()
    sign = 1.0 if inverse else -1.0
    half = 1
    while half < n:
        step = 2 * half
        tw = np.exp(sign * 2j * np.pi * np.arange(half) / step)
        blocks = out.reshape(*out.shape[:-1], n // step, step)
        even = blocks[..., :half].copy()
        odd = blocks[..., half:] * tw
        blocks[..., :half] = even + odd
        blocks[..., half:] = even - odd
        half = step
    if inverse:
        out /= n
    return out


def stft(signal: Signal, cfg: StftConfig) -> np.ndarray:
    """One-sided spectrogram: freq_bins x frame_count, complex128."""
    x = signal.samples
    n, hop = cfg.frame_len, cfg.hop
    if x.size < n:
        raise ValueError(
            f"signal of {x.size} samples is shorter than one frame ({n})"
        )
    n_frames = (x.size - n) // hop + 1
    win = sqrt_hann_window(n)
    offsets = hop * np.arange(n_frames)[:, None] + np.arange(n)[None, :]
    frames = x[offsets] * win
    spectra = dft(frames)[:, : cfg.freq_bins]
    return np.ascontiguousarray(spectra.T)


def _full_spectrum(one_sided: np.ndarray, n: int) -> np.ndarray:
    """Rebuild the Hermitian-symmetric length-n spectrum per frame."""
    tail = np.conj(one_sided[..., -2:0:-1])
    return np.concatenate([one_sided, tail], axis=-1)


def istft(spec: np.ndarray, cfg: StftConfig) -> Signal:
    """Windowed overlap-add synthesis inverting :func:`stft`.

    With the sqrt-Hann window at 50% overlap the squared windows sum to
    one, so interior samples are reconstructed exactly.
    """
    spec = np.asarray(spec, dtype=np.complex128)
    if spec.ndim != 2 or spec.shape[0] != cfg.freq_bins:
        raise ValueError(
            f"spectrogram has {spec.shape[0] if spec.ndim == 2 else '?'} rows, "
            f"expected {cfg.freq_bins} for frame_len {cfg.frame_len}"
        )
    n, hop = cfg.frame_len, cfg.hop
    n_frames = spec.shape[1]
    win = sqrt_hann_window(n)
    frames = dft(_full_spectrum(spec.T, n), inverse=True).real * win
    out = np.zeros((n_frames - 1) * hop + n)
    for t in range(n_frames):
        out[t * hop : t * hop + n] += frames[t]
    return Signal(out, cfg.sample_rate)
