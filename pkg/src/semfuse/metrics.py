"""Objective evaluation: mel-cepstral distortion and CER/WER.

Mel cepstra come from a plain STFT front-end (Hann window, triangular
mel filterbank, log, orthonormal DCT-II); distortion uses the standard
10/ln10 * sqrt(2 * sum d^2) dB form over optionally DTW-aligned frames.
Error rates are Levenshtein alignments with unit costs over characters
or whitespace words.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass, field

import numpy as np
from scipy.fft import dct

from .audio import read_wav

LOG_FLOOR = 1e-10
MCD_CONST = 10.0 / np.log(10.0)


@dataclass
class AnalysisConfig:
    sample_rate: int = 22050
    window: int = 1024
    shift: int = 256
    n_mels: int = 80
    order: int = 12  # keep coefficients c_0 .. c_order
    fmin: float = 0.0
    fmax: float | None = None  # None -> Nyquist


@dataclass
class MelCepstra:
    """frames x (K+1) mel-cepstral coefficients plus frame metadata."""

    coeffs: np.ndarray
    sample_rate: int
    frame_shift: int

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=np.float64)
        if self.coeffs.ndim != 2 or self.coeffs.shape[0] < 1:
            raise ValueError("coefficients must be a non-empty frames x (K+1) matrix")
        if not np.isfinite(self.coeffs).all():
            raise ValueError("coefficients contain non-finite values")

    @property
    def order(self) -> int:
        return self.coeffs.shape[1] - 1

    @property
    def n_frames(self) -> int:
        return self.coeffs.shape[0]


@dataclass
class EditStats:
    substitutions: int
    deletions: int
    insertions: int
    ref_len: int

    @property
    def errors(self) -> int:
        return self.substitutions + self.deletions + self.insertions

    @property
    def rate(self) -> float:
        if self.ref_len <= 0:
            raise ValueError("error rate is undefined for an empty reference")
        return self.errors / self.ref_len


def hz_to_mel(f):
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


def mel_filterbank(n_mels: int, n_fft: int, sample_rate: int, fmin: float, fmax: float) -> np.ndarray:
    """Triangular mel filterbank over rfft bins, n_mels x (n_fft//2 + 1)."""
    mel_points = np.linspace(hz_to_mel(fmin), hz_to_mel(fmax), n_mels + 2)
    hz_points = mel_to_hz(mel_points)
    bin_freqs = np.arange(n_fft // 2 + 1) * sample_rate / n_fft
    bank = np.zeros((n_mels, bin_freqs.shape[0]))
    for m in range(n_mels):
        left, center, right = hz_points[m], hz_points[m + 1], hz_points[m + 2]
        rising = (bin_freqs - left) / max(center - left, 1e-12)
        falling = (right - bin_freqs) / max(right - center, 1e-12)
        bank[m] = np.maximum(0.0, np.minimum(rising, falling))
    return bank


def mel_cepstra_from_audio(samples, cfg: AnalysisConfig = AnalysisConfig()) -> MelCepstra:
    """Mel-cepstral coefficients of a mono sample stream.

    Per frame: Hann-windowed FFT magnitude, mel filterbank energies,
    natural log with a small floor, orthonormal DCT-II, first order+1
    coefficients.
    """
    samples = np.asarray(samples, dtype=np.float64)
    if samples.ndim != 1:
        raise ValueError("samples must be a 1-D mono stream")
    if not np.isfinite(samples).all():
        raise ValueError("samples contain non-finite values")
    if cfg.sample_rate <= 0:
        raise ValueError("sample rate must be positive")
    if samples.shape[0] < cfg.window:
        raise ValueError(
            f"audio too short: {samples.shape[0]} samples < one window of {cfg.window}"
        )

    n_frames = (samples.shape[0] - cfg.window) // cfg.shift + 1
    window = np.hanning(cfg.window)
    fmax = cfg.fmax if cfg.fmax is not None else cfg.sample_rate / 2.0
    bank = mel_filterbank(cfg.n_mels, cfg.window, cfg.sample_rate, cfg.fmin, fmax)

    frames = np.lib.stride_tricks.sliding_window_view(samples, cfg.window)[:: cfg.shift]
    frames = frames[:n_frames] * window
    magnitude = np.abs(np.fft.rfft(frames, axis=1))
    energies = magnitude @ bank.T
    log_energies = np.log(np.maximum(energies, LOG_FLOOR))
    cepstra = dct(log_energies, type=2, norm="ortho", axis=1)[:, : cfg.order + 1]
    return MelCepstra(cepstra, cfg.sample_rate, cfg.shift)


def mel_cepstra_from_wav(path, cfg: AnalysisConfig | None = None) -> MelCepstra:
    samples, rate = read_wav(path)
    if cfg is None:
        cfg = AnalysisConfig(sample_rate=rate)
    elif cfg.sample_rate != rate:
        cfg = AnalysisConfig(rate, cfg.window, cfg.shift, cfg.n_mels, cfg.order, cfg.fmin, cfg.fmax)
    return mel_cepstra_from_audio(samples, cfg)


def _frame_distances(a: MelCepstra, b: MelCepstra) -> np.ndarray:
    # pairwise Euclidean over c_1..c_K (c_0 carries energy, not timbre)
    ca, cb = a.coeffs[:, 1:], b.coeffs[:, 1:]
    diff = ca[:, np.newaxis, :] - cb[np.newaxis, :, :]
    return np.sqrt((diff * diff).sum(axis=2))


def dtw_align(a: MelCepstra, b: MelCepstra) -> list[tuple[int, int]]:
    """Monotonic, contiguous alignment path minimizing summed frame distance.

    Steps are (1,0), (0,1), (1,1); the path runs from (0,0) to
    (F_a-1, F_b-1). Ties prefer the diagonal, then advancing ``a``.
    """
    if a.order != b.order:
        raise ValueError(f"cepstral order mismatch: {a.order} vs {b.order}")
    dist = _frame_distances(a, b)
    fa, fb = dist.shape
    cost = np.full((fa + 1, fb + 1), np.inf)
    cost[0, 0] = 0.0
    for i in range(1, fa + 1):
        for j in range(1, fb + 1):
            cost[i, j] = dist[i - 1, j - 1] + min(
                cost[i - 1, j - 1], cost[i - 1, j], cost[i, j - 1]
            )

    path = [(fa - 1, fb - 1)]
    i, j = fa, fb
    while (i, j) != (1, 1):
        moves = (
            (cost[i - 1, j - 1], (i - 1, j - 1)),
            (cost[i - 1, j], (i - 1, j)),
            (cost[i, j - 1], (i, j - 1)),
        )
        best = min(m[0] for m in moves)
        for value, (ni, nj) in moves:
            if value == best:
                i, j = ni, nj
                break
        path.append((i - 1, j - 1))
    path.reverse()
    return path


def dtw_path_cost(a: MelCepstra, b: MelCepstra, path) -> float:
    dist = _frame_distances(a, b)
    return float(sum(dist[i, j] for i, j in path))


def mcd(a: MelCepstra, b: MelCepstra, use_dtw: bool = True, skip_c0: bool = True) -> float:
    """Mel-cepstral distortion in dB, averaged over aligned frame pairs.

    Per pair: 10/ln10 * sqrt(2 * sum_k (c_k - c'_k)^2) with the sum
    starting at k=1 when ``skip_c0`` (default) else k=0.
    """
    if a.order != b.order:
        raise ValueError(f"cepstral order mismatch: {a.order} vs {b.order}")
    if use_dtw:
        pairs = dtw_align(a, b)
    else:
        if a.n_frames != b.n_frames:
            raise ValueError(
                f"frame counts differ ({a.n_frames} vs {b.n_frames}); enable DTW alignment"
            )
        pairs = [(i, i) for i in range(a.n_frames)]
    k0 = 1 if skip_c0 else 0
    ca, cb = a.coeffs[:, k0:], b.coeffs[:, k0:]
    total = 0.0
    for i, j in pairs:
        diff = ca[i] - cb[j]
        total += MCD_CONST * np.sqrt(2.0 * float(diff @ diff))
    return total / len(pairs)


# --- error rates ----------------------------------------------------------


def edit_stats(ref_tokens, hyp_tokens) -> EditStats:
    """Minimal-cost Levenshtein alignment with unit costs.

    Ties are broken preferring substitution, then deletion, then
    insertion; S+D+I always equals the minimal edit distance.
    """
    ref = list(ref_tokens)
    hyp = list(hyp_tokens)
    n, m = len(ref), len(hyp)
    # dist[i][j]: distance between ref[:i] and hyp[:j]
    dist = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(1, n + 1):
        dist[i][0] = i
    for j in range(1, m + 1):
        dist[0][j] = j
    for i in range(1, n + 1):
        row = dist[i]
        prev = dist[i - 1]
        ref_tok = ref[i - 1]
        for j in range(1, m + 1):
            sub = prev[j - 1] + (ref_tok != hyp[j - 1])
            dele = prev[j] + 1
            ins = row[j - 1] + 1
            row[j] = sub if sub <= dele and sub <= ins else (dele if dele <= ins else ins)

    subs = dels = inss = 0
    i, j = n, m
    while i > 0 or j > 0:
        here = dist[i][j]
        if i > 0 and j > 0 and dist[i - 1][j - 1] + (ref[i - 1] != hyp[j - 1]) == here:
            if ref[i - 1] != hyp[j - 1]:
                subs += 1
            i, j = i - 1, j - 1
        elif i > 0 and dist[i - 1][j] + 1 == here:
            dels += 1
            i -= 1
        else:
            inss += 1
            j -= 1
    return EditStats(subs, dels, inss, n)


@dataclass
class NormalizationConfig:
    lowercase: bool = True
    strip_punctuation: bool = True
    collapse_whitespace: bool = True


def normalize_text(text: str, cfg: NormalizationConfig = NormalizationConfig()) -> str:
    if cfg.lowercase:
        text = text.lower()
    if cfg.strip_punctuation:
        text = "".join(c for c in text if not unicodedata.category(c).startswith("P"))
    if cfg.collapse_whitespace:
        text = " ".join(text.split())
    return text


def cer(ref: str, hyp: str, cfg: NormalizationConfig = NormalizationConfig()) -> float:
    """Character error rate over whitespace-free normalized characters."""
    ref_chars = list(normalize_text(ref, cfg).replace(" ", ""))
    hyp_chars = list(normalize_text(hyp, cfg).replace(" ", ""))
    if not ref_chars:
        raise ValueError("reference is empty after normalization")
    return edit_stats(ref_chars, hyp_chars).rate


def wer(ref: str, hyp: str, cfg: NormalizationConfig = NormalizationConfig()) -> float:
    """Word error rate over whitespace-separated normalized tokens."""
    ref_words = normalize_text(ref, cfg).split()
    hyp_words = normalize_text(hyp, cfg).split()
    if not ref_words:
        raise ValueError("reference is empty after normalization")
    return edit_stats(ref_words, hyp_words).rate
