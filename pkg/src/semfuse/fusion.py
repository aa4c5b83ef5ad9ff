"""Project semantic embeddings and fuse them with acoustic embeddings.

Global tokens are broadcast-added; sequential tokens go through masked
scaled dot-product attention (one tensor serves as both key and value)
with optional seeded dropout. A hand-written backward pass for the
attention path exists purely so the forward math can be verified
against finite differences.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .strategies import GlobalToken, SemanticSequence

DEFAULT_MASK_FILL = -6e4


class MaskError(ValueError):
    """Mask lengths disagree with the sequences, or all keys are masked."""


@dataclass
class ProjectionMatrix:
    """Linear map from semantic width d_in to acoustic width d_out."""

    w: np.ndarray

    def __post_init__(self):
        self.w = np.asarray(self.w, dtype=np.float64)
        if self.w.ndim != 2:
            raise ValueError("projection matrix must be 2-D (d_out x d_in)")
        if not np.isfinite(self.w).all():
            raise ValueError("projection matrix contains non-finite values")

    @property
    def d_out(self) -> int:
        return self.w.shape[0]

    @property
    def d_in(self) -> int:
        return self.w.shape[1]


@dataclass
class FusionConfig:
    gamma: float = 0.0  # 0 means "use sqrt(d)" at call time
    mask_fill: float = DEFAULT_MASK_FILL
    dropout_p: float = 0.0
    rng_seed: int = 0
    train_mode: bool = False

    def __post_init__(self):
        if self.gamma < 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        if not 0.0 <= self.dropout_p < 1.0:
            raise ValueError(f"dropout_p must be in [0, 1), got {self.dropout_p}")

    def effective_gamma(self, d: int) -> float:
        return self.gamma if self.gamma > 0 else float(np.sqrt(d))


@dataclass
class MaskPair:
    """Boolean validity masks; True marks a usable position."""

    tgt_mask: np.ndarray | None = None  # length t, per query position
    src_mask: np.ndarray | None = None  # length m, per key position


@dataclass
class FusedEmbedding:
    matrix: np.ndarray
    attention: np.ndarray | None = None  # t x m, pre-dropout weights


def init_projection(d_out: int, d_in: int, seed: int) -> ProjectionMatrix:
    """Seeded uniform init in [-1/sqrt(d_in), +1/sqrt(d_in)]."""
    bound = 1.0 / np.sqrt(d_in)
    rng = np.random.default_rng(seed)
    return ProjectionMatrix(rng.uniform(-bound, bound, size=(d_out, d_in)))


def project(w: ProjectionMatrix, x):
    """Apply the projection row-wise; returns the same kind it was given.

    GlobalToken -> GlobalToken of width d_out; SemanticSequence (or a
    bare vector / matrix) -> same shape family at width d_out.
    """
    if isinstance(x, GlobalToken):
        return GlobalToken(x.strategy, project(w, x.vector))
    if isinstance(x, SemanticSequence):
        return SemanticSequence(x.strategy, project(w, x.matrix))
    arr = np.asarray(x, dtype=np.float64)
    if arr.shape[-1] != w.d_in:
        raise ValueError(f"input width {arr.shape[-1]} != projection d_in {w.d_in}")
    return arr @ w.w.T


def fuse_global(e_a, e_s) -> FusedEmbedding:
    """Add one semantic vector to every time step of the acoustic sequence."""
    e_a = np.asarray(e_a, dtype=np.float64)
    if isinstance(e_s, GlobalToken):
        e_s = e_s.vector
    e_s = np.asarray(e_s, dtype=np.float64)
    if e_a.ndim != 2:
        raise ValueError(f"acoustic sequence must be t x d, got shape {e_a.shape}")
    if e_s.ndim != 1 or e_s.shape[0] != e_a.shape[1]:
        raise ValueError(
            f"semantic vector width {e_s.shape} does not match acoustic width {e_a.shape[1]}"
        )
    return FusedEmbedding(e_a + e_s)


def _check_masks(masks: MaskPair | None, t: int, m: int):
    tgt = src = None
    if masks is not None:
        if masks.tgt_mask is not None:
            tgt = np.asarray(masks.tgt_mask, dtype=bool)
            if tgt.shape != (t,):
                raise MaskError(f"tgt_mask length {tgt.shape} != query length {t}")
        if masks.src_mask is not None:
            src = np.asarray(masks.src_mask, dtype=bool)
            if src.shape != (m,):
                raise MaskError(f"src_mask length {src.shape} != key length {m}")
            if not src.any():
                raise MaskError("all keys are masked; every query row would be empty")
    return tgt, src


def _masked_scores(q, kv, cfg, tgt, src):
    gamma = cfg.effective_gamma(q.shape[1])
    scores = q @ kv.T / gamma
    valid = np.ones(scores.shape, dtype=bool)
    if src is not None:
        valid &= src[np.newaxis, :]
    if tgt is not None:
        valid &= tgt[:, np.newaxis]
    scores = np.where(valid, scores, cfg.mask_fill)
    return scores, valid, gamma


def _row_softmax(scores):
    shifted = scores - scores.max(axis=1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=1, keepdims=True)


def _dropout_mask(shape, cfg: FusionConfig):
    rng = np.random.default_rng(cfg.rng_seed)
    keep = rng.random(shape) >= cfg.dropout_p
    return keep.astype(np.float64) / (1.0 - cfg.dropout_p)


def fuse_sequential(q, kv, cfg: FusionConfig, masks: MaskPair | None = None) -> FusedEmbedding:
    """Masked scaled dot-product attention of acoustic queries over semantic keys.

    Scores are q . kv^T / gamma; masked positions are replaced with
    ``cfg.mask_fill`` before the row softmax, which pushes their weight
    below underflow. The same tensor serves as key and value. In train
    mode, attention weights are dropped out elementwise with probability
    ``dropout_p`` and survivors rescaled by 1/(1-p), seeded by
    ``rng_seed``. The returned ``attention`` field holds the pre-dropout
    weights.
    """
    if isinstance(kv, SemanticSequence):
        kv = kv.matrix
    q = np.asarray(q, dtype=np.float64)
    kv = np.asarray(kv, dtype=np.float64)
    if q.ndim != 2 or kv.ndim != 2:
        raise ValueError("q and kv must both be 2-D")
    if q.shape[1] != kv.shape[1]:
        raise ValueError(f"width mismatch: q is {q.shape}, kv is {kv.shape}")
    tgt, src = _check_masks(masks, q.shape[0], kv.shape[0])

    scores, _, _ = _masked_scores(q, kv, cfg, tgt, src)
    weights = _row_softmax(scores)
    applied = weights
    if cfg.train_mode and cfg.dropout_p > 0.0:
        applied = weights * _dropout_mask(weights.shape, cfg)
    return FusedEmbedding(applied @ kv, attention=weights)


def fuse_sequential_backward(q, kv, cfg: FusionConfig, masks: MaskPair | None, grad_out):
    """Analytic gradients of sum(grad_out * output) w.r.t. q and kv.

    kv contributes both as key and as value; dropout must be off
    (train_mode false). Verified against central finite differences in
    the self-check suite.
    """
    if isinstance(kv, SemanticSequence):
        kv = kv.matrix
    q = np.asarray(q, dtype=np.float64)
    kv = np.asarray(kv, dtype=np.float64)
    grad_out = np.asarray(grad_out, dtype=np.float64)
    if cfg.train_mode and cfg.dropout_p > 0.0:
        raise ValueError("backward pass requires dropout off (eval mode)")
    if grad_out.shape != (q.shape[0], kv.shape[1]):
        raise ValueError(f"grad_out shape {grad_out.shape} != output shape")
    tgt, src = _check_masks(masks, q.shape[0], kv.shape[0])

    scores, valid, gamma = _masked_scores(q, kv, cfg, tgt, src)
    weights = _row_softmax(scores)

    # value path: output = W . kv
    grad_weights = grad_out @ kv.T
    grad_kv = weights.T @ grad_out

    # softmax backward, row-wise: dS = W * (dW - sum(dW * W))
    inner = (grad_weights * weights).sum(axis=1, keepdims=True)
    grad_scores = weights * (grad_weights - inner)
    # replaced (masked) scores are constants; no gradient flows through them
    grad_scores = np.where(valid, grad_scores, 0.0)

    grad_q = grad_scores @ kv / gamma
    grad_kv = grad_kv + grad_scores.T @ q / gamma
    return grad_q, grad_kv
