"""Self-verification suites behind the ``selfcheck`` subcommand.

Each suite checks an implementation against an independent oracle:
finite differences for the attention backward pass, a brute-force
covariance eigendecomposition for the principal axis, an exhaustive
edit-distance enumeration, and bitwise file round-trips. Suites report
their max observed error and the offending seed on failure.
"""

from __future__ import annotations

import itertools
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import fusion, metrics, strategies, tensor_io


@dataclass
class SuiteResult:
    name: str
    passed: bool
    max_error: float
    cases: int
    tolerance: float
    failing_seed: int | None = None

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        text = (
            f"{status} {self.name}: max error {self.max_error:.3e} "
            f"(tolerance {self.tolerance:.1e}, {self.cases} cases)"
        )
        if not self.passed and self.failing_seed is not None:
            text += f" [seed {self.failing_seed}]"
        return text


def finite_difference_grads(q, kv, cfg, masks, grad_out, eps=1e-6):
    """Central-difference gradients of sum(grad_out * output)."""

    def loss(q_arr, kv_arr):
        out = fusion.fuse_sequential(q_arr, kv_arr, cfg, masks).matrix
        return float((grad_out * out).sum())

    def numeric(base, other, q_side):
        grad = np.zeros_like(base)
        flat = grad.reshape(-1)
        base_flat = base.reshape(-1)
        for idx in range(base_flat.size):
            original = base_flat[idx]
            base_flat[idx] = original + eps
            f_plus = loss(base, other) if q_side else loss(other, base)
            base_flat[idx] = original - eps
            f_minus = loss(base, other) if q_side else loss(other, base)
            base_flat[idx] = original
            flat[idx] = (f_plus - f_minus) / (2 * eps)
        return grad

    return numeric(q.copy(), kv, True), numeric(kv.copy(), q, False)


def _scaled_rel_error(analytic, numeric):
    denom = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), 1.0)
    return float((np.abs(analytic - numeric) / denom).max())


def gradient_suite(n_instances: int = 100, tolerance: float = 1e-5, seed: int = 1234) -> SuiteResult:
    """Analytic attention backward vs. central finite differences."""
    worst = 0.0
    failing = None
    for case in range(n_instances):
        case_seed = seed + case
        rng = np.random.default_rng(case_seed)
        t = int(rng.integers(1, 9))
        m = int(rng.integers(1, 9))
        d = int(rng.integers(1, 9))
        q = rng.standard_normal((t, d))
        kv = rng.standard_normal((m, d))
        grad_out = rng.standard_normal((t, d))
        cfg = fusion.FusionConfig(gamma=float(np.sqrt(d)))
        masks = None
        if m >= 2 and rng.random() < 0.3:
            src = rng.random(m) < 0.8
            src[int(rng.integers(0, m))] = True
            masks = fusion.MaskPair(src_mask=src)
        grad_q, grad_kv = fusion.fuse_sequential_backward(q, kv, cfg, masks, grad_out)
        num_q, num_kv = finite_difference_grads(q, kv, cfg, masks, grad_out)
        err = max(_scaled_rel_error(grad_q, num_q), _scaled_rel_error(grad_kv, num_kv))
        if err > worst:
            worst = err
            if err > tolerance:
                failing = case_seed
    return SuiteResult("gradient_fd", worst < tolerance, worst, n_instances, tolerance, failing)


def brute_force_axis(h) -> np.ndarray:
    """Top eigenvector of the explicit token covariance (oracle route)."""
    h = np.asarray(h, dtype=np.float64)
    centered = h - h.mean(axis=0)
    cov = centered.T @ centered / (h.shape[0] - 1)
    eigvals, eigvecs = np.linalg.eigh(cov)
    return eigvecs[:, -1]


def pca_suite(n_instances: int = 50, tolerance: float = 1e-8, seed: int = 555) -> SuiteResult:
    """Principal axis vs. dense eigendecomposition; rescale contract."""
    worst = 0.0
    failing = None
    produced = 0
    case_seed = seed
    while produced < n_instances:
        case_seed += 1
        rng = np.random.default_rng(case_seed)
        n = int(rng.integers(2, 11))
        d = int(rng.integers(2, 11))
        h = rng.standard_normal((n, d))
        centered = h - h.mean(axis=0)
        cov = centered.T @ centered / (n - 1)
        eigvals = np.linalg.eigvalsh(cov)
        if eigvals[-1] - (eigvals[-2] if d > 1 else 0.0) < 1e-6:
            continue  # needs a distinct top eigenvalue
        produced += 1
        axis = strategies.principal_axis(h)
        oracle = brute_force_axis(h)
        cos = abs(float(axis @ oracle))
        axis_err = 1.0 - cos

        token = strategies.extract_pca(h)
        lo_err = abs(token.vector.min() - h.min()) / max(1.0, abs(h.min()))
        hi_err = abs(token.vector.max() - h.max()) / max(1.0, abs(h.max()))
        err = max(axis_err, lo_err, hi_err)
        if err > worst:
            worst = err
            if err > tolerance:
                failing = case_seed
    return SuiteResult("pca_oracle", worst < tolerance, worst, n_instances, tolerance, failing)


def enumerate_token_lists(max_len: int, alphabet=(0, 1, 2)):
    for length in range(max_len + 1):
        yield from itertools.product(alphabet, repeat=length)


def exhaustive_distance_blocks(max_len: int, alphabet=(0, 1, 2)):
    """Exhaustive edit distances for all list pairs up to ``max_len``.

    Independent route: vectorized Wagner-Fischer over whole blocks of
    same-length pairs, no backtrace, no shared code with edit_stats.
    Yields (refs, hyps, distance matrix) per length pair.
    """
    by_len: dict[int, list] = {}
    for tokens in enumerate_token_lists(max_len, alphabet):
        by_len.setdefault(len(tokens), []).append(tokens)

    for a, refs in by_len.items():
        ref_arr = np.array(refs, dtype=np.int16).reshape(len(refs), a)
        for b, hyps in by_len.items():
            hyp_arr = np.array(hyps, dtype=np.int16).reshape(len(hyps), b)
            shape = (b + 1, len(refs), len(hyps))
            prev = np.empty(shape, dtype=np.int16)
            prev[:] = np.arange(b + 1, dtype=np.int16)[:, None, None]
            cur = np.empty(shape, dtype=np.int16)
            for i in range(1, a + 1):
                cur[0] = i
                ref_col = ref_arr[:, i - 1][:, None]
                for j in range(1, b + 1):
                    neq = (ref_col != hyp_arr[:, j - 1][None, :]).astype(np.int16)
                    np.minimum(prev[j - 1] + neq, prev[j] + 1, out=cur[j])
                    np.minimum(cur[j], cur[j - 1] + 1, out=cur[j])
                prev, cur = cur, prev
            yield refs, hyps, prev[b]


def edit_distance_suite(max_len: int = 4, alphabet=(0, 1, 2)) -> SuiteResult:
    """edit_stats totals vs. the exhaustive enumeration oracle."""
    worst = 0
    cases = 0
    compute = metrics.edit_stats
    for refs, hyps, expected in exhaustive_distance_blocks(max_len, alphabet):
        for ri, ref in enumerate(refs):
            row = expected[ri]
            for hi, hyp in enumerate(hyps):
                stats = compute(ref, hyp)
                diff = stats.errors - row[hi]
                if diff:
                    worst = max(worst, abs(int(diff)))
                cases += 1
    return SuiteResult("edit_distance_exhaustive", worst == 0, float(worst), cases, 0.5)


def roundtrip_suite(n_instances: int = 200, seed: int = 99) -> SuiteResult:
    """Array files survive write -> read bitwise; writes are canonical."""
    failures = 0
    failing = None
    with tempfile.TemporaryDirectory() as tmp:
        target = Path(tmp) / "m.npy"
        second = Path(tmp) / "m2.npy"
        for case in range(n_instances):
            case_seed = seed + case
            rng = np.random.default_rng(case_seed)
            n = int(rng.integers(1, 12))
            d = int(rng.integers(1, 12))
            dtype = "<f4" if case % 2 == 0 else "<f8"
            values = rng.standard_normal((n, d))
            if dtype == "<f4":
                values = values.astype(np.float32).astype(np.float64)
            tensor_io.write_array(values, target, dtype=dtype)
            tensor_io.write_array(values, second, dtype=dtype)
            back = tensor_io.read_array(target).astype(np.float64)
            if back.tobytes() != values.tobytes() or target.read_bytes() != second.read_bytes():
                failures += 1
                failing = failing if failing is not None else case_seed
    return SuiteResult(
        "file_roundtrip", failures == 0, float(failures), n_instances, 0.5, failing
    )


def run_all(edit_max_len: int = 4) -> list[SuiteResult]:
    return [
        gradient_suite(),
        pca_suite(),
        edit_distance_suite(max_len=edit_max_len),
        roundtrip_suite(),
    ]
