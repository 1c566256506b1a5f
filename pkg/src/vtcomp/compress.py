"""Stage 2: per-token uniqueness scoring and top-k extraction.

Builds on stage 1: tokens are scored against their own frame's mean and the
video-level pool, the two uniqueness scores combine into one ranking, and
each frame keeps its budgeted top-k tokens in original order.  ``compress``
runs both stages end to end and returns every intermediate artifact.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import NamedTuple

import numpy as np

from . import accum
from .budget import (
    allocate,
    allocate_uniform,
    frame_uniqueness,
    pools_from_frame_sums,
    softmax_weights,
    window_edges,
)
from .errors import KExceedsMError, ShapeMismatchError
from .model import (
    Adjustment,
    BudgetAllocation,
    CompressedSelection,
    RetentionConfig,
    ScoreMode,
    ScoreReport,
    TokenTensor,
)


class CompressResult(NamedTuple):
    selection: CompressedSelection
    allocation: BudgetAllocation
    report: ScoreReport


def frame_pool(tensor: TokenTensor) -> np.ndarray:
    """Per-frame mean token vector: (T, D') float64."""
    return accum.frame_token_sums(tensor.values) / tensor.tokens_per_frame


def frame_token_uniqueness(tensor: TokenTensor, pools: np.ndarray) -> np.ndarray:
    """Per-token frame-level uniqueness: minus cosine to the frame pool."""
    frames, tokens, _ = tensor.values.shape
    rows = np.asarray(pools, dtype=np.float64)
    if rows.shape != (frames, tensor.dim):
        raise ShapeMismatchError(
            f"expected ({frames}, {tensor.dim}) pools, got {rows.shape}"
        )
    channel_major = accum.transpose_tokens(tensor.values)
    sq, (dots,) = accum.token_reductions(channel_major, frames, tokens, [rows])
    sims = accum.clamped_cosines(dots, np.sqrt(sq), accum.row_norms(rows)[:, None])
    return -sims


def combine_scores(u_frame, u_video, mode: ScoreMode = ScoreMode.COMBINED,
                   alpha: float = 1.0, beta: float = 1.0) -> np.ndarray:
    """Merge frame-level and video-level scores into the selection score.

    Combined mode computes alpha*frame + beta*video (defaults weight them
    equally); the single-score modes pass one grid through, and the
    positive variants flip its sign to prefer redundant tokens instead.
    """
    uf = np.asarray(u_frame, dtype=np.float64)
    uv = np.asarray(u_video, dtype=np.float64)
    if uf.shape != uv.shape:
        raise ShapeMismatchError(f"score shapes differ: {uf.shape} vs {uv.shape}")
    mode = ScoreMode(mode)
    if mode is ScoreMode.COMBINED:
        return np.multiply(uf, alpha) + np.multiply(uv, beta)
    if mode is ScoreMode.FRAME_ONLY:
        return uf.copy()
    if mode is ScoreMode.VIDEO_ONLY:
        return uv.copy()
    if mode is ScoreMode.POSITIVE_FRAME:
        return -uf
    return -uv


def topk_select(scores, k: int) -> np.ndarray:
    """Indices of the k largest scores, ascending, ties to the lower index.

    The ascending output preserves the tokens' original order for downstream
    consumers that rely on positional structure.
    """
    values = np.asarray(scores, dtype=np.float64).reshape(-1)
    if not 0 <= k <= values.shape[0]:
        raise KExceedsMError(f"k={k} outside 0..{values.shape[0]}")
    picked = np.argsort(-values, kind="stable")[:k].astype(np.int64)
    picked.sort()
    return picked


def _run_chunked(workers: int, frames: int, phase) -> None:
    """Run phase(start, stop) over contiguous frame chunks.

    Every per-frame quantity is computed independently of the chunking, so
    output is bit-identical for any worker count; with one worker the phase
    runs inline.
    """
    workers = min(max(1, workers), frames)
    if workers == 1:
        phase(0, frames)
        return
    base, extra = divmod(frames, workers)
    bounds = []
    pos = 0
    for i in range(workers):
        size = base + (1 if i < extra else 0)
        bounds.append((pos, pos + size))
        pos += size
    with ThreadPoolExecutor(max_workers=workers) as pool:
        for future in [pool.submit(phase, a, b) for a, b in bounds]:
            future.result()


def compress(tensor: TokenTensor, config: RetentionConfig | None = None,
             threads: int = 1) -> CompressResult:
    """Run the full two-stage pipeline on a validated tensor.

    Stage 1 pools the video (optionally in frame windows), scores video-level
    token uniqueness, aggregates it per frame, and softmax-allocates
    per-frame budgets around the preset ratio (uniform adjustment keeps the
    preset ratio everywhere instead).  Stage 2 adds frame-level uniqueness,
    combines the scores, and extracts each frame's top-k tokens.  Returns
    the selection plus the budget and score intermediates.
    """
    if config is None:
        config = RetentionConfig()
    values = tensor.values
    frames, tokens, dim = values.shape
    edges = window_edges(frames, config.window)

    frame_sums = np.zeros((frames, dim), dtype=np.float64)

    def sum_phase(a: int, b: int) -> None:
        frame_sums[a:b] = accum.frame_token_sums(values[a:b])

    _run_chunked(threads, frames, sum_phase)

    pools = pools_from_frame_sums(frame_sums, tokens, edges)
    pool_by_frame = pools.per_frame()
    frame_pools = frame_sums / tokens

    channel_major = np.empty((dim, frames * tokens), dtype=np.float32)
    sq = np.empty((frames, tokens), dtype=np.float64)
    dot_video = np.empty((frames, tokens), dtype=np.float64)
    dot_frame = np.empty((frames, tokens), dtype=np.float64)

    def reduce_phase(a: int, b: int) -> None:
        accum.transpose_tokens(values, out=channel_major, start=a, stop=b)
        part_sq, (part_v, part_f) = accum.token_reductions(
            channel_major, frames, tokens, [pool_by_frame, frame_pools], a, b
        )
        sq[a:b] = part_sq
        dot_video[a:b] = part_v
        dot_frame[a:b] = part_f

    _run_chunked(threads, frames, reduce_phase)

    token_norms = np.sqrt(sq)
    video_pool_norms = accum.row_norms(pools.vectors)[pools.frame_pool_index]
    frame_pool_norms = accum.row_norms(frame_pools)
    u_video = -accum.clamped_cosines(dot_video, token_norms, video_pool_norms[:, None])
    u_frame = -accum.clamped_cosines(dot_frame, token_norms, frame_pool_norms[:, None])

    u_t = frame_uniqueness(u_video, config.frame_aggregation)
    sigma = softmax_weights(u_t, config.temperature, config.epsilon)
    if config.adjustment is Adjustment.ADAPTIVE:
        allocation = allocate(sigma, config.ratio, tokens,
                              config.min_tokens_per_frame, u_t)
    else:
        allocation = allocate_uniform(frames, config.ratio, tokens,
                                      config.min_tokens_per_frame, u_t, sigma)

    combined = combine_scores(u_frame, u_video, config.score_mode,
                              config.alpha, config.beta)

    kept: list = [None] * frames
    blocks: list = [None] * frames
    counts = allocation.per_frame_count

    def select_phase(a: int, b: int) -> None:
        for t in range(a, b):
            idx = topk_select(combined[t], int(counts[t]))
            kept[t] = idx
            blocks[t] = values[t, idx, :]

    _run_chunked(threads, frames, select_phase)

    selection = CompressedSelection(tuple(kept), tuple(blocks))
    report = ScoreReport(u_video, u_frame, combined, u_t, sigma)
    return CompressResult(selection, allocation, report)
