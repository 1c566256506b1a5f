"""Brute-force reference for the two-stage token compression pipeline.

This module is a deliberately naive, straight-line transcription of the
algorithm using plain Python floats and nested loops.  It exists so that the
optimized library can be checked against an independent implementation for
exact (bitwise) agreement, so it must follow the same documented accumulation
conventions the library guarantees:

  * per-frame channel sums accumulate tokens in ascending order;
  * cross-frame sums fold per-frame subtotals in ascending frame order;
  * channel reductions (dot products, squared norms) accumulate channels
    left to right;
  * all accumulation happens in IEEE double precision (inputs are exact
    float32 values widened to double);
  * softmax uses ``math.exp`` and a single left-to-right sum;
  * cosine of anything against a zero-norm vector is 0.0, and cosine output
    is clamped to [-1, 1].

Keep this file free of numpy vectorization: its value is that it shares no
code with the package under test.
"""

import math


def _dot(a, b):
    acc = 0.0
    for x, y in zip(a, b):
        acc = acc + x * y
    return acc


def _norm(a):
    acc = 0.0
    for x in a:
        acc = acc + x * x
    return math.sqrt(acc)


def _cosine(a, b):
    na = _norm(a)
    nb = _norm(b)
    if na == 0.0 or nb == 0.0:
        return 0.0
    s = _dot(a, b) / (na * nb)
    return min(1.0, max(-1.0, s))


def reference_compress(
    frames,
    ratio,
    tau=0.01,
    eps=1e-8,
    window=None,
    aggregation="mean",
    score_mode="combined",
    alpha=1.0,
    beta=1.0,
    adjustment="adaptive",
    min_tokens=1,
):
    """Run the whole pipeline with nested loops.

    ``frames`` is a T x M x D' nested list of Python floats (exact float32
    values).  ``window=None`` means one pooled vector over the whole video;
    an integer w partitions frames into contiguous chunks [0,w), [w,2w), ...
    Returns a dict with every intermediate quantity.
    """
    T = len(frames)
    M = len(frames[0])
    D = len(frames[0][0])

    # Per-frame channel sums: tokens ascending within each frame.
    frame_sums = []
    for t in range(T):
        sums = [0.0] * D
        for m in range(M):
            tok = frames[t][m]
            for c in range(D):
                sums[c] = sums[c] + tok[c]
        frame_sums.append(sums)

    # Pooled video vectors: chunks of `window` frames (whole video if None),
    # folding per-frame subtotals in ascending frame order.
    w = T if window is None else window
    pools = []
    pool_of_frame = [0] * T
    for start in range(0, T, w):
        stop = min(start + w, T)
        acc = [0.0] * D
        for t in range(start, stop):
            for c in range(D):
                acc[c] = acc[c] + frame_sums[t][c]
        count = (stop - start) * M
        pools.append([v / count for v in acc])
        for t in range(start, stop):
            pool_of_frame[t] = len(pools) - 1

    # Stage 1 scoring: video-level uniqueness of each token.
    u_video = []
    for t in range(T):
        row = []
        for m in range(M):
            row.append(-_cosine(frames[t][m], pools[pool_of_frame[t]]))
        u_video.append(row)

    # Frame uniqueness: mean (default) or max over the frame's tokens.
    u_t = []
    for t in range(T):
        if aggregation == "mean":
            acc = 0.0
            for m in range(M):
                acc = acc + u_video[t][m]
            u_t.append(acc / M)
        elif aggregation == "max":
            u_t.append(max(u_video[t]))
        else:
            raise ValueError(aggregation)

    # Shift-by-max softmax with stabilizing eps in the denominator.
    mx = max(u_t)
    exps = [math.exp((u - mx) / tau) for u in u_t]
    total = 0.0
    for e in exps:
        total = total + e
    denom = total + eps
    sigma = [e / denom for e in exps]

    # Per-frame retention ratios and integer budgets.
    if adjustment == "adaptive":
        r = [ratio * (1.0 + s - 1.0 / T) for s in sigma]
    elif adjustment == "uniform":
        r = [ratio] * T
    else:
        raise ValueError(adjustment)
    k = [min(M, max(min_tokens, math.ceil(rt * M))) for rt in r]

    # Stage 2 scoring: frame-level uniqueness against the frame mean.
    frame_pools = [[v / M for v in frame_sums[t]] for t in range(T)]
    u_frame = []
    for t in range(T):
        row = []
        for m in range(M):
            row.append(-_cosine(frames[t][m], frame_pools[t]))
        u_frame.append(row)

    combined = []
    for t in range(T):
        row = []
        for m in range(M):
            if score_mode == "combined":
                row.append(alpha * u_frame[t][m] + beta * u_video[t][m])
            elif score_mode == "frame_only":
                row.append(u_frame[t][m])
            elif score_mode == "video_only":
                row.append(u_video[t][m])
            elif score_mode == "positive_frame":
                row.append(-u_frame[t][m])
            elif score_mode == "positive_video":
                row.append(-u_video[t][m])
            else:
                raise ValueError(score_mode)
        combined.append(row)

    # Top-k per frame: largest scores win, ties go to the lower index,
    # output reported in ascending index order.
    kept = []
    for t in range(T):
        order = sorted(range(M), key=lambda m: (-combined[t][m], m))
        kept.append(sorted(order[: k[t]]))

    return {
        "pools": pools,
        "pool_of_frame": pool_of_frame,
        "frame_pools": frame_pools,
        "u_video": u_video,
        "u_frame": u_frame,
        "u_t": u_t,
        "sigma": sigma,
        "r": r,
        "k": k,
        "combined": combined,
        "kept": kept,
    }


def tensor_to_lists(values):
    """Convert a (T, M, D') float32 array to nested Python float lists."""
    return [[list(map(float, tok)) for tok in frame] for frame in values]
