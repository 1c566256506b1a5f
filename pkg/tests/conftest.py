import numpy as np
import pytest

from vtcomp import TokenTensor


def random_tensor(rng, max_frames=5, max_tokens=8, max_dim=4):
    """Small random tensor in the shape range the brute-force oracle covers."""
    frames = int(rng.integers(1, max_frames + 1))
    tokens = int(rng.integers(1, max_tokens + 1))
    dim = int(rng.integers(1, max_dim + 1))
    values = rng.standard_normal((frames, tokens, dim)).astype(np.float32)
    return TokenTensor.from_array(values)


def assert_selection_equivalent(scores, kept, kept_other):
    """Two selections must agree after tie-break normalization.

    ``kept_other`` (already mapped into the same index space as ``kept``)
    may differ from ``kept`` only by exchanging tokens whose scores tie the
    selection boundary exactly; symmetric inputs (e.g. one-channel tokens,
    duplicated tokens) produce such ties legitimately.
    """
    a = set(int(i) for i in kept)
    b = set(int(i) for i in kept_other)
    assert len(a) == len(b)
    if a == b:
        return
    boundary = min(float(scores[i]) for i in a)
    core = {i for i in a if float(scores[i]) > boundary}
    assert core <= b, f"non-tied tokens changed: {sorted(core - b)}"
    for i in b - a:
        assert float(scores[i]) == boundary, (
            f"token {i} swapped in with score {scores[i]!r} != boundary {boundary!r}"
        )


@pytest.fixture
def rng():
    return np.random.default_rng(20240512)
