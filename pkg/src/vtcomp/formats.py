"""On-disk formats: the .vtok binary tensor container and CSV score exports.

.vtok layout (all little-endian, regardless of host):

    bytes 0..3    magic "VTK1"
    bytes 4..5    uint16 version, currently 1
    bytes 6..9    uint32 frame count T
    bytes 10..13  uint32 tokens per frame M
    bytes 14..17  uint32 channel count D'
    bytes 18..    T*M*D' float32 values, row-major (frame, token, channel)

A valid file is exactly 18 + 4*T*M*D' bytes; round-trips are bit-exact.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .errors import (
    BadMagicError,
    BadVersionError,
    OversizedPayloadError,
    ShapeMismatchError,
    TruncatedPayloadError,
)
from .model import BudgetAllocation, ScoreReport, TokenTensor

MAGIC = b"VTK1"
VERSION = 1
HEADER = struct.Struct("<4sHIII")


def write_vtok(tensor: TokenTensor, path) -> None:
    """Write a validated tensor; the payload is the flat float32 buffer."""
    header = HEADER.pack(MAGIC, VERSION, tensor.frames,
                         tensor.tokens_per_frame, tensor.dim)
    payload = np.ascontiguousarray(tensor.flat, dtype="<f4").tobytes()
    Path(path).write_bytes(header + payload)


def read_vtok(path) -> TokenTensor:
    """Read and fully validate a .vtok file.

    Raises BadMagicError / BadVersionError for a foreign or newer file,
    TruncatedPayloadError / OversizedPayloadError when the byte count does
    not match the header exactly, and the tensor validation errors (e.g.
    NonFiniteError) for a structurally sound file with bad values.
    """
    blob = Path(path).read_bytes()
    if len(blob) >= 4 and blob[:4] != MAGIC:
        raise BadMagicError(f"expected magic {MAGIC!r}, got {blob[:4]!r}")
    if len(blob) < HEADER.size:
        raise TruncatedPayloadError(
            f"file has {len(blob)} bytes, shorter than the {HEADER.size}-byte header"
        )
    _, version, frames, tokens, dim = HEADER.unpack_from(blob)
    if version != VERSION:
        raise BadVersionError(f"unsupported version {version}, expected {VERSION}")
    expected = HEADER.size + 4 * frames * tokens * dim
    if len(blob) < expected:
        raise TruncatedPayloadError(
            f"header declares {expected} bytes, file has only {len(blob)}"
        )
    if len(blob) > expected:
        raise OversizedPayloadError(
            f"header declares {expected} bytes, file has {len(blob)}"
        )
    data = np.frombuffer(blob, dtype="<f4", offset=HEADER.size)
    return TokenTensor.from_flat(frames, tokens, dim, data)


def _fmt(value: float) -> str:
    return f"{value:.6g}"


def export_scores(report: ScoreReport, allocation: BudgetAllocation, path) -> None:
    """Write the per-frame stage-1 table as CSV.

    Columns: frame, u_t, sigma_t, r_t, k_t — one row per frame, six
    significant digits, LF line endings.
    """
    if report.frames != allocation.frames:
        raise ShapeMismatchError(
            f"report covers {report.frames} frames, allocation {allocation.frames}"
        )
    lines = ["frame,u_t,sigma_t,r_t,k_t"]
    for t in range(report.frames):
        lines.append(
            f"{t},{_fmt(report.frame_uniqueness[t])},{_fmt(report.frame_weight[t])},"
            f"{_fmt(allocation.per_frame_ratio[t])},{int(allocation.per_frame_count[t])}"
        )
    Path(path).write_bytes(("\n".join(lines) + "\n").encode("utf-8"))


def export_token_scores(report: ScoreReport, path) -> None:
    """Write the per-token score grids as CSV (frame, token, three scores)."""
    lines = ["frame,token,u_video,u_frame,u_combined"]
    frames, tokens = report.video_score.shape
    for t in range(frames):
        for m in range(tokens):
            lines.append(
                f"{t},{m},{_fmt(report.video_score[t, m])},"
                f"{_fmt(report.frame_score[t, m])},{_fmt(report.combined_score[t, m])}"
            )
    Path(path).write_bytes(("\n".join(lines) + "\n").encode("utf-8"))


def export_indices(selection, path) -> None:
    """Write per-frame kept indices as CSV rows of (frame, kept_index)."""
    lines = ["frame,kept_index"]
    for t, idx in enumerate(selection.kept_indices):
        for i in idx:
            lines.append(f"{t},{int(i)}")
    Path(path).write_bytes(("\n".join(lines) + "\n").encode("utf-8"))
