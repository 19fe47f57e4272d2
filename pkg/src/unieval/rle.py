"""Run-length-encoded binary masks (COCO layout: column-major, counts start with zeros).

Supports both the uncompressed form, where ``counts`` is a list of ints, and the
compressed form, where ``counts`` is the COCO ASCII string encoding.
"""

from __future__ import annotations

import numpy as np

from .errors import ValidationError


def decode_compressed_counts(data: str) -> list[int]:
    """Decode the COCO ASCII-packed counts string into a plain run list."""
    counts: list[int] = []
    i = 0
    while i < len(data):
        x = 0
        k = 0
        more = True
        while more:
            c = ord(data[i]) - 48
            x |= (c & 0x1F) << (5 * k)
            more = bool(c & 0x20)
            i += 1
            k += 1
            if not more and (c & 0x10):
                x |= -1 << (5 * k)
        if len(counts) > 2:
            x += counts[-2]
        counts.append(x)
    return counts


def normalize_rle(rle: dict) -> tuple[tuple[int, int], list[int]]:
    """Return ((height, width), counts) from an RLE dict, decoding if compressed."""
    if not isinstance(rle, dict) or "counts" not in rle or "size" not in rle:
        raise ValidationError(f"not an RLE mask: {rle!r}")
    size = rle["size"]
    if len(size) != 2 or size[0] <= 0 or size[1] <= 0:
        raise ValidationError(f"bad RLE size: {size!r}")
    counts = rle["counts"]
    if isinstance(counts, (bytes, str)):
        if isinstance(counts, bytes):
            counts = counts.decode("ascii")
        counts = decode_compressed_counts(counts)
    counts = [int(c) for c in counts]
    if any(c < 0 for c in counts):
        raise ValidationError("negative run length in RLE counts")
    if sum(counts) != size[0] * size[1]:
        raise ValidationError(
            f"RLE counts sum {sum(counts)} != mask size {size[0]}x{size[1]}"
        )
    return (int(size[0]), int(size[1])), counts


def area(rle: dict) -> int:
    """Number of foreground pixels (odd-position runs)."""
    _, counts = normalize_rle(rle)
    return int(sum(counts[1::2]))


def decode(rle: dict) -> np.ndarray:
    """Decode to a boolean (height, width) array."""
    (h, w), counts = normalize_rle(rle)
    flat = np.zeros(h * w, dtype=bool)
    pos = 0
    value = False
    for run in counts:
        if value:
            flat[pos : pos + run] = True
        pos += run
        value = not value
    return flat.reshape((w, h)).T  # column-major storage


def encode(mask: np.ndarray) -> dict:
    """Encode a boolean (height, width) array as an uncompressed RLE dict."""
    h, w = mask.shape
    flat = np.asarray(mask, dtype=bool).T.reshape(-1)
    counts: list[int] = []
    value = False
    run = 0
    for bit in flat:
        if bit == value:
            run += 1
        else:
            counts.append(run)
            value = bool(bit)
            run = 1
    counts.append(run)
    return {"size": [int(h), int(w)], "counts": counts}


def box_to_mask(box: tuple[float, float, float, float], size: tuple[int, int]) -> np.ndarray:
    """Rasterize an (x, y, w, h) box onto a (height, width) pixel grid."""
    h, w = size
    x0, y0, bw, bh = box
    mask = np.zeros((h, w), dtype=bool)
    xa = max(0, int(np.floor(x0)))
    ya = max(0, int(np.floor(y0)))
    xb = min(w, int(np.ceil(x0 + bw)))
    yb = min(h, int(np.ceil(y0 + bh)))
    if xb > xa and yb > ya:
        mask[ya:yb, xa:xb] = True
    return mask


def mask_iou(a: np.ndarray, b: np.ndarray) -> float:
    if a.shape != b.shape:
        raise ValidationError(f"mask shapes differ: {a.shape} vs {b.shape}")
    inter = np.logical_and(a, b).sum()
    union = np.logical_or(a, b).sum()
    if union == 0:
        raise ValidationError("IoU of two empty masks is undefined")
    return float(inter / union)
