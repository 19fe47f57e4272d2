"""Evaluation records: the atoms of the joint distribution.

Each record is either a matched (ground truth, prediction) pair, an unmatched
prediction (background false positive), or an unmatched ground truth (miss).
Records serialize one-per-line as NDJSON so a matching pass can be cached and
reloaded without re-matching.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path

from .dataset import Box, ClassHierarchy, ClassNode
from .errors import ParseError


@dataclass(frozen=True, slots=True)
class EvaluationRecord:
    record_id: int
    image_id: int
    gt_class: int   # background id for unmatched predictions
    pred_class: int  # background id for unmatched ground truth
    gt_id: int | None = None
    pred_id: int | None = None
    confidence: float | None = None
    gt_size: float | None = None
    pred_size: float | None = None
    gt_aspect: float | None = None
    pred_aspect: float | None = None
    size_ratio: float | None = None
    shift_x: float | None = None
    shift_y: float | None = None
    iou: float | None = None
    gt_box: Box | None = None
    pred_box: Box | None = None

    @property
    def is_pair(self) -> bool:
        return self.gt_id is not None and self.pred_id is not None

    @property
    def has_geometry(self) -> bool:
        return self.gt_size is not None and self.pred_size is not None


_FIELDS = (
    "record_id",
    "image_id",
    "gt_class",
    "pred_class",
    "gt_id",
    "pred_id",
    "confidence",
    "gt_size",
    "pred_size",
    "gt_aspect",
    "pred_aspect",
    "size_ratio",
    "shift_x",
    "shift_y",
    "iou",
    "gt_box",
    "pred_box",
)


def record_to_dict(record: EvaluationRecord) -> dict:
    raw = asdict(record)
    out = {}
    for key in _FIELDS:
        value = raw[key]
        if value is None:
            continue
        if key in ("gt_box", "pred_box"):
            value = list(value)
        out[key] = value
    return out


def record_from_dict(doc: dict) -> EvaluationRecord:
    kwargs = {k: doc.get(k) for k in _FIELDS}
    for key in ("gt_box", "pred_box"):
        if kwargs[key] is not None:
            kwargs[key] = tuple(kwargs[key])
    return EvaluationRecord(**kwargs)


def write_records(path: str | Path, records: list[EvaluationRecord]) -> None:
    with open(path, "w") as fh:
        for record in records:
            fh.write(json.dumps(record_to_dict(record), separators=(",", ":")))
            fh.write("\n")


def read_records(path: str | Path) -> list[EvaluationRecord]:
    records = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                records.append(record_from_dict(json.loads(line)))
            except (json.JSONDecodeError, TypeError) as exc:
                raise ParseError(f"{path}:{lineno}: bad record: {exc}") from exc
    return records


def meta_path(records_path: str | Path) -> Path:
    return Path(str(records_path) + ".meta.json")


def write_meta(records_path: str | Path, meta: dict) -> None:
    meta_path(records_path).write_text(json.dumps(meta, indent=1, sort_keys=True) + "\n")


def read_meta(records_path: str | Path) -> dict | None:
    path = meta_path(records_path)
    if not path.exists():
        return None
    return json.loads(path.read_text())


def hierarchy_from_meta(meta: dict) -> ClassHierarchy:
    return ClassHierarchy(
        tuple(ClassNode(c["id"], c["name"], c.get("parent")) for c in meta["classes"]),
        background_id=meta["background_id"],
    )


def fallback_hierarchy(records: list[EvaluationRecord]) -> ClassHierarchy:
    """Flat hierarchy recovered from record class ids when no sidecar meta exists.

    Unmatched-prediction records carry the background id on the gt side and
    unmatched-ground-truth records carry it on the pred side, which lets the
    background id be recovered from well-formed record files.
    """
    ids = {r.gt_class for r in records} | {r.pred_class for r in records}
    bg_seen = {r.gt_class for r in records if r.gt_id is None and r.pred_id is not None}
    bg_seen |= {r.pred_class for r in records if r.pred_id is None and r.gt_id is not None}
    if bg_seen:
        bg = min(bg_seen)
    else:
        bg = 0 if 0 not in ids else max(ids) + 1
    user_ids = sorted(ids - {bg}) or [bg + 1]
    return ClassHierarchy(tuple(ClassNode(i, str(i), None) for i in user_ids), background_id=bg)
