"""In-memory session state: loaded datasets and derived caches.

A loaded dataset is an immutable snapshot (records + metadata); every cached
artifact is a deterministic function of it and the config, so caches only ever
invalidate on reload.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from pathlib import Path

from ..config import ServiceConfig
from ..dataset import ClassHierarchy, FeatureTable, ImageRecord
from ..distribution import DistributionEngine
from ..errors import ValidationError
from ..records import (
    EvaluationRecord,
    fallback_hierarchy,
    hierarchy_from_meta,
    read_meta,
    read_records,
)
from ..subsets import DiscretizationSpec, SubsetDescriptor, mine_subsets


@dataclass
class LoadedDataset:
    dataset_id: str
    task: str
    records: list[EvaluationRecord]
    hierarchy: ClassHierarchy
    engine: DistributionEngine
    images: dict[int, ImageRecord]
    counts: dict[str, int]
    features: FeatureTable | None = None
    matching: dict | None = None
    _subset_cache: dict[tuple, list[SubsetDescriptor]] = field(default_factory=dict)
    _lock: threading.Lock = field(default_factory=threading.Lock)

    def record_by_id(self, record_id: int) -> EvaluationRecord | None:
        if 0 <= record_id < len(self.records) and self.records[record_id].record_id == record_id:
            return self.records[record_id]
        for r in self.records:  # records files may be filtered/reordered
            if r.record_id == record_id:
                return r
        return None

    def mined_subsets(self, class_id: int, beta: float) -> list[SubsetDescriptor]:
        key = (class_id, beta)
        with self._lock:
            if key not in self._subset_cache:
                self._subset_cache[key] = mine_subsets(
                    self.engine, class_id, DiscretizationSpec(beta=beta)
                )
            return self._subset_cache[key]


def load_from_records(
    dataset_id: str,
    records_path: str | Path,
    config: ServiceConfig,
    features: FeatureTable | None = None,
) -> LoadedDataset:
    records = read_records(records_path)
    meta = read_meta(records_path)
    if meta is not None:
        hierarchy = hierarchy_from_meta(meta)
        task = meta["task"]
        images = {
            im["id"]: ImageRecord(im["id"], im["width"], im["height"], im["file_name"])
            for im in meta.get("images", [])
        }
        counts = dict(meta.get("counts", {}))
        matching = meta.get("matching")
    else:
        hierarchy = fallback_hierarchy(records)
        task = "detection" if any(r.gt_box or r.pred_box for r in records) else "classification"
        images = {}
        counts = {}
        matching = None
    if not counts:
        counts = {
            "images": len({r.image_id for r in records}) if images == {} else len(images),
            "ground_truth": len({r.gt_id for r in records if r.gt_id is not None}),
            "predictions": len({r.pred_id for r in records if r.pred_id is not None}),
        }
    engine = DistributionEngine(
        records,
        hierarchy,
        task,
        size_tolerance=config.size_tolerance,
        direction_tolerance=config.direction_tolerance,
    )
    return LoadedDataset(
        dataset_id=dataset_id,
        task=task,
        records=records,
        hierarchy=hierarchy,
        engine=engine,
        images=images,
        counts=counts,
        features=features,
        matching=matching,
    )


class SessionState:
    """Datasets by id; reads are lock-free, loading replaces the snapshot atomically."""

    def __init__(self, config: ServiceConfig):
        self.config = config
        self._datasets: dict[str, LoadedDataset] = {}
        self._load_lock = threading.Lock()

    def add(self, dataset: LoadedDataset) -> None:
        with self._load_lock:
            self._datasets = {**self._datasets, dataset.dataset_id: dataset}

    def get(self, dataset_id: str) -> LoadedDataset | None:
        return self._datasets.get(dataset_id)

    def ids(self) -> list[str]:
        return sorted(self._datasets)

    def load_records_file(self, dataset_id: str, path: str | Path) -> LoadedDataset:
        if not Path(path).exists():
            raise ValidationError(f"records file not found: {path}")
        loaded = load_from_records(dataset_id, path, self.config)
        self.add(loaded)
        return loaded
