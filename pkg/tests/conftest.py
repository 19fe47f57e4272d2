import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from helpers import make_hierarchy, pair_record, write_fixture_coco  # noqa: E402

from unieval.distribution import DistributionEngine  # noqa: E402


@pytest.fixture
def coco_fixture(tmp_path):
    """(gt path, predictions path): 2 images, 3 annotations, 2 predictions."""
    return write_fixture_coco(tmp_path)


@pytest.fixture
def cat_dog_hierarchy():
    return make_hierarchy(("cat", "dog"))


@pytest.fixture
def four_records(cat_dog_hierarchy):
    """gt classes (cat, cat, dog, dog) with confidences (0.9, 0.3, 0.6, 0.8)."""
    records = [
        pair_record(0, gt_class=1, pred_class=1, confidence=0.9),
        pair_record(1, gt_class=1, pred_class=1, confidence=0.3),
        pair_record(2, gt_class=2, pred_class=2, confidence=0.6),
        pair_record(3, gt_class=2, pred_class=2, confidence=0.8),
    ]
    return records


@pytest.fixture
def four_record_engine(four_records, cat_dog_hierarchy):
    return DistributionEngine(four_records, cat_dog_hierarchy, "detection")
