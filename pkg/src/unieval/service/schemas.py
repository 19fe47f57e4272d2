"""Pydantic request/response models for the HTTP API."""

from __future__ import annotations

from typing import Any, Literal, Optional, Union

from pydantic import BaseModel, Field


class ConditionModel(BaseModel):
    var: str
    op: Literal["=", "==", "<", "<=", ">", ">=", "in"]
    value: Any


class KeepModel(BaseModel):
    var: str
    bins: Optional[list[float]] = None


class QueryRequest(BaseModel):
    keep: Optional[list[Union[str, KeepModel]]] = None
    where: list[ConditionModel] = Field(default_factory=list)
    given: Optional[list[ConditionModel]] = None


class MarginalRowModel(BaseModel):
    values: list[Any]
    count: int
    probability: float


class QueryResponse(BaseModel):
    probability: Optional[float] = None
    table: Optional[list[MarginalRowModel]] = None


class MatrixRequest(BaseModel):
    mode: Literal["confusion", "size", "direction"] = "confusion"
    subtreeRoot: Optional[int] = None
    normalization: Literal["none", "row", "column"] = "none"
    where: list[ConditionModel] = Field(default_factory=list)


class ClassRef(BaseModel):
    id: int
    name: str
    leaf: bool = True


class MatrixCellModel(BaseModel):
    r: int
    c: int
    count: int
    zero: bool
    size: list[int]
    dir: list[int]
    value: Optional[float] = None


class MatrixResponse(BaseModel):
    mode: str
    normalization: str
    rows: list[ClassRef]
    cols: list[ClassRef]
    order: list[int]
    cells: list[MatrixCellModel]


class ClassSummaryModel(BaseModel):
    classId: int
    name: str
    precision: Optional[float]
    recall: Optional[float]
    ap: Optional[float]
    objectCount: int


class SummaryResponse(BaseModel):
    datasetId: str
    task: str
    images: int
    groundTruth: int
    predictions: int
    records: int
    map: Optional[float]
    classes: list[ClassSummaryModel]


class PredicateModel(BaseModel):
    attribute: str
    value: Optional[Any] = None
    interval: Optional[list[Optional[float]]] = None  # null bound = unbounded
    index: Optional[int] = None


class SubsetRowModel(BaseModel):
    predicates: list[PredicateModel]
    label: str
    support: int
    metrics: dict[str, Optional[float]]


class SubsetsResponse(BaseModel):
    classId: int
    className: str
    beta: float
    minSupport: int
    rows: list[SubsetRowModel]


class GridRequest(BaseModel):
    records: Optional[list[int]] = None          # explicit record ids
    where: list[ConditionModel] = Field(default_factory=list)  # or a conditioned selection
    seed: int = 0
    limit: Optional[int] = None


class ObjectOverlay(BaseModel):
    box: Optional[list[float]] = None
    classId: int
    className: str
    confidence: Optional[float] = None


class GridCellModel(BaseModel):
    objectKey: str
    recordId: int
    row: int
    col: int
    imageId: int
    cropUrl: Optional[str] = None
    gt: Optional[ObjectOverlay] = None
    pred: Optional[ObjectOverlay] = None


class GridResponse(BaseModel):
    rows: int
    cols: int
    cost: float
    cells: list[GridCellModel]


class DatasetInfo(BaseModel):
    id: str
    task: str
    records: int


class DatasetListResponse(BaseModel):
    datasets: list[DatasetInfo]
