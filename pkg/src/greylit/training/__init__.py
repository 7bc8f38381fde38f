from greylit.training.dataset import (
    LabeledDataset,
    LabeledRecord,
    load_dataset,
    record_to_dict,
)
from greylit.training.split import split_dataset
from greylit.training.metrics import EvalMetrics, compute_metrics, sus_score
from greylit.training.gridsearch import DEFAULT_GRIDS, GridSpec, grid_search
from greylit.training.study import EvalReport, StudyResult, run_study

__all__ = [
    "LabeledDataset",
    "LabeledRecord",
    "load_dataset",
    "record_to_dict",
    "split_dataset",
    "EvalMetrics",
    "compute_metrics",
    "sus_score",
    "DEFAULT_GRIDS",
    "GridSpec",
    "grid_search",
    "EvalReport",
    "StudyResult",
    "run_study",
]
