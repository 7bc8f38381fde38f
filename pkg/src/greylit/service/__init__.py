from greylit.service.store import AppendOnlyStore
from greylit.service.registry import ModelRegistry
from greylit.service.runs import PipelineService, RunRecord

__all__ = ["AppendOnlyStore", "ModelRegistry", "PipelineService", "RunRecord"]
