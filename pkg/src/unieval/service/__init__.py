from .app import create_app
from .state import LoadedDataset, SessionState, load_from_records

__all__ = ["create_app", "SessionState", "LoadedDataset", "load_from_records"]
