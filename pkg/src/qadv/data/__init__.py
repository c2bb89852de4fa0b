"""Dataset generators and on-disk dataset format."""

from .store import load_dataset, save_dataset

__all__ = ["load_dataset", "save_dataset"]
