"""
Facade resources.
"""

from peh.resources.base import BaseResource
from peh.resources.datasets import Datasets
from peh.resources.limits import Limits
from peh.resources.matrices import Matrices
from peh.resources.systems import Systems

__all__ = ["BaseResource", "Datasets", "Limits", "Matrices", "Systems"]
