"""
Base class for facade resources.
"""

from typing import TYPE_CHECKING, Any, Dict, Optional

from peh.config import RunConfig

if TYPE_CHECKING:
    from peh.client import PEHomology


class BaseResource:
    """Base class for every resource bound to a facade."""

    def __init__(self, client: "PEHomology"):
        """
        Initialize the resource.

        Args:
            client: The facade whose configuration this resource reads.
        """
        self.client = client

    @property
    def config(self) -> RunConfig:
        return self.client.config

    def _settings(self, overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
        """The facade configuration with per-call overrides that are not None."""
        if not overrides:
            return self.config
        filtered = {k: v for k, v in overrides.items() if v is not None}
        if not filtered:
            return self.config
        return self.config.with_options(**filtered)
