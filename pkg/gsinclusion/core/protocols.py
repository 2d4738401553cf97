from typing import List, Protocol, runtime_checkable

from gsinclusion.core.data_structures import VerdictRecord


@runtime_checkable
class HasRecords(Protocol):
    """Objects that render into report rows."""

    def to_records(self) -> List[VerdictRecord]: ...
