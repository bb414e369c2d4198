"""Task descriptions: the natural-language policy instructions fed to the pipeline."""

from __future__ import annotations

from dataclasses import dataclass

POLICY_TYPES = ("Agreement", "Offer", "Set")
METHODOLOGIES = ("OntologyGuided", "OSES")


@dataclass(frozen=True)
class TaskDescription:
    id: str
    title: str
    text: str
    policy_type: str
    requires_constraints: bool = False

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("task id must be non-empty")
        if not self.text or not self.text.strip():
            raise ValueError(f"task {self.id}: text must be non-empty")
        if self.policy_type not in POLICY_TYPES:
            raise ValueError(f"task {self.id}: policy_type must be one of {POLICY_TYPES}, got {self.policy_type!r}")
