"""Report models emitted by the CLI and the HTTP surface."""

import json
from typing import Any, Dict, List, Optional, Union

from pydantic import BaseModel, Field, field_serializer, field_validator

from .state_params import complex_pair, to_complex


class NumericEntry(BaseModel):
    """A single number together with the tolerance it was computed under."""
    label: str
    value: complex
    tolerance: float

    @field_validator("value", mode="before")
    @classmethod
    def _coerce_value(cls, value):
        return to_complex(value)

    @field_serializer("value")
    def _serialize_value(self, value: complex):
        return complex_pair(value)


class NumericTable(BaseModel):
    """Named table of numeric entries (moments, spectra, coordinates)."""
    name: str
    entries: List[NumericEntry] = []


class Report(BaseModel):
    """Result of one command: verdicts, numeric tables, residuals and provenance."""
    command: str
    arguments: Dict[str, Any] = Field(default_factory=dict, description="Command echo")
    verdicts: Dict[str, str] = Field(default_factory=dict)
    tables: List[NumericTable] = []
    residuals: List[NumericEntry] = []
    provenance: Dict[str, float] = Field(default_factory=dict, description="Tolerances in force")
    state_specs: Dict[str, Dict[str, Any]] = Field(default_factory=dict, description="Re-parseable specs of printed states")
    notes: List[str] = []

    def add_verdict(self, key: str, verdict: Union[str, Any]):
        """Record a verdict; enums are stored by value."""
        self.verdicts[key] = getattr(verdict, "value", str(verdict))

    def table(self, name: str) -> NumericTable:
        """Fetch a table by name, creating it on first use."""
        for table in self.tables:
            if table.name == name:
                return table
        table = NumericTable(name=name)
        self.tables.append(table)
        return table

    def add_entry(self, table_name: str, label: str, value: complex, tolerance: float):
        self.table(table_name).entries.append(NumericEntry(label=label, value=value, tolerance=tolerance))

    def add_residual(self, label: str, value: float, tolerance: float):
        self.residuals.append(NumericEntry(label=label, value=value, tolerance=tolerance))

    def add_state(self, key: str, spec: Dict[str, Any]):
        self.state_specs[key] = spec

    def find_entry(self, table_name: str, label: str) -> Optional[NumericEntry]:
        for table in self.tables:
            if table.name == table_name:
                for entry in table.entries:
                    if entry.label == label:
                        return entry
        return None

    def to_structured(self) -> str:
        return self.model_dump_json(indent=2)

    def to_text(self) -> str:
        """Plain-text rendering; deterministic for identical reports."""
        lines = [f"command: {self.command}"]
        for key, value in self.arguments.items():
            lines.append(f"  {key}: {_format_argument(value)}")
        if self.verdicts:
            lines.append("verdicts:")
            lines.extend(f"  {key}: {value}" for key, value in self.verdicts.items())
        for table in self.tables:
            lines.append(f"table {table.name}:")
            width = max((len(entry.label) for entry in table.entries), default=0)
            for entry in table.entries:
                lines.append(
                    f"  {entry.label.ljust(width)}  {format_number(entry.value)}  (tol {entry.tolerance:.1e})"
                )
        if self.residuals:
            lines.append("residuals:")
            for entry in self.residuals:
                lines.append(f"  {entry.label}: {entry.value.real:.3e}  (tol {entry.tolerance:.1e})")
        if self.state_specs:
            lines.append("states:")
            for key, spec in self.state_specs.items():
                lines.append(f"  {key}: {json.dumps(spec, sort_keys=True)}")
        if self.provenance:
            lines.append("provenance:")
            lines.extend(f"  {key}: {value:.1e}" for key, value in self.provenance.items())
        for note in self.notes:
            lines.append(f"note: {note}")
        return "\n".join(lines) + "\n"

    def render(self, output_format: str) -> str:
        return self.to_structured() + "\n" if output_format == "structured" else self.to_text()


def format_number(value: complex) -> str:
    if value.imag == 0.0:
        return f"{value.real:.15g}"
    return f"{value.real:.15g}{value.imag:+.15g}j"


def _format_argument(value: Any) -> str:
    if isinstance(value, (list, tuple)):
        return ", ".join(str(item) for item in value)
    return str(value)
