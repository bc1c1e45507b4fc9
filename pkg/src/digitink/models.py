"""Builders for the two stock architectures and the structural audit.

The audit compares two independent paths to the same numbers: output
sizes observed by actually running a forward pass and parameter counts
read from the allocated arrays, against the hard-coded reference tables
below.  Nothing in the audit is computed from the reference data.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import AuditError
from .nn import spec
from .nn.network import Network
from .nn.spec import LayerSpec

POLAR_SEQUENCE_LENGTH = 130
BITMAP_SIDE = 28
CLASS_COUNT = 10

INPUT_MODES = ("angle", "distance", "both")


@dataclass(frozen=True)
class ModelSpec:
    """Whole-network description; layer list is fixed per architecture."""

    name: str
    input_shape: tuple[int, ...]
    layers: tuple[LayerSpec, ...]
    input_mode: Optional[str] = None
    class_count: int = CLASS_COUNT

    def build(self, *, rng: np.random.Generator, dtype=np.float32) -> Network:
        return Network(self.input_shape, self.layers, rng=rng, dtype=dtype)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "input_shape": list(self.input_shape),
            "input_mode": self.input_mode,
            "class_count": self.class_count,
            "layers": [layer.to_dict() for layer in self.layers],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ModelSpec":
        return cls(
            name=data["name"],
            input_shape=tuple(data["input_shape"]),
            layers=tuple(LayerSpec.from_dict(d) for d in data["layers"]),
            input_mode=data.get("input_mode"),
            class_count=data.get("class_count", CLASS_COUNT),
        )


def build_bitmap_model() -> ModelSpec:
    """2D model: two same-padded 5x5 conv/pool blocks and two dense layers."""
    layers = (
        spec.conv2d(5, 32, "same"),
        spec.relu(),
        spec.maxpool2d(2),
        spec.conv2d(5, 64, "same"),
        spec.relu(),
        spec.maxpool2d(2),
        spec.flatten(),
        spec.dense(512),
        spec.relu(),
        spec.dropout(0.5),
        spec.dense(CLASS_COUNT),
        spec.softmax(),
    )
    return ModelSpec("bitmap2d", (BITMAP_SIDE, BITMAP_SIDE, 1), layers)


def build_polar_model(input_mode: str = "both") -> ModelSpec:
    """1D model over the 130-step polar vector sequence.

    The first three convolutions are valid; the fourth keeps its length
    (28 in, 28 out), which forces same padding there.
    """
    if input_mode not in INPUT_MODES:
        raise ValueError(f"input_mode must be one of {INPUT_MODES}, got {input_mode!r}")
    channels = 2 if input_mode == "both" else 1
    layers = (
        spec.conv1d(5, 32, "valid"),
        spec.relu(),
        spec.dropout(0.25),
        spec.conv1d(5, 32, "valid"),
        spec.relu(),
        spec.maxpool1d(2),
        spec.dropout(0.25),
        spec.conv1d(5, 64, "valid"),
        spec.relu(),
        spec.maxpool1d(2),
        spec.dropout(0.25),
        spec.conv1d(5, 128, "same"),
        spec.relu(),
        spec.maxpool1d(2),
        spec.dropout(0.25),
        spec.flatten(),
        spec.dense(128),
        spec.relu(),
        spec.dropout(0.25),
        spec.dense(CLASS_COUNT),
        spec.softmax(),
    )
    return ModelSpec("polar1d", (POLAR_SEQUENCE_LENGTH, channels), layers, input_mode=input_mode)


def build_model(name: str, input_mode: str = "both") -> ModelSpec:
    if name == "bitmap2d":
        return build_bitmap_model()
    if name == "polar1d":
        return build_polar_model(input_mode)
    raise ValueError(f"unknown model {name!r} (expected bitmap2d or polar1d)")


def count_parameters(model: ModelSpec) -> int:
    """Closed-form total, independent of any allocated network."""
    total = 0
    shape = model.input_shape
    for layer in model.layers:
        total += layer.parameter_count(shape)
        shape = layer.output_shape(shape)
    return total


# -- audit reference tables -------------------------------------------------
# (kind, output size, feature count, parameter count) per accounted row.
# Activation rows are omitted, matching the published accounting.

BITMAP_REFERENCE_ROWS = (
    ("conv2d", "28x28", 32, 832),
    ("maxpool2d", "14x14", None, 0),
    ("conv2d", "14x14", 64, 51264),
    ("maxpool2d", "7x7", None, 0),
    ("dense", "512", None, 1_606_144),
    ("dropout", "512", None, 0),
    ("dense", "10", None, 5130),
)
BITMAP_TOTAL_PARAMETERS = 1_663_370

POLAR_REFERENCE_ROWS_BOTH = (
    ("conv1d", "126", 32, 352),
    ("dropout", "126", None, 0),
    ("conv1d", "122", 32, 5152),
    ("maxpool1d", "61", None, 0),
    ("dropout", "61", None, 0),
    ("conv1d", "57", 64, 10304),
    ("maxpool1d", "28", None, 0),
    ("dropout", "28", None, 0),
    ("conv1d", "28", 128, 41088),
    ("maxpool1d", "14", None, 0),
    ("dropout", "14", None, 0),
    ("flatten", "1792", None, 0),
    ("dense", "128", None, 229_504),
    ("dropout", "128", None, 0),
    ("dense", "10", None, 1290),
)
POLAR_TOTAL_PARAMETERS_BOTH = 287_690
# Single-channel variants differ only in the first convolution (5*1*32+32).
POLAR_FIRST_CONV_PARAMETERS_SINGLE = 192
POLAR_TOTAL_PARAMETERS_SINGLE = 287_530


def _reference_for(model: ModelSpec):
    if model.name == "bitmap2d":
        return BITMAP_REFERENCE_ROWS, BITMAP_TOTAL_PARAMETERS
    if model.name == "polar1d":
        if model.input_mode == "both":
            return POLAR_REFERENCE_ROWS_BOTH, POLAR_TOTAL_PARAMETERS_BOTH
        rows = list(POLAR_REFERENCE_ROWS_BOTH)
        first = list(rows[0])
        first[3] = POLAR_FIRST_CONV_PARAMETERS_SINGLE
        rows[0] = tuple(first)
        return tuple(rows), POLAR_TOTAL_PARAMETERS_SINGLE
    raise ValueError(f"no audit reference for model {model.name!r}")


@dataclass
class AuditRow:
    row: int
    kind: str
    output_size: str
    features: Optional[int]
    parameters: int
    expected_output_size: str
    expected_features: Optional[int]
    expected_parameters: int

    @property
    def ok(self) -> bool:
        return (
            self.output_size == self.expected_output_size
            and self.features == self.expected_features
            and self.parameters == self.expected_parameters
        )


@dataclass
class AuditReport:
    model: str
    rows: list[AuditRow] = field(default_factory=list)
    total_parameters: int = 0
    expected_total_parameters: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def format_table(self) -> str:
        lines = [
            f"audit: {self.model}",
            f"{'row':>3}  {'layer':<10} {'output':>8} {'F#':>5} {'P#':>9}  status",
        ]
        for r in self.rows:
            feat = "-" if r.features is None else str(r.features)
            status = "ok" if r.ok else f"MISMATCH (expected {r.expected_output_size}, {r.expected_parameters})"
            lines.append(
                f"{r.row:>3}  {r.kind:<10} {r.output_size:>8} {feat:>5} {r.parameters:>9}  {status}"
            )
        verdict = "PASS" if self.passed else "FAIL"
        lines.append(
            f"total parameters: {self.total_parameters} "
            f"(expected {self.expected_total_parameters}) -> {verdict}"
        )
        return "\n".join(lines)


def _format_size(shape: tuple[int, ...]) -> str:
    if len(shape) == 3:  # (H, W, C): table reports the spatial extent
        return f"{shape[0]}x{shape[1]}"
    return str(shape[0])


def audit(model: ModelSpec, *, seed: int = 0) -> AuditReport:
    """Run a forward pass and compare observed shapes and allocated
    parameter counts against the embedded reference table."""
    reference_rows, expected_total = _reference_for(model)
    network = model.build(rng=np.random.default_rng(seed))
    x = np.zeros((1,) + model.input_shape, dtype=np.float32)
    observed = []  # (kind, out_shape, features, params) per network layer
    for layer in network.layers:
        x = layer.forward(x, train=False)
        params = layer.parameter_count if layer.has_params else 0
        observed.append((layer.spec.kind, x.shape[1:], layer.spec.feature_count, params))

    report = AuditReport(
        model=model.name if model.input_mode is None else f"{model.name}[{model.input_mode}]",
        expected_total_parameters=expected_total,
    )
    report.total_parameters = network.parameter_count

    pos = 0
    for i, (kind, exp_size, exp_feat, exp_params) in enumerate(reference_rows, start=1):
        while pos < len(observed) and observed[pos][0] != kind:
            pos += 1
        if pos == len(observed):
            report.failures.append(f"row {i}: no {kind} layer found in the network")
            continue
        okind, oshape, ofeat, oparams = observed[pos]
        pos += 1
        row = AuditRow(
            row=i,
            kind=okind,
            output_size=_format_size(oshape),
            features=ofeat if okind.startswith("conv") else None,
            parameters=oparams,
            expected_output_size=exp_size,
            expected_features=exp_feat,
            expected_parameters=exp_params,
        )
        report.rows.append(row)
        if not row.ok:
            report.failures.append(
                f"row {i} ({okind}): expected size {exp_size} / {exp_params} parameters, "
                f"got {row.output_size} / {oparams}"
            )
    if report.total_parameters != expected_total:
        report.failures.append(
            f"total parameters: expected {expected_total}, got {report.total_parameters}"
        )
    return report


def require_audit(model: ModelSpec) -> AuditReport:
    """Audit and raise on failure (used by the service at startup)."""
    report = audit(model)
    if not report.passed:
        raise AuditError("; ".join(report.failures))
    return report
