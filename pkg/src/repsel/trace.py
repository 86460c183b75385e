"""Activation-trace data model, on-disk format, and row normalization.

The trace file is the interchange format between activation producers
(synthetic generators, model exporters) and the selection tooling:

    magic   8 bytes   ASCII "ADATRACE"
    version u32 LE    1
    hlen    u32 LE    byte length of the JSON header
    header  hlen bytes UTF-8 JSON: {"model","L","T","d","dtype":"f32"}
    payload L tensors, each T*d float32 LE, row-major, layer 0 first

Scalars are float32 on disk; selection and attention arithmetic promote
to float64 in memory so threshold comparisons are not polluted by
accumulation error.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import FormatError, ZeroNormRow

MAGIC = b"ADATRACE"
FORMAT_VERSION = 1

# Rows with norm below this are degenerate tokens, not data.
ZERO_NORM_THRESHOLD = 1e-12


@dataclass(frozen=True)
class LayerActivation:
    """T x d hidden states of one layer; row t is token t."""

    layer_index: int
    data: np.ndarray

    @property
    def seq_len(self) -> int:
        return self.data.shape[0]

    @property
    def hidden_dim(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class UnitRowActivation:
    """Row-normalized activations plus the original row norms."""

    data: np.ndarray
    source_norms: np.ndarray


@dataclass(frozen=True)
class ActivationTrace:
    model_name: str
    num_layers: int
    seq_len: int
    hidden_dim: int
    layers: list[LayerActivation] = field(default_factory=list)

    def validate(self):
        """Check all trace invariants; raises FormatError on violation."""
        if self.num_layers < 1 or self.seq_len < 1 or self.hidden_dim < 1:
            raise FormatError(
                f"trace dims must be positive, got L={self.num_layers} "
                f"T={self.seq_len} d={self.hidden_dim}"
            )
        if len(self.layers) != self.num_layers:
            raise FormatError(
                f"expected {self.num_layers} layers, got {len(self.layers)}"
            )
        for i, layer in enumerate(self.layers):
            if layer.layer_index != i:
                raise FormatError(f"layer {i} has layer_index {layer.layer_index}")
            if layer.data.shape != (self.seq_len, self.hidden_dim):
                raise FormatError(
                    f"layer {i} shape {layer.data.shape} != "
                    f"({self.seq_len}, {self.hidden_dim})"
                )
            if not np.all(np.isfinite(layer.data)):
                raise FormatError(f"layer {i} contains non-finite entries")
        return self


def row_normalize(x: LayerActivation | np.ndarray) -> UnitRowActivation:
    """Scale every row to unit Euclidean norm, keeping the original norms.

    Raises ZeroNormRow for any row with norm below 1e-12: a zero hidden
    state indicates a trace bug, and silently clamping it would produce
    arbitrary cosines downstream.
    """
    data = x.data if isinstance(x, LayerActivation) else x
    data = np.asarray(data, dtype=np.float64)
    norms = np.linalg.norm(data, axis=1)
    bad = np.flatnonzero(norms < ZERO_NORM_THRESHOLD)
    if bad.size:
        raise ZeroNormRow(int(bad[0]))
    return UnitRowActivation(data=data / norms[:, None], source_norms=norms)


def _canonical_header(trace: ActivationTrace) -> bytes:
    # Fixed key order and separators so write(read(p)) is byte-identical.
    header = {
        "model": trace.model_name,
        "L": trace.num_layers,
        "T": trace.seq_len,
        "d": trace.hidden_dim,
        "dtype": "f32",
    }
    return json.dumps(header, separators=(",", ":")).encode("utf-8")


def write_trace(trace: ActivationTrace, path) -> None:
    """Serialize a trace to `path` in the binary format above."""
    trace.validate()
    header = _canonical_header(trace)
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<II", FORMAT_VERSION, len(header)))
        fh.write(header)
        for layer in trace.layers:
            fh.write(np.ascontiguousarray(layer.data, dtype="<f4").tobytes())


def read_trace(path) -> ActivationTrace:
    """Read and validate a trace file written by write_trace."""
    with open(path, "rb") as fh:
        magic = fh.read(len(MAGIC))
        if magic != MAGIC:
            raise FormatError(f"bad magic {magic!r}")
        fixed = fh.read(8)
        if len(fixed) != 8:
            raise FormatError("truncated fixed header")
        version, hlen = struct.unpack("<II", fixed)
        if version != FORMAT_VERSION:
            raise FormatError(f"unsupported version {version}")
        raw_header = fh.read(hlen)
        if len(raw_header) != hlen:
            raise FormatError("truncated JSON header")
        try:
            header = json.loads(raw_header.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise FormatError(f"unparseable header: {exc}") from exc
        for key in ("model", "L", "T", "d", "dtype"):
            if key not in header:
                raise FormatError(f"header missing {key!r}")
        if header["dtype"] != "f32":
            raise FormatError(f"unsupported dtype {header['dtype']!r}")
        L, T, d = int(header["L"]), int(header["T"]), int(header["d"])
        payload = fh.read()

    expected = L * T * d * 4
    if len(payload) != expected:
        raise FormatError(
            f"payload is {len(payload)} bytes, header declares {expected}"
        )
    values = np.frombuffer(payload, dtype="<f4")
    layers = [
        LayerActivation(layer_index=i, data=values[i * T * d : (i + 1) * T * d].reshape(T, d).copy())
        for i in range(L)
    ]
    trace = ActivationTrace(
        model_name=str(header["model"]),
        num_layers=L,
        seq_len=T,
        hidden_dim=d,
        layers=layers,
    )
    return trace.validate()
