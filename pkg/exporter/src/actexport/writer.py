"""Standalone writer for the ADATRACE activation-trace format.

Deliberately self-contained: this tool talks to the selection toolkit
only through the bytes it emits, so the format is re-implemented here
from its definition rather than imported.

    magic   8 bytes   ASCII "ADATRACE"
    version u32 LE    1
    hlen    u32 LE    JSON header byte length
    header  UTF-8 JSON {"model","L","T","d","dtype":"f32"}
    payload L tensors, each T*d float32 LE, row-major, layer 0 first
"""

import json
import struct

import numpy as np

MAGIC = b"ADATRACE"
VERSION = 1


def write_trace(model_name, layers, path):
    """layers: sequence of (T, d) float arrays, one per block, in order."""
    if not layers:
        raise ValueError("a trace must contain at least one layer")
    shape = layers[0].shape
    if len(shape) != 2 or min(shape) < 1:
        raise ValueError(f"layers must be T x d matrices, got {shape}")
    for i, layer in enumerate(layers):
        if layer.shape != shape:
            raise ValueError(f"layer {i} shape {layer.shape} != {shape}")
        if not np.all(np.isfinite(layer)):
            raise ValueError(f"layer {i} contains non-finite activations")
    T, d = shape
    header = json.dumps(
        {"model": model_name, "L": len(layers), "T": int(T), "d": int(d), "dtype": "f32"},
        separators=(",", ":"),
    ).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<II", VERSION, len(header)))
        fh.write(header)
        for layer in layers:
            fh.write(np.ascontiguousarray(layer, dtype="<f4").tobytes())
