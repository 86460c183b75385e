"""Per-layer hidden-state capture for GPT-2-architecture models.

One deterministic forward pass in eval mode; a hook on every transformer
block records its output hidden states (the residual stream after the
block, before the next LayerNorm).  The optional post-layernorm capture
applies the normalization each block's output would receive on entry to
the next block (the final norm for the last block), for sensitivity
studies against the default capture point.
"""

from dataclasses import dataclass

import numpy as np
import torch
from transformers import AutoModel, AutoTokenizer

from .writer import write_trace


@dataclass(frozen=True)
class ExportSpec:
    model_id: str
    input_text: str
    max_tokens: int = 512
    post_layernorm: bool = False

    def __post_init__(self):
        if self.max_tokens < 1:
            raise ValueError("max_tokens must be >= 1")


class UnsupportedArchitecture(RuntimeError):
    pass


def _blocks(model):
    if not hasattr(model, "h") or not hasattr(model, "ln_f"):
        raise UnsupportedArchitecture(
            f"{type(model).__name__} does not expose GPT-2-style blocks "
            "(model.h) and final norm (model.ln_f)"
        )
    return list(model.h)


def capture_hidden_states(spec: ExportSpec):
    """Returns (layer_arrays, meta) for one forward pass over the input."""
    tokenizer = AutoTokenizer.from_pretrained(spec.model_id)
    model = AutoModel.from_pretrained(spec.model_id)
    model.eval()

    ids = tokenizer(spec.input_text, return_tensors="pt").input_ids
    if ids.numel() == 0:
        raise ValueError("input text tokenized to zero tokens")
    ids = ids[:, : spec.max_tokens]

    blocks = _blocks(model)
    captured = [None] * len(blocks)
    hooks = []

    def grab(index):
        def hook(_module, _inputs, output):
            hidden = output[0] if isinstance(output, tuple) else output
            captured[index] = hidden.detach()

        return hook

    for i, block in enumerate(blocks):
        hooks.append(block.register_forward_hook(grab(i)))
    try:
        with torch.no_grad():
            model(input_ids=ids)
    finally:
        for hook in hooks:
            hook.remove()

    if any(h is None for h in captured):
        raise UnsupportedArchitecture("some blocks never ran; unexpected model graph")

    if spec.post_layernorm:
        with torch.no_grad():
            normed = []
            for i, hidden in enumerate(captured):
                norm = blocks[i + 1].ln_1 if i + 1 < len(blocks) else model.ln_f
                normed.append(norm(hidden))
            captured = normed

    layers = [h.squeeze(0).to(torch.float32).cpu().numpy() for h in captured]
    meta = {
        "tokens": int(ids.shape[1]),
        "hidden_dim": int(layers[0].shape[1]),
        "num_layers": len(layers),
    }
    return layers, meta


def export_activations(spec: ExportSpec, out_path) -> dict:
    """Run the capture and write an ADATRACE file; returns the metadata."""
    layers, meta = capture_hidden_states(spec)
    write_trace(spec.model_id, [np.asarray(l) for l in layers], out_path)
    return meta
