"""actexport: dump per-layer hidden states of a GPT-2-style model into an
ADATRACE file for the selection toolkit.

    actexport --model gpt2 --input text.txt --max-tokens 512 --out run.trace
"""

import argparse
import sys

from .capture import ExportSpec, export_activations


def build_parser():
    parser = argparse.ArgumentParser(prog="actexport", description=__doc__)
    parser.add_argument("--model", required=True,
                        help="model id or local directory (GPT-2 architecture)")
    parser.add_argument("--input", required=True, help="UTF-8 text file")
    parser.add_argument("--max-tokens", type=int, default=512,
                        help="truncate the tokenized input to this length")
    parser.add_argument("--out", required=True, help="output trace path")
    parser.add_argument("--post-layernorm", action="store_true",
                        help="capture after the next block's input norm "
                             "instead of the raw residual stream")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with open(args.input, encoding="utf-8") as fh:
            text = fh.read()
        spec = ExportSpec(
            model_id=args.model,
            input_text=text,
            max_tokens=args.max_tokens,
            post_layernorm=args.post_layernorm,
        )
        meta = export_activations(spec, args.out)
    except (OSError, ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(
        f"wrote {args.out}: model={args.model} T={meta['tokens']} "
        f"d={meta['hidden_dim']} L={meta['num_layers']}"
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
