import pathlib

import pytest
import torch
from tokenizers import Tokenizer, models, pre_tokenizers, trainers
from transformers import GPT2Config, GPT2Model, PreTrainedTokenizerFast

DATA = pathlib.Path(__file__).resolve().parents[1] / "data"


@pytest.fixture(scope="session")
def mixed_text():
    return (DATA / "mixed_domain.txt").read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def toy_model_dir(tmp_path_factory, mixed_text):
    """A local 12-layer, 768-dim GPT-2-architecture model with random but
    seeded weights and a small BPE tokenizer trained on the sample text.
    Exercises the full export path without downloading anything."""
    target = tmp_path_factory.mktemp("toy_gpt2")

    tok = Tokenizer(models.BPE(unk_token="<unk>"))
    tok.pre_tokenizer = pre_tokenizers.ByteLevel(add_prefix_space=False)
    tok.train_from_iterator(
        [mixed_text], trainers.BpeTrainer(vocab_size=800, special_tokens=["<unk>"])
    )
    PreTrainedTokenizerFast(
        tokenizer_object=tok, unk_token="<unk>", model_max_length=2048
    ).save_pretrained(target)

    torch.manual_seed(0)
    config = GPT2Config(
        n_layer=12, n_embd=768, n_head=12, vocab_size=800, n_positions=2048,
        bos_token_id=0, eos_token_id=0,
    )
    GPT2Model(config).save_pretrained(target)
    return str(target)
