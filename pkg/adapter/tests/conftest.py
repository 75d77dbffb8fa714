import json
import os

import numpy as np
import pytest
from PIL import Image


@pytest.fixture(scope="session")
def tiny_checkpoint(tmp_path_factory):
    """A small randomly initialized CLIP checkpoint saved to disk.

    Uses a toy character-level vocabulary so the full load/encode path runs
    without network access.
    """
    import torch
    from transformers import (
        CLIPConfig,
        CLIPImageProcessor,
        CLIPModel,
        CLIPProcessor,
        CLIPTokenizer,
    )

    path = tmp_path_factory.mktemp("checkpoint")
    config = CLIPConfig(
        projection_dim=16,
        text_config={
            "hidden_size": 32, "intermediate_size": 64, "num_hidden_layers": 2,
            "num_attention_heads": 2, "vocab_size": 300,
            "max_position_embeddings": 64,
            "bos_token_id": 0, "eos_token_id": 1, "pad_token_id": 1,
        },
        vision_config={
            "hidden_size": 32, "intermediate_size": 64, "num_hidden_layers": 2,
            "num_attention_heads": 2, "image_size": 32, "patch_size": 16,
        },
    )
    torch.manual_seed(1234)
    CLIPModel(config).save_pretrained(path)

    vocab = {"<|startoftext|>": 0, "<|endoftext|>": 1}
    for c in "abcdefghijklmnopqrstuvwxyz0123456789.,'-{}":
        vocab[c] = len(vocab)
        vocab[c + "</w>"] = len(vocab)
    (path / "vocab.json").write_text(json.dumps(vocab))
    (path / "merges.txt").write_text("#version: 0.2\n")
    tokenizer = CLIPTokenizer(str(path / "vocab.json"), str(path / "merges.txt"))
    image_processor = CLIPImageProcessor(
        size={"shortest_edge": 32}, crop_size={"height": 32, "width": 32}
    )
    CLIPProcessor(image_processor=image_processor, tokenizer=tokenizer).save_pretrained(path)
    return str(path)


def make_dataset(root, class_names, per_class=4, seed=0):
    rng = np.random.default_rng(seed)
    for name in class_names:
        class_dir = os.path.join(root, name)
        os.makedirs(class_dir, exist_ok=True)
        for i in range(per_class):
            pixels = rng.uniform(0, 255, (40, 40, 3)).astype("uint8")
            Image.fromarray(pixels).save(os.path.join(class_dir, f"img_{i:02d}.png"))


@pytest.fixture(scope="session")
def tiny_dataset(tmp_path_factory):
    root = tmp_path_factory.mktemp("dataset")
    classes = ["farmland", "harbor", "forest"]
    make_dataset(str(root), classes, per_class=4)
    return str(root), classes


@pytest.fixture()
def manifest_kwargs(tiny_checkpoint, tiny_dataset, tmp_path):
    root, classes = tiny_dataset
    return {
        "model": tiny_checkpoint,
        "architecture": "tiny-test",
        "dataset_name": "toy3",
        "dataset_root": root,
        "class_names": classes,
        "output_dir": str(tmp_path / "out"),
        "templates": ["a satellite photo of {}.", "an aerial view of {}."],
        "batch_size": 5,
    }
