import numpy as np
import pytest
import torch
from PIL import Image
from transformers import (BertConfig, BertModel, BertTokenizer, ViTConfig,
                          ViTImageProcessor, ViTModel)

VOCAB = ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]",
         "a", "dog", "robot", "kiosk", "vacuum", "toy", "the", "from", "rosie"]


@pytest.fixture(scope="session")
def text_checkpoint(tmp_path_factory):
    """Tiny randomly-initialized BERT checkpoint saved locally (no hub access)."""
    d = tmp_path_factory.mktemp("text-model")
    vocab_file = d / "vocab.txt"
    vocab_file.write_text("\n".join(VOCAB) + "\n")
    BertTokenizer(str(vocab_file)).save_pretrained(d)
    torch.manual_seed(0)
    config = BertConfig(vocab_size=len(VOCAB), hidden_size=16, num_hidden_layers=1,
                        num_attention_heads=2, intermediate_size=32,
                        max_position_embeddings=32)
    BertModel(config).save_pretrained(d)
    return str(d)


@pytest.fixture(scope="session")
def vision_checkpoint(tmp_path_factory):
    """Tiny randomly-initialized ViT checkpoint with a 32x32 processor."""
    d = tmp_path_factory.mktemp("vision-model")
    torch.manual_seed(1)
    config = ViTConfig(image_size=32, patch_size=16, hidden_size=16,
                       num_hidden_layers=1, num_attention_heads=2,
                       intermediate_size=32)
    ViTModel(config).save_pretrained(d)
    ViTImageProcessor(size={"height": 32, "width": 32}).save_pretrained(d)
    return str(d)


def make_image(path, seed):
    rng = np.random.default_rng(seed)
    pixels = rng.integers(0, 256, size=(32, 32, 3), dtype=np.uint8)
    Image.fromarray(pixels, "RGB").save(path)


@pytest.fixture
def asset_fixture(tmp_path):
    """Three-asset manifest with images and metaphors."""
    for i in range(3):
        make_image(tmp_path / f"robot{i}.png", seed=i)
    manifest = tmp_path / "manifest.csv"
    manifest.write_text(
        "id,image_path,metaphor1,metaphor2,metaphor3\n"
        "alpha,robot0.png,a dog,a toy,\n"
        "beta,robot1.png,a kiosk,,\n"
        "gamma,robot2.png,rosie the robot,a vacuum,a toy\n")
    return manifest
