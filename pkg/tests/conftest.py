import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from synth import random_dataset  # noqa: E402

from roboexpect.dataset import write_dataset  # noqa: E402


@pytest.fixture
def small_ds():
    return random_dataset()


@pytest.fixture
def small_ds_dir(tmp_path, small_ds):
    d = tmp_path / "data"
    write_dataset(small_ds, d)
    return d
