import numpy as np
import pytest

from sketch2site.synth import build_corpus


@pytest.fixture(scope="session")
def corpus():
    return build_corpus(seed=2018, per_class=18)


@pytest.fixture(scope="session")
def trained_params():
    """A container classifier good enough for end-to-end tests."""
    from sketch2site.mlp import TrainConfig, train
    from sketch2site.synth import gen_container_dataset

    data = gen_container_dataset(seed=400, n_per_class=220)
    params, _ = train(data, TrainConfig(seed=11, max_epochs=60, patience=5))
    return params


def glyph_on_page(glyph_img, page_shape=(560, 460), at=(60, 60)):
    page = np.zeros(page_shape, dtype=bool)
    y, x = at
    gh, gw = glyph_img.shape
    page[y : y + gh, x : x + gw] = glyph_img
    return page
