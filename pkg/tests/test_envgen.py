import numpy as np
import pytest

from coverbot.envgen import GenConfig, Layout, furniture_catalog, generate, is_connected

from conftest import flood_fill_count


def test_catalog_shape():
    cat = furniture_catalog()
    assert len(cat) == 17
    assert [p.id for p in cat] == list(range(17))
    assert cat[0].mask.shape == (1, 1) and cat[0].mask.all()
    for p in cat:
        assert p.mask.any()
        assert p.mask.shape[0] <= 4 and p.mask.shape[1] <= 4
    # every piece is distinct up to rotation
    canon = set()
    for p in cat:
        forms = [np.rot90(p.mask, k) for k in range(4)]
        canon.add(min((f.shape, f.tobytes()) for f in forms))
    assert len(canon) == 17


def test_catalog_is_fixed():
    a, b = furniture_catalog(), furniture_catalog()
    assert all(np.array_equal(x.mask, y.mask) for x, y in zip(a, b))


def test_same_seed_identical():
    assert generate(GenConfig(seed=123)) == generate(GenConfig(seed=123))
    assert generate(GenConfig(seed=123)).to_text() == generate(GenConfig(seed=123)).to_text()


def test_no_pieces_gives_empty_room():
    for seed in range(20):
        lay = generate(GenConfig(seed=seed, max_pieces=0))
        assert not lay.cells.any() and lay.pieces_placed == 0


def test_invalid_config():
    with pytest.raises(ValueError):
        GenConfig(min_dim=9)
    with pytest.raises(ValueError):
        GenConfig(max_pieces=7)


def test_is_connected_examples():
    room = Layout(np.zeros((10, 10), dtype=bool), (0, 0))
    assert is_connected(room)
    split = np.zeros((10, 10), dtype=bool)
    split[5, :] = True
    assert not is_connected(Layout(split, (0, 0)))


def test_generated_layouts_properties():
    dims, counts = set(), set()
    for seed in range(300):
        lay = generate(GenConfig(seed=seed))
        assert 10 <= lay.rows <= 20 and 10 <= lay.cols <= 20
        assert not lay.cells[lay.base]
        assert flood_fill_count(lay.cells.tolist(), lay.base) == lay.empty_count
        assert is_connected(lay)
        assert lay.empty_count >= lay.rows * lay.cols - 6 * 16
        assert 0 <= lay.pieces_placed <= 6
        dims.add(lay.rows)
        counts.add(lay.pieces_placed)
    assert dims == set(range(10, 21))
    assert counts == set(range(7))


def test_layout_text_roundtrip():
    lay = generate(GenConfig(seed=42))
    text = lay.to_text()
    header, *body = text.splitlines()
    assert header == f"{lay.rows} {lay.cols} {lay.base[0]} {lay.base[1]}"
    assert len(body) == lay.rows and all(len(line) == lay.cols for line in body)
    assert text.endswith("\n")
    assert Layout.from_text(text) == lay


@pytest.mark.parametrize("bad", ["", "2 2 0 0\n..\n", "2 2 0 0\n..\n.o\n", "a b c d\n"])
def test_layout_text_rejects_malformed(bad):
    with pytest.raises(ValueError):
        Layout.from_text(bad)
