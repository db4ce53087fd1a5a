import numpy as np
import pytest

from app.services.model_io import peek_kind, read_container, write_container
from app.utils.enums import ModelKind
from app.utils.error_handling import ModelFormatError


@pytest.fixture
def container(tmp_path):
    path = tmp_path / "model.dsm"
    arrays = {
        "ids": np.arange(5, dtype=np.int64),
        "block": np.linspace(0.0, 1.0, 12).reshape(3, 4),
        "empty": np.zeros(0, dtype=np.int32),
    }
    write_container(path, ModelKind.WEIGHTED, {"scheme": "PPMI", "window": 2}, arrays)
    return path, arrays


def test_round_trip(container):
    path, arrays = container
    kind, meta, loaded = read_container(path)
    assert kind is ModelKind.WEIGHTED
    assert meta == {"scheme": "PPMI", "window": 2}
    assert set(loaded) == set(arrays)
    for name, arr in arrays.items():
        assert loaded[name].dtype == arr.dtype
        assert np.array_equal(loaded[name], arr)


def test_write_is_deterministic(tmp_path, container):
    path, arrays = container
    again = tmp_path / "again.dsm"
    write_container(again, ModelKind.WEIGHTED, {"window": 2, "scheme": "PPMI"}, dict(reversed(list(arrays.items()))))
    assert again.read_bytes() == path.read_bytes()


def test_peek_kind(container):
    path, _ = container
    assert peek_kind(path) is ModelKind.WEIGHTED


def test_wrong_kind_is_rejected(container):
    path, _ = container
    with pytest.raises(ModelFormatError):
        read_container(path, ModelKind.DENSE)


def test_bad_magic(tmp_path, container):
    path, _ = container
    data = bytearray(path.read_bytes())
    data[:4] = b"NOPE"
    path.write_bytes(bytes(data))
    with pytest.raises(ModelFormatError) as err:
        read_container(path)
    assert err.value.offset == 0


def test_checksum_mismatch(container):
    path, _ = container
    data = bytearray(path.read_bytes())
    data[-5] ^= 0xFF
    path.write_bytes(bytes(data))
    with pytest.raises(ModelFormatError, match="Checksum"):
        read_container(path)


def test_truncated_file_reports_offset(container):
    path, _ = container
    data = path.read_bytes()
    path.write_bytes(data[:40])
    with pytest.raises(ModelFormatError) as err:
        read_container(path)
    assert 0 < err.value.offset <= 40


def test_too_short_file(tmp_path):
    path = tmp_path / "tiny.dsm"
    path.write_bytes(b"DSM")
    with pytest.raises(ModelFormatError):
        read_container(path)
