import struct

import numpy as np
import pytest

from transduct.errors import (
    CorruptPayloadError,
    DimensionError,
    KindMismatchError,
    UnknownFormatError,
    ZeroNormRowError,
)
from transduct.io import (
    ClassEmbeddings,
    EmbeddingMatrix,
    LabelVector,
    l2_normalize,
    load_embeddings,
    load_predictions,
    load_prompt_matrix,
    save_embeddings,
    save_predictions,
)

HEADER = struct.Struct("<4sHBBQQ")


def write_rste(path, kind, n, d, payload: bytes):
    with open(path, "wb") as fh:
        fh.write(HEADER.pack(b"RSTE", 1, kind, 0, n, d))
        fh.write(payload)


class TestRsteLoading:
    def test_image_header_arithmetic(self, tmp_path):
        """kind=image, N=3, d=2, 24-byte payload -> 3x2 matrix."""
        payload = np.arange(6, dtype="<f4").tobytes()
        assert len(payload) == 24
        path = tmp_path / "f.rste"
        write_rste(path, 0, 3, 2, payload)
        m = load_embeddings(path, "image", normalize=False)
        assert isinstance(m, EmbeddingMatrix)
        assert (m.n, m.d) == (3, 2)
        np.testing.assert_array_equal(m.data, np.arange(6).reshape(3, 2))

    def test_payload_size_mismatch(self, tmp_path):
        """N=4, d=2 declared but only 24 bytes: 4*2*4 = 32 != 24."""
        path = tmp_path / "bad.rste"
        write_rste(path, 0, 4, 2, np.arange(6, dtype="<f4").tobytes())
        with pytest.raises(CorruptPayloadError):
            load_embeddings(path, "image")

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "junk.bin"
        path.write_bytes(b"JUNKxxxxxxxxxxxxxxxxxxxxxxxx")
        with pytest.raises(UnknownFormatError):
            load_embeddings(path, "image")

    def test_kind_mismatch(self, tmp_path):
        path = tmp_path / "t.rste"
        write_rste(path, 1, 2, 2, np.ones(4, dtype="<f4").tobytes())
        with pytest.raises(KindMismatchError):
            load_embeddings(path, "image")

    def test_rejects_nan_payload(self, tmp_path):
        data = np.array([1.0, np.nan, 0.5, 0.5], dtype="<f4")
        path = tmp_path / "nan.rste"
        write_rste(path, 0, 2, 2, data.tobytes())
        with pytest.raises(CorruptPayloadError):
            load_embeddings(path, "image")

    def test_rejects_inf_payload(self, tmp_path):
        data = np.array([1.0, np.inf], dtype="<f4")
        path = tmp_path / "inf.rste"
        write_rste(path, 0, 2, 1, data.tobytes())
        with pytest.raises(CorruptPayloadError):
            load_embeddings(path, "image")

    def test_zero_dimension_rejected(self, tmp_path):
        path = tmp_path / "z.rste"
        write_rste(path, 0, 0, 2, b"")
        with pytest.raises(DimensionError):
            load_embeddings(path, "image")

    def test_labels_roundtrip(self, tmp_path):
        labels = np.array([0, 2, 1, 2], dtype=np.int64)
        path = tmp_path / "y.rste"
        save_embeddings(LabelVector(labels), path)
        back = load_embeddings(path, "labels")
        np.testing.assert_array_equal(back.labels, labels)

    def test_negative_labels_rejected(self, tmp_path):
        path = tmp_path / "neg.rste"
        write_rste(path, 2, 2, 1, np.array([-1, 0], dtype="<i8").tobytes())
        with pytest.raises(CorruptPayloadError):
            load_embeddings(path, "labels")

    def test_single_class_text_rejected(self, tmp_path):
        path = tmp_path / "one.rste"
        write_rste(path, 1, 1, 3, np.ones(3, dtype="<f4").tobytes())
        with pytest.raises(DimensionError):
            load_embeddings(path, "text")


class TestNpyLoading:
    def test_npy_float32_matrix(self, tmp_path):
        """little-endian float32, shape (5, 8) -> 5x8 matrix."""
        arr = np.random.default_rng(0).standard_normal((5, 8)).astype("<f4")
        path = tmp_path / "f.npy"
        np.save(path, arr)
        m = load_embeddings(path, "image", normalize=False)
        assert (m.n, m.d) == (5, 8)
        np.testing.assert_array_equal(m.data, arr.astype(np.float64))

    def test_npy_labels(self, tmp_path):
        path = tmp_path / "y.npy"
        np.save(path, np.array([1, 0, 3], dtype="<i8"))
        v = load_embeddings(path, "labels")
        np.testing.assert_array_equal(v.labels, [1, 0, 3])

    def test_npy_wrong_dtype(self, tmp_path):
        path = tmp_path / "f64.npy"
        np.save(path, np.zeros((3, 3), dtype=np.float64))
        with pytest.raises(UnknownFormatError):
            load_embeddings(path, "image")

    def test_npy_kind_mismatch(self, tmp_path):
        path = tmp_path / "f.npy"
        np.save(path, np.ones((3, 3), dtype="<f4"))
        with pytest.raises(KindMismatchError):
            load_embeddings(path, "labels")


class TestRoundTrip:
    def test_rste_bit_exact(self, tmp_path, rng):
        data = rng.standard_normal((7, 5)).astype(np.float32).astype(np.float64)
        path = tmp_path / "m.rste"
        save_embeddings(EmbeddingMatrix(data), path)
        back = load_embeddings(path, "image", normalize=False)
        assert np.array_equal(back.data, data)
        # byte layout reproduced exactly on re-save
        path2 = tmp_path / "m2.rste"
        save_embeddings(back, path2)
        assert path.read_bytes() == path2.read_bytes()

    def test_npy_roundtrip(self, tmp_path, rng):
        data = rng.standard_normal((4, 3)).astype(np.float32).astype(np.float64)
        path = tmp_path / "m.npy"
        save_embeddings(ClassEmbeddings(data), path)
        back = load_embeddings(path, "text", normalize=False)
        assert np.array_equal(back.data, data)

    def test_prompt_matrix_single_row(self, tmp_path):
        path = tmp_path / "p.rste"
        write_rste(path, 1, 1, 4, np.ones(4, dtype="<f4").tobytes())
        m = load_prompt_matrix(path)
        assert m.shape == (1, 4)


class TestL2Normalize:
    def test_three_four_five(self):
        m = l2_normalize(np.array([[3.0, 4.0]]))
        np.testing.assert_allclose(m, [[0.6, 0.8]], rtol=0, atol=1e-15)

    def test_unit_row_unchanged(self):
        m = l2_normalize(np.array([[1.0, 0.0]]))
        np.testing.assert_array_equal(m, [[1.0, 0.0]])

    def test_zero_row_raises(self):
        with pytest.raises(ZeroNormRowError):
            l2_normalize(np.array([[0.0, 0.0]]))

    def test_idempotent_bit_exact(self, rng):
        m = l2_normalize(rng.standard_normal((20, 33)))
        again = l2_normalize(m)
        assert np.array_equal(m, again)

    def test_wrapper_types_preserved(self, rng):
        m = EmbeddingMatrix(rng.standard_normal((3, 4)))
        out = l2_normalize(m)
        assert isinstance(out, EmbeddingMatrix) and out.normalized
        c = ClassEmbeddings(rng.standard_normal((3, 4)))
        out = l2_normalize(c)
        assert isinstance(out, ClassEmbeddings) and out.normalized

    def test_norms_within_tolerance(self, rng):
        out = l2_normalize(rng.standard_normal((50, 700)))
        np.testing.assert_allclose(np.linalg.norm(out, axis=1), 1.0, atol=1e-5)


class TestPredictionsCsv:
    def _report(self):
        from transduct.evaluate import build_report

        y = np.array([[0.25, 0.75], [0.9, 0.1]])
        return build_report(y, y)

    def test_row_count(self, tmp_path):
        path = tmp_path / "p.csv"
        save_predictions(self._report(), path)
        lines = path.read_text().strip().split("\n")
        assert len(lines) == 3
        assert lines[0] == "index,pred,confidence,p_0,p_1"

    def test_roundtrip_argmax_and_precision(self, tmp_path, rng):
        from transduct.evaluate import build_report

        z = rng.dirichlet(np.ones(4), size=9)
        report = build_report(z, z)
        path = tmp_path / "p.csv"
        save_predictions(report, path)
        idx, preds, conf, probs = load_predictions(path)
        np.testing.assert_array_equal(idx, np.arange(9))
        np.testing.assert_array_equal(preds, report.predictions)
        np.testing.assert_allclose(probs, z, atol=5e-7)
        np.testing.assert_allclose(conf, report.confidence, atol=5e-7)

    def test_unwritable_path(self):
        with pytest.raises(OSError):
            save_predictions(self._report(), "/nonexistent-dir/p.csv")
