"""Network building, grid detector, feature store and checkpoint contracts."""

import numpy as np
import pytest

from gesturedigits.dataset import YoloAnnotation, build_label_map
from gesturedigits.errors import (
    ArchitectureMismatchError,
    CheckpointVersionError,
    ContractViolation,
    NotACheckpointError,
    TruncatedCheckpointError,
)
from gesturedigits.models import (
    DetectorConfig,
    FeatureStore,
    build_classifier,
    build_detector,
    decode_grid,
    detector_loss,
    detector_loss_grad,
    encode_targets,
    extract_gesture_features,
    iou,
    load_checkpoint,
    load_checkpoint_into,
    load_feature_store,
    nearest_match,
    nms,
    save_checkpoint,
    save_feature_store,
    set_trainable,
)
from gesturedigits.nn import sgd_step


def grid_aligned_box(rng, cells=100):
    """Random box with corners on the 1/cells lattice, as (cx, cy, w, h)."""
    x0 = int(rng.integers(0, cells))
    x1 = int(rng.integers(x0 + 1, cells + 1))
    y0 = int(rng.integers(0, cells))
    y1 = int(rng.integers(y0 + 1, cells + 1))
    return ((x0 + x1) / (2 * cells), (y0 + y1) / (2 * cells),
            (x1 - x0) / cells, (y1 - y0) / cells), (x0, y0, x1, y1)


def brute_force_iou(a_cells, b_cells, cells=100):
    """Oracle: count occupied lattice cells directly."""
    grid_a = np.zeros((cells, cells), dtype=bool)
    grid_b = np.zeros((cells, cells), dtype=bool)
    ax0, ay0, ax1, ay1 = a_cells
    bx0, by0, bx1, by1 = b_cells
    grid_a[ay0:ay1, ax0:ax1] = True
    grid_b[by0:by1, bx0:bx1] = True
    inter = np.sum(grid_a & grid_b)
    union = np.sum(grid_a | grid_b)
    return inter / union


class TestIou:
    def test_identical_boxes(self):
        assert iou((0.5, 0.5, 0.2, 0.2), (0.5, 0.5, 0.2, 0.2)) == 1.0

    def test_disjoint_boxes(self):
        assert iou((0.2, 0.2, 0.1, 0.1), (0.8, 0.8, 0.1, 0.1)) == 0.0

    def test_corner_boxes_one_third(self):
        # pixel-form corners (0,0,2,2) and (1,0,3,2): intersection 2, union 6
        a = (1.0, 1.0, 2.0, 2.0)
        b = (2.0, 1.0, 2.0, 2.0)
        assert iou(a, b) == pytest.approx(1 / 3)

    def test_symmetry_and_bounds(self):
        rng = np.random.default_rng(15)
        for _ in range(200):
            (a, _), (b, _) = grid_aligned_box(rng), grid_aligned_box(rng)
            v = iou(a, b)
            assert 0.0 <= v <= 1.0
            assert v == pytest.approx(iou(b, a), abs=1e-15)

    def test_matches_pixel_grid_oracle(self):
        rng = np.random.default_rng(99)
        for _ in range(300):
            (a, a_cells) = grid_aligned_box(rng)
            (b, b_cells) = grid_aligned_box(rng)
            assert iou(a, b) == pytest.approx(brute_force_iou(a_cells, b_cells), abs=1e-9)


class TestEncodeDecode:
    CFG = DetectorConfig(grid_size=3, boxes_per_cell=1, num_classes=6)

    def test_center_cell(self):
        grid = encode_targets([YoloAnnotation(2, 0.5, 0.5, 0.2, 0.2)], self.CFG)
        assert grid[1, 1, 4] == 1.0
        assert grid[1, 1, 0] == pytest.approx(0.5)
        assert grid[1, 1, 1] == pytest.approx(0.5)
        assert grid[1, 1, 5 + 2] == 1.0

    def test_origin_boundary(self):
        # center exactly at (0,0); the box must shrink to honor the unit square
        grid = encode_targets([YoloAnnotation(0, 0.0, 0.0, 2e-6, 2e-6)], self.CFG)
        assert grid[0, 0, 4] == 1.0
        assert grid[0, 0, 0] == 0.0 and grid[0, 0, 1] == 0.0

    def test_far_corner_clamped(self):
        grid = encode_targets([YoloAnnotation(0, 1.0, 1.0, 2e-6, 2e-6)], self.CFG)
        assert grid[2, 2, 4] == 1.0

    def test_later_annotation_wins_contested_cell(self):
        anns = [YoloAnnotation(1, 0.5, 0.5, 0.2, 0.2),
                YoloAnnotation(3, 0.52, 0.52, 0.4, 0.4)]
        grid = encode_targets(anns, self.CFG)
        assert grid[1, 1, 5 + 3] == 1.0
        assert grid[1, 1, 5 + 1] == 0.0
        assert grid[1, 1, 2] == pytest.approx(np.sqrt(0.4))

    def test_class_out_of_range(self):
        with pytest.raises(ContractViolation):
            encode_targets([YoloAnnotation(6, 0.5, 0.5, 0.2, 0.2)], self.CFG)

    def test_round_trip_uncontested(self):
        anns = [YoloAnnotation(0, 0.2, 0.3, 0.15, 0.25),
                YoloAnnotation(4, 0.8, 0.7, 0.3, 0.1)]
        grid = encode_targets(anns, self.CFG)
        decoded = decode_grid(grid, self.CFG, confidence_threshold=0.5)
        assert len(decoded) == 2
        recovered = {d[1]: d[0] for d in decoded}
        for ann in anns:
            cx, cy, w, h = recovered[ann.class_id]
            assert cx == pytest.approx(ann.cx, abs=1e-12)
            assert cy == pytest.approx(ann.cy, abs=1e-12)
            assert w == pytest.approx(ann.w, abs=1e-12)
            assert h == pytest.approx(ann.h, abs=1e-12)


class TestNms:
    def test_greedy_suppression(self):
        a = ((0.4, 0.5, 0.4, 0.4), 0, 0.9)
        b = ((0.45, 0.5, 0.4, 0.4), 0, 0.8)
        assert iou(a[0], b[0]) > 0.5
        kept = nms([b, a], 0.5)
        assert kept == [a]

    def test_disjoint_both_kept(self):
        a = ((0.2, 0.2, 0.1, 0.1), 0, 0.9)
        b = ((0.8, 0.8, 0.1, 0.1), 0, 0.8)
        assert nms([a, b], 0.5) == [a, b]

    def test_different_classes_both_kept(self):
        box = (0.5, 0.5, 0.2, 0.2)
        kept = nms([(box, 0, 0.9), (box, 1, 0.8)], 0.5)
        assert len(kept) == 2

    def test_score_ties_keep_input_order(self):
        a = ((0.2, 0.2, 0.1, 0.1), 0, 0.7)
        b = ((0.8, 0.8, 0.1, 0.1), 0, 0.7)
        assert nms([a, b], 0.5) == [a, b]

    def test_score_out_of_range(self):
        with pytest.raises(ContractViolation):
            nms([((0.5, 0.5, 0.1, 0.1), 0, 1.5)], 0.5)


class TestDetectorLoss:
    CFG = DetectorConfig(grid_size=2, boxes_per_cell=1, num_classes=3,
                         lambda_coord=5.0, lambda_noobj=0.5)

    def _target(self):
        return encode_targets([YoloAnnotation(1, 0.3, 0.3, 0.2, 0.4)], self.CFG)

    def test_perfect_prediction_zero_loss(self):
        t = self._target()
        loss = detector_loss(t, t, self.CFG)
        assert loss.total == 0.0
        assert (loss.localization, loss.confidence, loss.classification,
                loss.regularization) == (0.0, 0.0, 0.0, 0.0)

    def test_zero_weights_zero_regularization(self):
        net = build_detector(2, 1, 3, input_side=16, seed=0)
        zeroed = {k: np.zeros_like(v) for k, v in net.params().items()}
        net.assign_params(zeroed)
        cfg = DetectorConfig(grid_size=2, boxes_per_cell=1, num_classes=3,
                             weight_decay=10.0)
        t = encode_targets([YoloAnnotation(1, 0.3, 0.3, 0.2, 0.4)], cfg)
        loss = detector_loss(t, t, cfg, network=net)
        assert loss.regularization == 0.0

    def test_single_offset_error(self):
        t = self._target()
        pred = t.copy()
        pred[0, 0, 0] += 0.1  # responsible cell is (row 0, col 0)
        assert t[0, 0, 4] == 1.0
        loss = detector_loss(pred, t, self.CFG)
        assert loss.localization == pytest.approx(5.0 * 0.1 ** 2)
        assert loss.confidence == 0.0 and loss.classification == 0.0

    def test_noobj_weighting(self):
        t = self._target()
        pred = t.copy()
        pred[1, 1, 4] = 0.2  # non-responsible cell confidence
        loss = detector_loss(pred, t, self.CFG)
        assert loss.confidence == pytest.approx(0.5 * 0.2 ** 2)

    def test_components_nonnegative(self):
        rng = np.random.default_rng(3)
        t = self._target()
        for _ in range(25):
            pred = rng.standard_normal(t.shape)
            loss = detector_loss(pred, t, self.CFG)
            assert min(loss.total, loss.localization, loss.confidence,
                       loss.classification, loss.regularization) >= 0.0

    def test_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(42)
        t = self._target()
        pred = rng.standard_normal(t.shape)
        analytic = detector_loss_grad(pred, t, self.CFG)
        eps = 1e-5
        numeric = np.zeros_like(pred)
        flat = pred.reshape(-1)
        nflat = numeric.reshape(-1)
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + eps
            hi = detector_loss(pred, t, self.CFG).total
            flat[i] = orig - eps
            lo = detector_loss(pred, t, self.CFG).total
            flat[i] = orig
            nflat[i] = (hi - lo) / (2 * eps)
        scale = max(np.abs(analytic).max(), np.abs(numeric).max(), 1e-6)
        assert np.abs(analytic - numeric).max() / scale <= 1e-4

    def test_shape_mismatch(self):
        with pytest.raises(ContractViolation):
            detector_loss(np.zeros((3, 3, 8)), self._target(), self.CFG)


class TestNetworks:
    def test_classifier_final_dense_parameters(self):
        net = build_classifier(6, 32, seed=0)
        params = net.params()
        assert params["dense2.weights"].shape == (6, 64)
        assert params["dense2.weights"].size + params["dense2.bias"].size == 390

    def test_forward_probabilities(self):
        net = build_classifier(6, 32, seed=1)
        rng = np.random.default_rng(0)
        probs = net.forward(rng.random((1, 32, 32)))
        assert probs.shape == (6,)
        assert abs(probs.sum() - 1.0) <= 1e-12
        assert (probs > 0).all()

    def test_seeded_builds_identical(self):
        a = build_classifier(4, 16, seed=7).params()
        b = build_classifier(4, 16, seed=7).params()
        for name in a:
            np.testing.assert_array_equal(a[name], b[name])

    def test_different_seed_differs(self):
        a = build_classifier(4, 16, seed=1).params()
        b = build_classifier(4, 16, seed=2).params()
        assert any(not np.array_equal(a[n], b[n]) for n in a)

    def test_invalid_side_rejected(self):
        with pytest.raises(ContractViolation):
            build_classifier(4, 30)
        with pytest.raises(ContractViolation):
            build_classifier(4, 12)

    def test_detector_head_size(self):
        net = build_detector(3, 1, 6, input_side=96, seed=0)
        assert net.output_shape == (3 * 3 * (5 + 6),)
        assert net.softmax_head is False

    def test_backward_produces_all_trainable_grads(self):
        net = build_classifier(3, 16, seed=0)
        x = np.random.default_rng(1).random((1, 16, 16))
        logits, cache = net.forward_collect(x)
        grads = net.backward(cache, np.ones_like(logits))
        assert set(grads) == set(net.params())


class TestSetTrainable:
    def test_frozen_convs_bit_identical_after_step(self):
        net = build_classifier(3, 16, seed=0)
        set_trainable(net, "conv", False)
        before = {k: v.copy() for k, v in net.params().items()}
        x = np.random.default_rng(2).random((1, 16, 16))
        logits, cache = net.forward_collect(x)
        grads = net.backward(cache, np.ones_like(logits))
        updated = sgd_step(net.params(), grads, 0.1, 0.0, frozen=net.frozen_names())
        net.assign_params(updated)
        after = net.params()
        for name in before:
            if name.startswith("conv"):
                np.testing.assert_array_equal(after[name], before[name])
            elif name.startswith("dense"):
                assert not np.array_equal(after[name], before[name])

    def test_head_only_trainable_count(self):
        net = build_classifier(6, 32, seed=0)
        set_trainable(net, "", False)
        set_trainable(net, "dense2", True)
        assert net.trainable_parameter_count() == 390

    def test_unfreeze_resumes_updates(self):
        net = build_classifier(3, 16, seed=0)
        set_trainable(net, "conv1", False)
        set_trainable(net, "conv1", True)
        x = np.random.default_rng(3).random((1, 16, 16))
        logits, cache = net.forward_collect(x)
        grads = net.backward(cache, np.ones_like(logits))
        updated = sgd_step(net.params(), grads, 0.1, frozen=net.frozen_names())
        assert not np.array_equal(updated["conv1.kernels"], net.params()["conv1.kernels"])

    def test_unknown_prefix_rejected(self):
        net = build_classifier(3, 16, seed=0)
        with pytest.raises(ContractViolation, match="bogus"):
            set_trainable(net, "bogus", False)


class TestCheckpoints:
    def test_round_trip_bit_exact(self, tmp_path):
        net = build_classifier(5, 16, seed=3)
        path = tmp_path / "net.ckpt"
        save_checkpoint(net, 1234, path)
        loaded, step = load_checkpoint(path)
        assert step == 1234
        for name, value in net.params().items():
            np.testing.assert_array_equal(loaded.params()[name], value)
        assert loaded.descriptor_json() == net.descriptor_json()

    def test_wrong_magic(self, tmp_path):
        path = tmp_path / "junk.ckpt"
        path.write_bytes(b"NOTACKPT" + b"\x00" * 64)
        with pytest.raises(NotACheckpointError):
            load_checkpoint(path)

    def test_truncated_file(self, tmp_path):
        net = build_classifier(3, 16, seed=0)
        path = tmp_path / "net.ckpt"
        save_checkpoint(net, 1, path)
        path.write_bytes(path.read_bytes()[:100])
        with pytest.raises(TruncatedCheckpointError):
            load_checkpoint(path)

    def test_bad_version(self, tmp_path):
        net = build_classifier(3, 16, seed=0)
        path = tmp_path / "net.ckpt"
        save_checkpoint(net, 1, path)
        raw = bytearray(path.read_bytes())
        raw[8:10] = (99).to_bytes(2, "little")
        path.write_bytes(bytes(raw))
        with pytest.raises(CheckpointVersionError):
            load_checkpoint(path)

    def test_architecture_mismatch(self, tmp_path):
        six = build_classifier(6, 16, seed=0)
        ten = build_classifier(10, 16, seed=0)
        path = tmp_path / "six.ckpt"
        save_checkpoint(six, 7, path)
        with pytest.raises(ArchitectureMismatchError):
            load_checkpoint_into(ten, path)

    def test_load_into_matching(self, tmp_path):
        src = build_classifier(4, 16, seed=5)
        dst = build_classifier(4, 16, seed=6)
        path = tmp_path / "src.ckpt"
        save_checkpoint(src, 42, path)
        step = load_checkpoint_into(dst, path)
        assert step == 42
        for name, value in src.params().items():
            np.testing.assert_array_equal(dst.params()[name], value)


def identity_standardized_store(vectors_by_label):
    store = FeatureStore(build_label_map(list(vectors_by_label)))
    for label, vectors in vectors_by_label.items():
        for v in vectors:
            store.add(label, np.asarray(v, dtype=np.float64))
    store.mean = np.zeros(9)
    store.std = np.ones(9)
    return store


class TestFeatureStore:
    def test_exact_match_distance_zero(self):
        vec = np.arange(9.0)
        store = identity_standardized_store({"a": [vec], "b": [np.ones(9) * 5]})
        label, distance = nearest_match(store, vec)
        assert label == "a" and distance == 0.0

    def test_tie_breaks_to_smaller_id(self):
        v = np.zeros(9)
        store = identity_standardized_store({"b_second": [v + 1], "a_but_second_id": [v - 1]})
        # both at distance 1 from origin; "b_second" holds id 1
        label, distance = nearest_match(store, v)
        assert label == "b_second" and distance == pytest.approx(3.0)

    def test_hand_arithmetic(self):
        a = np.zeros(9)
        b = np.zeros(9)
        b[0] = 1.0
        store = identity_standardized_store({"A": [a], "B": [b]})
        query = np.zeros(9)
        query[0] = 0.4
        label, distance = nearest_match(store, query)
        assert label == "A" and distance == pytest.approx(0.4)

    def test_empty_store_rejected(self):
        store = FeatureStore(build_label_map(["a"]))
        with pytest.raises(ContractViolation):
            nearest_match(store, np.zeros(9))

    def test_distance_zero_iff_stored(self):
        rng = np.random.default_rng(8)
        vectors = {"a": [rng.random(9) for _ in range(3)],
                   "b": [rng.random(9) for _ in range(3)]}
        store = identity_standardized_store(vectors)
        for label, vecs in vectors.items():
            for v in vecs:
                _, d = nearest_match(store, v)
                assert d <= 1e-12
        _, d = nearest_match(store, rng.random(9) + 2.0)
        assert d > 1e-12

    def test_persistence_round_trip(self, tmp_path):
        rng = np.random.default_rng(10)
        store = FeatureStore(build_label_map(["one", "two"]))
        for label in ("one", "two"):
            for _ in range(4):
                store.add(label, rng.standard_normal(9) * rng.uniform(1e-8, 10))
        store.finalize()
        save_feature_store(store, tmp_path)
        loaded = load_feature_store(tmp_path)
        assert loaded.label_map == store.label_map
        np.testing.assert_array_equal(loaded.mean, store.mean)
        np.testing.assert_array_equal(loaded.std, store.std)
        for label in ("one", "two"):
            for a, b in zip(store.vectors[label], loaded.vectors[label]):
                np.testing.assert_array_equal(a, b)

    def test_extract_features_deterministic_and_invariant(self):
        from gesturedigits.dataset import SyntheticGestureSpec, gen_synthetic
        img, _, _ = gen_synthetic(SyntheticGestureSpec(finger_count=2), 5)
        f1 = extract_gesture_features(img)
        f2 = extract_gesture_features(img)
        np.testing.assert_array_equal(f1, f2)
        assert f1.shape == (9,)

    def test_solid_square_fill_and_aspect(self):
        from gesturedigits.imaging import ImageU8
        # skin-tone square centered on a non-skin background
        pixels = np.zeros((20, 20, 3), dtype=np.uint8)
        pixels[:] = (70, 90, 140)
        pixels[5:15, 5:15] = (172, 124, 90)
        feats = extract_gesture_features(ImageU8(pixels))
        assert feats[7] == pytest.approx(1.0)  # aspect
        assert feats[8] == pytest.approx(1.0)  # fill
