import numpy as np
import pytest

from slepmoments import (
    InvariantVector,
    LabeledDataset,
    NoiseSpec,
    ParameterError,
    classification_sweep,
    load_labeled_directory,
    make_synthetic_dataset,
    rotation_stability,
    train_classifier,
    write_pgm,
)
from slepmoments.harness import PROTOCOL_ANGLES_DEG, PROTOCOL_ORDERS, synthetic_images

GRID = (48, 96)
ORDERS = ((1, 1), (2, 1), (2, 2))


def test_stability_report_shape_and_std(basis64, test_image):
    report = rotation_stability(
        test_image, PROTOCOL_ANGLES_DEG, PROTOCOL_ORDERS, basis64, (64, 128)
    )
    assert report.values.shape == (8, 10)
    recomputed = report.values.std(axis=0)  # population convention
    assert np.abs(recomputed - report.std_row).max() < 1e-12
    assert report.metadata["generator"] == "pcg64"


def test_stability_std_invariant_to_angle_permutation(basis64, test_image):
    a = rotation_stability(test_image, (0, 90, 180), ORDERS, basis64, GRID)
    b = rotation_stability(test_image, (180, 0, 90), ORDERS, basis64, GRID)
    assert np.abs(np.sort(a.values, axis=0) - np.sort(b.values, axis=0)).max() < 1e-15
    assert np.abs(a.std_row - b.std_row).max() < 1e-12


def test_stability_single_angle_zero_std(basis64, test_image):
    report = rotation_stability(test_image, (0.0,), ORDERS, basis64, GRID)
    assert np.all(report.std_row == 0)


def test_stability_high_snr_matches_clean(basis64, test_image):
    clean = rotation_stability(test_image, (0, 35), ORDERS, basis64, GRID)
    quiet = rotation_stability(
        test_image, (0, 35), ORDERS, basis64, GRID, noise=NoiseSpec(300.0, 5)
    )
    assert np.abs(clean.values - quiet.values).max() < 1e-6


def test_stability_rejects_empty_angles(basis64, test_image):
    with pytest.raises(ParameterError):
        rotation_stability(test_image, (), ORDERS, basis64, GRID)


def test_stability_csv_layout(basis64, test_image):
    report = rotation_stability(test_image, (0, 90), ORDERS, basis64, GRID)
    lines = report.to_csv(precision=4).strip().split("\n")
    assert lines[0] == "angle_deg,phi_1_1,phi_2_1,phi_2_2"
    assert len(lines) == 1 + 2 + 1  # header, two angle rows, std row
    assert lines[-1].startswith("std,")
    assert "mean" in report.to_json()  # mean row carried by the JSON form


def _tiny_dataset():
    # two trivially separable classes in feature space
    items = []
    for i in range(4):
        items.append((InvariantVector(1, 1, np.array([0.0, float(i % 2)])), 1))
        items.append((InvariantVector(1, 1, np.array([10.0, float(i % 2)])), 2))
    return LabeledDataset(items=items, class_names={1: "low", 2: "high"})


def test_sweep_trivial_dataset_perfect_accuracy():
    report = classification_sweep(_tiny_dataset(), fractions=(0.5,), repeats=1, seed=3)
    assert report.mean_accuracy[0] == 1.0
    assert report.std_accuracy[0] == 0.0


def test_sweep_small_fraction_names_class():
    with pytest.raises(ParameterError, match="low"):
        classification_sweep(_tiny_dataset(), fractions=(0.1,), repeats=1, seed=3)


def test_sweep_is_deterministic():
    a = classification_sweep(_tiny_dataset(), fractions=(0.5, 0.7), repeats=3, seed=11)
    b = classification_sweep(_tiny_dataset(), fractions=(0.5, 0.7), repeats=3, seed=11)
    assert np.array_equal(a.mean_accuracy, b.mean_accuracy)
    assert np.array_equal(a.std_accuracy, b.std_accuracy)
    assert a.to_json() == b.to_json()


def test_sweep_unstratified_mode_runs():
    report = classification_sweep(
        _tiny_dataset(), fractions=(0.5,), repeats=2, seed=1, stratified=False
    )
    assert report.metadata["stratified"] is False


def test_sweep_rejects_bad_fraction():
    with pytest.raises(ParameterError):
        classification_sweep(_tiny_dataset(), fractions=(1.5,), repeats=1)


def test_synthetic_dataset_counts_and_determinism(basis64):
    ds = make_synthetic_dataset(6, 8, 1, seed=9, basis=basis64, grid=GRID)
    assert len(ds.items) == 48
    assert sorted(ds.class_names) == [1, 2, 3, 4, 5, 6]
    again = make_synthetic_dataset(6, 8, 1, seed=9, basis=basis64, grid=GRID)
    x1, y1 = ds.arrays()
    x2, y2 = again.arrays()
    assert np.array_equal(x1, x2) and np.array_equal(y1, y2)


def test_synthetic_dataset_rotations_multiply_items(basis64):
    ds = make_synthetic_dataset(2, 3, 2, seed=5, basis=basis64, grid=GRID)
    assert len(ds.items) == 12


def test_synthetic_classes_form_triplet_margins(basis64):
    ds = make_synthetic_dataset(2, 8, 1, seed=11, basis=basis64, grid=GRID)
    x, y = ds.arrays()
    a, b = x[y == 1], x[y == 2]
    good = total = 0
    for i in range(len(a)):
        for j in range(len(a)):
            if i == j:
                continue
            intra = np.linalg.norm(a[i] - a[j])
            for k in range(len(b)):
                total += 1
                good += np.linalg.norm(a[i] - b[k]) > intra
    assert good / total >= 0.95


def test_synthetic_dataset_rejects_single_class():
    with pytest.raises(ParameterError):
        make_synthetic_dataset(1, 4)


def test_train_classifier_on_dataset(basis64):
    ds = make_synthetic_dataset(3, 4, 1, seed=2, basis=basis64, grid=GRID)
    model = train_classifier(ds, reg=1e-3, epochs=200, seed=2)
    x, y = ds.arrays()
    assert (model.predict(x) == y).mean() == 1.0


def test_directory_ingestion_round_trip(tmp_path, basis64):
    for class_name, stem, image in synthetic_images(2, 3, 1, seed=4, image_size=64):
        cdir = tmp_path / class_name
        cdir.mkdir(exist_ok=True)
        (cdir / f"{stem}.pgm").write_bytes(write_pgm(image))
    ds = load_labeled_directory(tmp_path, basis=basis64, grid=GRID)
    assert len(ds.items) == 6
    assert ds.class_names == {1: "class1", 2: "class2"}


def test_fifty_percent_split_counts(basis64):
    # 6 classes x 8 items at 50% training: 24 train / 24 test
    ds = make_synthetic_dataset(6, 8, 1, seed=13, basis=basis64, grid=GRID)
    x, y = ds.arrays()
    from slepmoments.harness import _stratified_split

    rng = np.random.default_rng(0)
    tr, te = _stratified_split(y, 0.5, rng, ds.class_names)
    assert len(tr) == 24 and len(te) == 24
