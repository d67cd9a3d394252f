"""Experiment harness: rotation-stability tables, noise-robustness tables, and
train-fraction classification sweeps over rotation-invariant features."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .classifier import LinearModel
from .classifier import train_classifier as _train_on_arrays
from .dpss import DpssBasis, DpssParams, compute_dpss
from .errors import ParameterError
from .imaging import (
    GENERATOR_NAME,
    NoiseSpec,
    RasterImage,
    add_gaussian_noise,
    read_pgm,
    rotate_image,
    to_polar,
)
from .moments import InvariantVector, compute_moments, feature_vector, invariants
from .synthetic import shape_class_image

__all__ = [
    "DEFAULT_SEED",
    "PROTOCOL_ANGLES_DEG",
    "PROTOCOL_ORDERS",
    "StabilityReport",
    "LabeledDataset",
    "ClassificationReport",
    "rotation_stability",
    "train_classifier",
    "classification_sweep",
    "make_synthetic_dataset",
    "synthetic_images",
    "load_labeled_directory",
    "default_basis",
]

# Fixed default seed for every CLI/harness entry point (never time-based).
DEFAULT_SEED = 7

# The eight orientations and ten invariant columns of the rotation protocol.
PROTOCOL_ANGLES_DEG = (0.0, 35.0, 90.0, 140.0, 180.0, 230.0, 270.0, 325.0)
PROTOCOL_ORDERS = (
    (1, 1), (1, 2), (2, 1), (2, 2), (2, 3),
    (3, 2), (3, 4), (4, 1), (4, 3), (4, 5),
)

_DEFAULT_BASIS_PARAMS = DpssParams(n_len=64, half_bandwidth=0.2, n_seq=10)


def default_basis() -> DpssBasis:
    """Basis used when the caller does not supply one (N=64, W=0.2, K=10)."""
    return compute_dpss(_DEFAULT_BASIS_PARAMS)


def _child_seed(seed: int, *key: int) -> int:
    """Independent 64-bit child seed derived from (seed, key); order-stable."""
    ss = np.random.SeedSequence(entropy=seed, spawn_key=tuple(key))
    return int(ss.generate_state(1, np.uint64)[0])


def _fmt(value: float, precision: int | None) -> str:
    return repr(float(value)) if precision is None else f"{value:.{precision}f}"


# --- stability protocol -------------------------------------------------------


@dataclass(frozen=True)
class StabilityReport:
    """Per-angle invariant values plus per-column mean and population std."""

    angles: list[float]
    columns: list[tuple[int, int]]
    values: np.ndarray = field(repr=False)
    mean_row: np.ndarray
    std_row: np.ndarray
    metadata: dict

    def to_csv(self, precision: int | None = None) -> str:
        # one row per angle plus a final std row; the mean row lives in the
        # JSON serialization only
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["angle_deg"] + [f"phi_{m}_{n}" for m, n in self.columns])
        for angle, row in zip(self.angles, self.values):
            writer.writerow([_fmt(angle, precision)] + [_fmt(v, precision) for v in row])
        writer.writerow(["std"] + [_fmt(v, precision) for v in self.std_row])
        return buf.getvalue()

    def to_json(self) -> str:
        doc = {
            "angles_deg": list(self.angles),
            "columns": [[m, n] for m, n in self.columns],
            "values": self.values.tolist(),
            "mean": self.mean_row.tolist(),
            "std": self.std_row.tolist(),
            "metadata": self.metadata,
        }
        return json.dumps(doc, indent=1)


def rotation_stability(
    image: RasterImage,
    angles,
    orders,
    basis: DpssBasis,
    grid: tuple[int, int],
    noise: NoiseSpec | None = None,
) -> StabilityReport:
    """Rotate, optionally add per-row noise, featurize, and tabulate invariants.

    Each angle row draws its own noise field from a child seed of noise.seed, so
    rows are independent yet the whole table is reproducible.
    """
    angles = [float(a) for a in angles]
    if not angles:
        raise ParameterError("angle list must not be empty")
    orders = [(int(m), int(n)) for m, n in orders]
    if not orders:
        raise ParameterError("order list must not be empty")
    max_radial = max(m for m, _ in orders) + 1
    max_angular = max(n for _, n in orders)
    if any(m < 0 or n < 0 for m, n in orders):
        raise ParameterError("orders must be nonnegative")

    rows = np.empty((len(angles), len(orders)))
    for i, angle in enumerate(angles):
        frame = rotate_image(image, angle)
        if noise is not None:
            frame = add_gaussian_noise(
                frame, NoiseSpec(noise.snr_db, _child_seed(noise.seed, i))
            )
        polar = to_polar(frame, grid[0], grid[1])
        vec = invariants(compute_moments(polar, basis, max_radial, max_angular))
        rows[i] = [vec.value(m, n) for m, n in orders]

    meta = {
        "grid": list(grid),
        "basis_id": basis.basis_id,
        "noise_snr_db": None if noise is None else noise.snr_db,
        "seed": None if noise is None else noise.seed,
        "generator": GENERATOR_NAME,
    }
    return StabilityReport(
        angles=angles,
        columns=orders,
        values=rows,
        mean_row=rows.mean(axis=0),
        std_row=rows.std(axis=0),
        metadata=meta,
    )


# --- labeled data ------------------------------------------------------------


@dataclass(frozen=True)
class LabeledDataset:
    """Feature vectors with small-integer class labels and a label-name map."""

    items: list[tuple[InvariantVector, int]]
    class_names: dict[int, str]

    def __post_init__(self):
        if len({label for _, label in self.items}) < 2:
            raise ParameterError("dataset must contain at least two distinct labels")
        lengths = {vec.entries.shape[0] for vec, _ in self.items}
        if len(lengths) > 1:
            raise ParameterError("all feature vectors must have the same length")

    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        x = np.vstack([vec.entries for vec, _ in self.items])
        y = np.array([label for _, label in self.items])
        return x, y


def train_classifier(
    train: LabeledDataset, reg: float = 1e-3, epochs: int = 300, seed: int = DEFAULT_SEED
) -> LinearModel:
    """Fit the one-vs-rest maximum-margin model on a labeled dataset."""
    x, y = train.arrays()
    return _train_on_arrays(x, y, reg=reg, epochs=epochs, seed=seed)


# --- classification sweep ------------------------------------------------------


@dataclass(frozen=True)
class ClassificationReport:
    """Mean/std accuracy per training fraction over repeated stratified splits."""

    train_fractions: list[float]
    mean_accuracy: np.ndarray
    std_accuracy: np.ndarray
    repeats: int
    seed: int
    metadata: dict

    def to_csv(self, precision: int | None = None) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["train_fraction", "mean_accuracy", "std_accuracy"])
        for p, m, s in zip(self.train_fractions, self.mean_accuracy, self.std_accuracy):
            writer.writerow([_fmt(p, precision), _fmt(m, precision), _fmt(s, precision)])
        return buf.getvalue()

    def to_json(self) -> str:
        doc = {
            "train_fractions": list(self.train_fractions),
            "mean_accuracy": self.mean_accuracy.tolist(),
            "std_accuracy": self.std_accuracy.tolist(),
            "repeats": self.repeats,
            "seed": self.seed,
            "metadata": self.metadata,
        }
        return json.dumps(doc, indent=1)


def _stratified_split(y, fraction, rng, class_names):
    train_idx, test_idx = [], []
    for label in np.unique(y):
        idx = np.where(y == label)[0]
        count = int(np.floor(fraction * idx.size))
        if count < 1:
            name = class_names.get(int(label), str(label))
            raise ParameterError(
                f"training fraction {fraction} leaves class {name!r} with no "
                f"training items ({idx.size} available)"
            )
        perm = rng.permutation(idx)
        train_idx.extend(perm[:count])
        test_idx.extend(perm[count:])
    return np.array(train_idx), np.array(test_idx)


def _plain_split(y, fraction, rng):
    idx = rng.permutation(y.size)
    count = int(np.floor(fraction * y.size))
    if count < 1 or count >= y.size:
        raise ParameterError(f"training fraction {fraction} leaves an empty split")
    return idx[:count], idx[count:]


def classification_sweep(
    ds: LabeledDataset,
    fractions=(0.2, 0.3, 0.4, 0.5),
    repeats: int = 10,
    seed: int = DEFAULT_SEED,
    stratified: bool = True,
    reg: float = 1e-3,
    epochs: int = 300,
) -> ClassificationReport:
    """Repeat train/test splits at each fraction and report accuracy mean/std.

    Splits are stratified per class by default (an unstratified mode exists for
    probing class-dropout effects). Each (fraction, repeat) pair derives its own
    child seed, so repeats are independent and order-insensitive.
    """
    fractions = [float(p) for p in fractions]
    if not fractions or any(not (0.0 < p < 1.0) for p in fractions):
        raise ParameterError("fractions must lie strictly between 0 and 1")
    if repeats < 1:
        raise ParameterError(f"repeats must be >= 1, got {repeats}")
    x, y = ds.arrays()
    means, stds = [], []
    for fi, p in enumerate(fractions):
        accs = []
        for rep in range(repeats):
            rng = np.random.default_rng(
                np.random.SeedSequence(entropy=seed, spawn_key=(fi, rep))
            )
            if stratified:
                tr, te = _stratified_split(y, p, rng, ds.class_names)
            else:
                tr, te = _plain_split(y, p, rng)
            model = _train_on_arrays(x[tr], y[tr], reg=reg, epochs=epochs, seed=seed)
            accs.append(float((model.predict(x[te]) == y[te]).mean()))
        means.append(float(np.mean(accs)))
        stds.append(float(np.std(accs)))
    meta = {
        "classes": {int(k): v for k, v in sorted(ds.class_names.items())},
        "items": len(ds.items),
        "stratified": stratified,
        "reg": reg,
        "epochs": epochs,
        "generator": GENERATOR_NAME,
    }
    return ClassificationReport(
        train_fractions=fractions,
        mean_accuracy=np.array(means),
        std_accuracy=np.array(stds),
        repeats=repeats,
        seed=seed,
        metadata=meta,
    )


# --- dataset construction -------------------------------------------------------


def make_synthetic_dataset(
    n_classes: int,
    per_class: int,
    rotations_per_item: int = 1,
    seed: int = DEFAULT_SEED,
    basis: DpssBasis | None = None,
    grid: tuple[int, int] = (64, 128),
    image_size: int = 96,
) -> LabeledDataset:
    """Generate labeled rotation-invariant features from synthetic shape classes.

    Every (class, item, rotation) triple gets an independent child seed, so the
    dataset is reproducible item by item. Labels run 1..n_classes.
    """
    if n_classes < 2:
        raise ParameterError(f"n_classes must be >= 2, got {n_classes}")
    if per_class < 1 or rotations_per_item < 1:
        raise ParameterError("per_class and rotations_per_item must be >= 1")
    if basis is None:
        basis = default_basis()
    items = []
    for cid in range(n_classes):
        for item in range(per_class):
            for rot in range(rotations_per_item):
                rng = np.random.default_rng(
                    np.random.SeedSequence(entropy=seed, spawn_key=(cid, item, rot))
                )
                img = shape_class_image(cid, rng, size=image_size)
                vec = feature_vector(img, basis, grid=grid)
                items.append((vec, cid + 1))
    names = {cid + 1: f"class{cid + 1}" for cid in range(n_classes)}
    return LabeledDataset(items=items, class_names=names)


def synthetic_images(
    n_classes: int,
    per_class: int,
    rotations_per_item: int = 1,
    seed: int = DEFAULT_SEED,
    image_size: int = 96,
):
    """Yield (class_name, file_stem, RasterImage) for the synthetic dataset."""
    if n_classes < 2:
        raise ParameterError(f"n_classes must be >= 2, got {n_classes}")
    for cid in range(n_classes):
        for item in range(per_class):
            for rot in range(rotations_per_item):
                rng = np.random.default_rng(
                    np.random.SeedSequence(entropy=seed, spawn_key=(cid, item, rot))
                )
                img = shape_class_image(cid, rng, size=image_size)
                yield f"class{cid + 1}", f"item{item:03d}r{rot}", img


def load_labeled_directory(
    root: str | Path,
    basis: DpssBasis | None = None,
    grid: tuple[int, int] = (64, 128),
) -> LabeledDataset:
    """Featurize a directory tree laid out as <root>/<class_name>/<image>.pgm."""
    root = Path(root)
    if basis is None:
        basis = default_basis()
    class_dirs = sorted(p for p in root.iterdir() if p.is_dir())
    if len(class_dirs) < 2:
        raise ParameterError(f"{root} must contain at least two class directories")
    items = []
    names = {}
    for label, cdir in enumerate(class_dirs, start=1):
        names[label] = cdir.name
        for path in sorted(cdir.glob("*.pgm")):
            img = read_pgm(path.read_bytes())
            items.append((feature_vector(img, basis, grid=grid), label))
    return LabeledDataset(items=items, class_names=names)
