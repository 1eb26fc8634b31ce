"""Dataset construction: synthetic two-Gaussian benchmarks (with optional
distribution-shifted copies for train/test mismatch), IDX image loading,
binary class filtering, and [-1, 1] normalization.

Every dataset leaving this module has instances inside [-1, 1].
"""

from __future__ import annotations

import struct
import warnings
from dataclasses import dataclass, field

import numpy as np

from gaal import rng
from gaal.errors import ConfigError, FormatError

IDX_IMAGE_MAGIC = 0x00000803
IDX_LABEL_MAGIC = 0x00000801


@dataclass
class Dataset:
    instances: np.ndarray  # [n, d], entries in [-1, 1]
    labels: np.ndarray  # [n], values in {-1, +1}
    source_tag: str = ""

    def __post_init__(self):
        self.instances = np.asarray(self.instances, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=np.float64)

    @property
    def feature_dim(self) -> int:
        return self.instances.shape[1]

    def __len__(self) -> int:
        return len(self.labels)


@dataclass
class ShiftSpec:
    """Controlled train/test mismatch: rotate (2-D only), translate, add
    Gaussian noise, re-clip."""

    translation: tuple = ()
    noise_sigma: float = 0.0
    rotation_angle: float = 0.0

    def __post_init__(self):
        self.translation = tuple(float(t) for t in self.translation)
        if not all(np.isfinite(self.translation)) or not np.isfinite(self.noise_sigma):
            raise ConfigError("shift parameters must be finite")
        if self.noise_sigma < 0:
            raise ConfigError(f"noise_sigma must be non-negative, got {self.noise_sigma}")

    def is_identity(self) -> bool:
        return (
            not any(self.translation) and self.noise_sigma == 0.0 and self.rotation_angle == 0.0
        )


def make_two_gaussians(n: int, mean_pos, mean_neg, sigma: float, seed) -> Dataset:
    """n/2 points per class around each mean, clipped into [-1, 1]."""
    if n < 0 or n % 2:
        raise ConfigError(f"n must be even and non-negative, got {n}")
    if sigma <= 0:
        raise ConfigError(f"sigma must be positive, got {sigma}")
    mean_pos = np.asarray(mean_pos, dtype=np.float64)
    mean_neg = np.asarray(mean_neg, dtype=np.float64)
    if mean_pos.shape != mean_neg.shape:
        raise ConfigError(f"means of shapes {mean_pos.shape} and {mean_neg.shape}")
    for mean in (mean_pos, mean_neg):
        if np.any(np.abs(mean) >= 1.0):
            raise ConfigError(f"means must lie strictly inside (-1, 1), got {mean}")
    dim = mean_pos.shape[0]
    gen = rng.stream(seed)
    half = n // 2
    pos = mean_pos + sigma * gen.standard_normal((half, dim))
    neg = mean_neg + sigma * gen.standard_normal((half, dim))
    instances = np.clip(np.concatenate([pos, neg]), -1.0, 1.0)
    labels = np.concatenate([np.ones(half), -np.ones(half)])
    return Dataset(instances, labels, source_tag="two_gaussians")


def apply_shift(dataset: Dataset, spec: ShiftSpec, seed) -> Dataset:
    """Shifted copy of ``dataset``; labels and instance count preserved."""
    X = dataset.instances.copy()
    if spec.rotation_angle:
        if dataset.feature_dim != 2:
            raise ConfigError("rotation_angle applies to 2-D data only")
        c, s = np.cos(spec.rotation_angle), np.sin(spec.rotation_angle)
        X = X @ np.array([[c, s], [-s, c]])  # row-vector rotation by the angle
    if spec.translation:
        if len(spec.translation) != dataset.feature_dim:
            raise ConfigError(
                f"translation of {len(spec.translation)} components for "
                f"{dataset.feature_dim}-dimensional data"
            )
        X = X + np.asarray(spec.translation)
    if spec.noise_sigma:
        X = X + spec.noise_sigma * rng.stream(seed).standard_normal(X.shape)
    return Dataset(
        np.clip(X, -1.0, 1.0), dataset.labels.copy(), source_tag=dataset.source_tag + "+shift"
    )


# ---------------------------------------------------------------------------
# IDX container (big-endian magic + dims, then unsigned bytes row-major)


def _read_exact(fh, count: int, what: str) -> bytes:
    raw = fh.read(count)
    if len(raw) != count:
        raise FormatError(f"truncated {what}: wanted {count} bytes, got {len(raw)}")
    return raw


def load_idx_images(path) -> np.ndarray:
    with open(path, "rb") as fh:
        (magic,) = struct.unpack(">i", _read_exact(fh, 4, "image header"))
        if magic != IDX_IMAGE_MAGIC:
            raise FormatError(
                f"expected image magic {IDX_IMAGE_MAGIC:#010x}, got {magic:#010x}"
            )
        count, rows, cols = struct.unpack(">iii", _read_exact(fh, 12, "image header"))
        payload = _read_exact(fh, count * rows * cols, "image payload")
        extra = fh.read(1)
        if extra:
            raise FormatError("trailing bytes after image payload")
    return np.frombuffer(payload, dtype=np.uint8).reshape(count, rows, cols).copy()


def load_idx_labels(path) -> np.ndarray:
    with open(path, "rb") as fh:
        (magic,) = struct.unpack(">i", _read_exact(fh, 4, "label header"))
        if magic != IDX_LABEL_MAGIC:
            raise FormatError(
                f"expected label magic {IDX_LABEL_MAGIC:#010x}, got {magic:#010x}"
            )
        (count,) = struct.unpack(">i", _read_exact(fh, 4, "label header"))
        payload = _read_exact(fh, count, "label payload")
        extra = fh.read(1)
        if extra:
            raise FormatError("trailing bytes after label payload")
    return np.frombuffer(payload, dtype=np.uint8).copy()


def load_idx(image_path, label_path) -> tuple[np.ndarray, np.ndarray]:
    """Load paired image/label files, enforcing count consistency."""
    images = load_idx_images(image_path)
    labels = load_idx_labels(label_path)
    if len(images) != len(labels):
        raise FormatError(f"{len(images)} images but {len(labels)} labels")
    return images, labels


def save_idx_images(path, images: np.ndarray) -> None:
    images = np.asarray(images, dtype=np.uint8)
    count, rows, cols = images.shape
    with open(path, "wb") as fh:
        fh.write(struct.pack(">iiii", IDX_IMAGE_MAGIC, count, rows, cols))
        fh.write(images.tobytes())


def save_idx_labels(path, labels: np.ndarray) -> None:
    labels = np.asarray(labels, dtype=np.uint8)
    with open(path, "wb") as fh:
        fh.write(struct.pack(">ii", IDX_LABEL_MAGIC, len(labels)))
        fh.write(labels.tobytes())


def normalize(raw: np.ndarray) -> np.ndarray:
    """Bytes 0..255 to [-1, 1]."""
    return np.asarray(raw, dtype=np.float64) / 127.5 - 1.0


def denormalize(values: np.ndarray) -> np.ndarray:
    """[-1, 1] back to bytes; exact round-trip for all byte values."""
    return np.clip(np.rint((np.asarray(values) + 1.0) * 127.5), 0, 255).astype(np.uint8)


def filter_binary(instances, labels, class_a, class_b, source_tag: str = "") -> Dataset:
    """Keep only two classes; ``class_a`` maps to +1, ``class_b`` to -1,
    original order preserved."""
    if class_a == class_b:
        raise ConfigError(f"class_a and class_b are both {class_a}")
    instances = np.asarray(instances, dtype=np.float64)
    labels = np.asarray(labels)
    for cls in (class_a, class_b):
        if not np.any(labels == cls):
            warnings.warn(f"class {cls} absent from the data", stacklevel=2)
    keep = (labels == class_a) | (labels == class_b)
    kept_labels = np.where(labels[keep] == class_a, 1.0, -1.0)
    return Dataset(instances[keep], kept_labels, source_tag=source_tag)


def export_csv(dataset: Dataset, path) -> None:
    """``label,f0,f1,...`` rows with 17-significant-digit reals."""
    with open(path, "w", newline="") as fh:
        header = ["label"] + [f"f{i}" for i in range(dataset.feature_dim)]
        fh.write(",".join(header) + "\n")
        for x, y in zip(dataset.instances, dataset.labels):
            row = [str(int(y))] + [format(v, ".17g") for v in x]
            fh.write(",".join(row) + "\n")
