"""Case-study input generators.

The qubit case study: two anchor directions in the X-Z plane of the
Bloch sphere, noisy pure-state samples around each, and a classifier
made of a single y-axis rotation followed by a computational-basis
measurement.  Image inputs: plain/raw PGM grayscale images downscaled to
16 x 16 and amplitude-encoded into an 8-qubit pure state.
"""

from __future__ import annotations

import numpy as np

from .channels import unitary_channel
from .classifiers import Classifier, LabeledDataset, computational_measurement
from .config import DEFAULT_POLICY, NumericPolicy
from .errors import ValidationError
from .states import PureState

__all__ = [
    "ry",
    "xz_plane_state",
    "qubit_rotation_classifier",
    "generate_qubit_case_study",
    "amplitude_encode",
    "read_pgm",
    "downscale_area",
    "encode_image",
]

QUBIT_DEFAULTS = {
    "theta_a": 1.0,
    "theta_b": 1.23,
    "theta_star": 0.4835,
    "n_train": 800,
    "n_val": 200,
    "noise_std": 0.15,
}

IMAGE_SIDE = 16  # amplitude-encoded images are 16 x 16 = 256 amplitudes


def ry(theta: float) -> np.ndarray:
    """Rotation exp(-i Y theta / 2) about the Bloch y-axis."""
    c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
    return np.array([[c, -s], [s, c]], dtype=complex)


def xz_plane_state(theta: float) -> PureState:
    """Pure qubit state at polar angle theta in the X-Z Bloch plane."""
    return PureState([np.cos(theta / 2.0), np.sin(theta / 2.0)])


def qubit_rotation_classifier(
    theta_star: float = QUBIT_DEFAULTS["theta_star"],
    labels: tuple[str, str] = ("a", "b"),
) -> Classifier:
    """R_y(theta_star) followed by the computational-basis measurement."""
    return Classifier(unitary_channel(ry(theta_star)), computational_measurement(2), labels)


def _sample_anchor_angles(
    anchor: float, other: float, count: int, std: float, rng: np.random.Generator
) -> list[float]:
    """Gaussian angles around the anchor, redrawn until the sample lies
    nearer its own anchor than the other one (labels stay consistent)."""
    angles = []
    for _ in range(count):
        for _attempt in range(1000):
            theta = float(rng.normal(anchor, std))
            if abs(theta - anchor) <= abs(theta - other):
                angles.append(theta)
                break
        else:
            raise ValidationError(
                "sampling could not stay near its anchor; lower noise_std"
            )
    return angles


def generate_qubit_case_study(
    theta_a: float = QUBIT_DEFAULTS["theta_a"],
    theta_b: float = QUBIT_DEFAULTS["theta_b"],
    theta_star: float = QUBIT_DEFAULTS["theta_star"],
    n_train: int = QUBIT_DEFAULTS["n_train"],
    n_val: int = QUBIT_DEFAULTS["n_val"],
    noise_std: float = QUBIT_DEFAULTS["noise_std"],
    seed: int = 0,
) -> tuple[Classifier, LabeledDataset, LabeledDataset]:
    """Classifier plus train/validation datasets for the qubit case study.

    Each dataset holds pure states in the X-Z plane: the first half is
    sampled around ``theta_a`` (label 0), the second half around
    ``theta_b`` (label 1).  Fixed seeds reproduce the datasets exactly.
    """
    for name, angle in (("theta_a", theta_a), ("theta_b", theta_b),
                        ("theta_star", theta_star)):
        if not -np.pi < angle <= np.pi:
            raise ValidationError(f"{name} must lie in (-pi, pi], got {angle}")
    if n_train < 2 or n_val < 2:
        raise ValidationError("need at least two samples per dataset")
    if noise_std < 0:
        raise ValidationError("noise_std must be nonnegative")
    rng = np.random.default_rng(seed)

    def build(count: int) -> LabeledDataset:
        half_a = count // 2
        half_b = count - half_a
        entries = [
            (xz_plane_state(theta), 0)
            for theta in _sample_anchor_angles(theta_a, theta_b, half_a, noise_std, rng)
        ]
        entries += [
            (xz_plane_state(theta), 1)
            for theta in _sample_anchor_angles(theta_b, theta_a, half_b, noise_std, rng)
        ]
        return LabeledDataset(entries)

    classifier = qubit_rotation_classifier(theta_star)
    return classifier, build(n_train), build(n_val)


# ---------------------------------------------------------------------------
# Amplitude encoding of grayscale images


def amplitude_encode(
    values, *, policy: NumericPolicy = DEFAULT_POLICY
) -> PureState:
    """Pure state with amplitudes proportional to the given real values.

    The all-zero input is rejected (its normalization is undefined);
    normalization preserves the relative pattern of the values.
    """
    arr = np.asarray(values, dtype=float).ravel()
    if arr.size == 0:
        raise ValidationError("cannot encode an empty value array")
    if not np.all(np.isfinite(arr)):
        raise ValidationError("values contain NaN or Inf")
    norm = float(np.linalg.norm(arr))
    if norm == 0.0:
        raise ValidationError("cannot amplitude-encode an all-zero image")
    return PureState(arr / norm, policy=policy)


def read_pgm(path) -> np.ndarray:
    """Read a plain (P2) or raw (P5) PGM grayscale image as floats."""
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:2] not in (b"P2", b"P5"):
        raise ValidationError("not a PGM file (magic must be P2 or P5)")
    magic = data[:2].decode()

    # Header tokens: magic, width, height, maxval, with # comments allowed.
    tokens = []
    pos = 2
    while len(tokens) < 3:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if pos < len(data) and data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise ValidationError("truncated PGM header")
        tokens.append(data[start:pos])
    try:
        width, height, maxval = (int(t) for t in tokens)
    except ValueError as exc:
        raise ValidationError("malformed PGM header") from exc
    if width < 1 or height < 1 or maxval < 1:
        raise ValidationError("PGM dimensions and maxval must be positive")

    if magic == "P2":
        try:
            pixels = np.array(data[pos:].split(), dtype=float)
        except ValueError as exc:
            raise ValidationError("malformed PGM pixel data") from exc
    else:
        pos += 1  # single whitespace byte after maxval
        dtype = ">u2" if maxval > 255 else np.uint8
        pixels = np.frombuffer(data, dtype=dtype, offset=pos).astype(float)
    if pixels.size < width * height:
        raise ValidationError(
            f"PGM has {pixels.size} pixels, expected {width * height}"
        )
    return pixels[: width * height].reshape(height, width)


def downscale_area(img: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Box (area-average) downscaling, exact for fractional ratios."""
    img = np.asarray(img, dtype=float)
    in_h, in_w = img.shape

    def weights(n_in: int, n_out: int) -> np.ndarray:
        scale = n_in / n_out
        w = np.zeros((n_out, n_in))
        for i in range(n_out):
            lo, hi = i * scale, (i + 1) * scale
            for j in range(int(np.floor(lo)), min(int(np.ceil(hi)), n_in)):
                w[i, j] = min(hi, j + 1) - max(lo, j)
        return w / scale

    return weights(in_h, out_h) @ img @ weights(in_w, out_w).T


def encode_image(path, *, policy: NumericPolicy = DEFAULT_POLICY) -> PureState:
    """PGM file -> 8-qubit pure state via amplitude encoding.

    16 x 16 images are encoded directly; anything larger (e.g. 28 x 28
    handwriting scans) is area-averaged down to 16 x 16 first.
    """
    img = read_pgm(path)
    if img.shape != (IMAGE_SIDE, IMAGE_SIDE):
        if img.shape[0] < IMAGE_SIDE or img.shape[1] < IMAGE_SIDE:
            raise ValidationError(
                f"image is {img.shape[0]}x{img.shape[1]}; need at least "
                f"{IMAGE_SIDE}x{IMAGE_SIDE}"
            )
        img = downscale_area(img, IMAGE_SIDE, IMAGE_SIDE)
    return amplitude_encode(img, policy=policy)
