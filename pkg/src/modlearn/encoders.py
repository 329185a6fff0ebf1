"""Fixed-width numeric encodings of non-negative integers up to 2**32.

Widths are pinned by the domain bound: 33 binary digits, 21 base-3 digits,
10 decimal digits. Positional encodings are most-significant-first and
left-zero-padded; n-gram encodings slide a window over the padded 10-digit
decimal string and flatten the windows in order.
"""

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from modlearn._validation import MAX_VALUE, check_integer_array, check_labels, check_scalar_integer

BINARY_WIDTH = 33
BASE3_WIDTH = 21
DECIMAL_WIDTH = 10

KIND_WIDTHS = {
    "raw": 1,
    "binary": BINARY_WIDTH,
    "base3": BASE3_WIDTH,
    "one_gram": DECIMAL_WIDTH,
    "two_gram": 2 * (DECIMAL_WIDTH - 1),
    "three_gram": 3 * (DECIMAL_WIDTH - 2),
    "one_two_gram": DECIMAL_WIDTH + 2 * (DECIMAL_WIDTH - 1),
    "one_two_three_gram": DECIMAL_WIDTH + 2 * (DECIMAL_WIDTH - 1) + 3 * (DECIMAL_WIDTH - 2),
    "one_gram_sum": DECIMAL_WIDTH + 1,
    "one_gram_sum_mod3": DECIMAL_WIDTH + 1,
}
KINDS = tuple(KIND_WIDTHS)

#: Kinds whose vectors determine the integer uniquely, digit by digit.
POSITIONAL_KINDS = ("raw", "binary", "base3", "one_gram")

_BASES = {"binary": 2, "base3": 3, "one_gram": 10}


def check_kind(kind):
    if kind not in KIND_WIDTHS:
        raise ValueError(f"unknown encoder kind {kind!r}; choose from {', '.join(KINDS)}")
    return kind


def encoder_width(kind):
    return KIND_WIDTHS[check_kind(kind)]


@dataclass(frozen=True)
class EncoderSpec:
    """An encoder kind together with its fixed output width."""

    kind: str
    width: int

    @classmethod
    def of(cls, kind):
        return cls(kind=check_kind(kind), width=KIND_WIDTHS[kind])


def _digit_rows(xs, base, width):
    """(n, width) float matrix of base-``base`` digits, most significant first."""
    out = np.zeros((xs.size, width), dtype=np.float64)
    rem = xs.astype(np.uint64)
    b = np.uint64(base)
    for col in range(width - 1, -1, -1):
        out[:, col] = rem % b
        rem = rem // b
    return out


def _gram_rows(digits, size):
    windows = [digits[:, i:i + size] for i in range(digits.shape[1] - size + 1)]
    return np.concatenate(windows, axis=1)


def encode_batch(xs, kind):
    """Encode a 1-d array of integers into an (n, width) float matrix."""
    kind = check_kind(kind)
    try:
        xs = check_integer_array(xs, name="x")
    except ValueError as exc:
        # locate the offending row so batch callers get an index
        probe = np.asarray(xs).reshape(-1)
        for i, value in enumerate(probe):
            try:
                check_scalar_integer(value, name="x")
            except ValueError:
                raise ValueError(f"row {i}: {exc}") from exc
        raise

    if kind == "raw":
        return xs.astype(np.float64)[:, None]
    if kind == "binary":
        return _digit_rows(xs, 2, BINARY_WIDTH)
    if kind == "base3":
        return _digit_rows(xs, 3, BASE3_WIDTH)

    one = _digit_rows(xs, 10, DECIMAL_WIDTH)
    if kind == "one_gram":
        return one
    if kind == "two_gram":
        return _gram_rows(one, 2)
    if kind == "three_gram":
        return _gram_rows(one, 3)
    if kind == "one_two_gram":
        return np.concatenate([one, _gram_rows(one, 2)], axis=1)
    if kind == "one_two_three_gram":
        return np.concatenate([one, _gram_rows(one, 2), _gram_rows(one, 3)], axis=1)
    digit_sum = one.sum(axis=1, keepdims=True)
    if kind == "one_gram_sum":
        return np.concatenate([one, digit_sum], axis=1)
    return np.concatenate([one, digit_sum % 3.0], axis=1)  # one_gram_sum_mod3


def encode(x, kind):
    """Encode a single integer into a vector of length ``encoder_width(kind)``."""
    x = check_scalar_integer(x, name="x")
    return encode_batch(np.array([x], dtype=np.uint64), kind)[0]


def decode(vector, kind):
    """Invert :func:`encode` for positional kinds.

    Raises for non-positional kinds (the encoding is not injective digit by
    digit) and for vectors whose entries are not valid digits.
    """
    kind = check_kind(kind)
    if kind not in POSITIONAL_KINDS:
        raise ValueError(f"decoding is unsupported for kind {kind!r}; positional kinds are "
                         f"{', '.join(POSITIONAL_KINDS)}")
    v = np.asarray(vector, dtype=np.float64)
    if v.shape != (KIND_WIDTHS[kind],):
        raise ValueError(f"malformed vector: expected shape ({KIND_WIDTHS[kind]},), got {v.shape}")
    if not np.all(np.isfinite(v)) or not np.all(v == np.floor(v)):
        raise ValueError("malformed vector: entries must be integral")

    if kind == "raw":
        value = int(v[0])
        if value < 0 or value > MAX_VALUE:
            raise ValueError(f"malformed vector: raw value {value} outside [0, {MAX_VALUE}]")
        return value

    base = _BASES[kind]
    if np.any(v < 0) or np.any(v >= base):
        raise ValueError(f"malformed vector: digits must lie in [0, {base - 1}]")
    value = 0
    for digit in v:
        value = value * base + int(digit)
    if value > MAX_VALUE:
        raise ValueError(f"malformed vector: decodes to {value}, outside [0, {MAX_VALUE}]")
    return value


@dataclass(frozen=True, eq=False)
class FeatureMatrix:
    """Row-per-sample feature matrix plus the spec that produced it."""

    spec: EncoderSpec
    values: np.ndarray
    source: str | None = None

    @property
    def rows(self):
        return int(self.values.shape[0])

    @property
    def width(self):
        return int(self.values.shape[1])


def encode_dataset(d, kind):
    """Encode every sample of a labeled dataset, preserving order."""
    spec = EncoderSpec.of(kind)
    values = encode_batch(d.xs, kind)
    source = f"p={d.p},seed={d.seed},count={len(d)}"
    return FeatureMatrix(spec=spec, values=values, source=source)


def write_features_csv(features, labels, path):
    """Write the bundle format ``f0,...,f{w-1},y`` consumed by external tools."""
    values = features.values
    labels = check_labels(np.asarray(labels), n_classes=np.iinfo(np.int64).max)
    if labels.size != values.shape[0]:
        raise ValueError("labels length must match feature rows")
    header = ",".join(f"f{i}" for i in range(values.shape[1])) + ",y"
    lines = [header]
    for row, y in zip(values, labels):
        lines.append(",".join(f"{v:.17g}" for v in row) + f",{int(y)}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_features_csv(path):
    """Read a features CSV back into (X, y)."""
    lines = Path(path).read_text(encoding="utf-8").strip().splitlines()
    header = lines[0].split(",")
    if header[-1] != "y" or not header[0].startswith("f"):
        raise ValueError(f"{path} is not a features CSV (expected header 'f0,...,y')")
    width = len(header) - 1
    X = np.empty((len(lines) - 1, width), dtype=np.float64)
    y = np.empty(len(lines) - 1, dtype=np.int64)
    for i, line in enumerate(lines[1:]):
        parts = line.split(",")
        X[i] = [float(v) for v in parts[:-1]]
        y[i] = int(parts[-1])
    return X, y


class IntegerEncoder(BaseEstimator, TransformerMixin):
    """Stateless transformer from integers to the fixed-width encoding ``kind``."""

    def __init__(self, kind="one_gram"):
        self.kind = kind

    def fit(self, X, y=None):
        check_kind(self.kind)
        self.spec_ = EncoderSpec.of(self.kind)
        return self

    def transform(self, X):
        check_kind(self.kind)
        return encode_batch(X, self.kind)

    def get_feature_names_out(self, input_features=None):
        return np.array([f"f{i}" for i in range(encoder_width(self.kind))])
