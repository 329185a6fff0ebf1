"""Deterministic integer datasets labeled by their residue mod p.

Sampling uses SplitMix64 (Steele, Lea & Flood; the Java ``SplittableRandom``
finalizer) driven in counter mode: output ``i`` of stream ``seed`` is
``mix64(seed + i * GAMMA)`` with the published constants below. Each 64-bit
word is mapped onto [0, 2**32] inclusive by unbiased rejection; since
2**64 mod (2**32 + 1) == 1, only the all-ones word is ever rejected. The
stream is therefore reproducible from the seed alone, in any language, with
no dependence on a library RNG.
"""

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from modlearn._validation import MAX_VALUE, check_fraction, check_modulus, check_scalar_integer

SPLITMIX64_GAMMA = 0x9E3779B97F4A7C15
SPLITMIX64_MIX_1 = 0xBF58476D1CE4E5B9
SPLITMIX64_MIX_2 = 0x94D049BB133111EB

_GAMMA = np.uint64(SPLITMIX64_GAMMA)
_MIX_1 = np.uint64(SPLITMIX64_MIX_1)
_MIX_2 = np.uint64(SPLITMIX64_MIX_2)
_REJECTED_WORD = np.uint64(0xFFFFFFFFFFFFFFFF)
_RANGE = np.uint64(MAX_VALUE + 1)


def residue_oracle(x, p):
    """Exact residue of ``x`` mod ``p``; the single source of truth for labels."""
    p = check_modulus(p)
    x = check_scalar_integer(x, name="x")
    return x % p


def _mix64(state):
    z = (state ^ (state >> np.uint64(30))) * _MIX_1
    z = (z ^ (z >> np.uint64(27))) * _MIX_2
    return z ^ (z >> np.uint64(31))


def splitmix64_words(seed, start, count):
    """Words ``start + 1 .. start + count`` of the SplitMix64 stream for ``seed``."""
    counters = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    return _mix64(np.uint64(seed % 2**64) + counters * _GAMMA)


@dataclass(frozen=True, eq=False)
class LabeledDataset:
    """Ordered samples (x, y) with y == x mod p, plus generation metadata.

    ``split_counts`` records the (train, test) sizes of the split that
    produced this dataset; it is None for a freshly generated one.
    """

    p: int
    xs: np.ndarray
    ys: np.ndarray
    seed: int | None = None
    split_counts: tuple[int, int] | None = None

    def __post_init__(self):
        if self.xs.shape != self.ys.shape:
            raise ValueError("xs and ys must have matching shapes")

    def __len__(self):
        return int(self.xs.size)

    def validate(self):
        """Re-check every label against the residue oracle; raises on mismatch."""
        if np.any(self.xs > np.uint64(MAX_VALUE)):
            raise ValueError("sample values exceed the domain bound")
        expected = (self.xs % np.uint64(self.p)).astype(np.int64)
        bad = np.nonzero(expected != self.ys)[0]
        if bad.size:
            i = int(bad[0])
            raise ValueError(f"label mismatch at row {i}: {self.ys[i]} != {self.xs[i]} mod {self.p}")


def generate(seed, count, p):
    """Draw ``count`` integers uniformly from [0, 2**32] and label them mod p.

    Sampling is with replacement, deterministic in ``seed``, and identical
    across runs and platforms.
    """
    p = check_modulus(p)
    count = int(count)
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    seed = int(seed)

    xs = np.empty(count, dtype=np.uint64)
    filled = 0
    offset = 0
    while filled < count:
        words = splitmix64_words(seed, offset, count - filled)
        offset += words.size
        accepted = words[words != _REJECTED_WORD]
        xs[filled:filled + accepted.size] = accepted % _RANGE
        filled += accepted.size
    ys = (xs % np.uint64(p)).astype(np.int64)
    return LabeledDataset(p=p, xs=xs, ys=ys, seed=seed)


def split(d, train_fraction):
    """Split into (train, test) by sample order: first floor(fraction * n) rows train."""
    train_fraction = check_fraction(train_fraction, name="train_fraction")
    n = len(d)
    n_train = int(np.floor(train_fraction * n))
    n_test = n - n_train
    if n_train == 0 or n_test == 0:
        raise ValueError(f"invalid split: fraction {train_fraction} leaves an empty side for n={n}")
    counts = (n_train, n_test)
    train = LabeledDataset(p=d.p, xs=d.xs[:n_train].copy(), ys=d.ys[:n_train].copy(),
                           seed=d.seed, split_counts=counts)
    test = LabeledDataset(p=d.p, xs=d.xs[n_train:].copy(), ys=d.ys[n_train:].copy(),
                          seed=d.seed, split_counts=counts)
    return train, test


def _meta_path(path):
    return Path(path).with_suffix(".meta")


def write_csv(d, path):
    """Write ``x,y`` rows plus a ``.meta`` sidecar (seed, count, p, split)."""
    path = Path(path)
    lines = ["x,y"]
    lines.extend(f"{int(x)},{int(y)}" for x, y in zip(d.xs, d.ys))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")

    if d.split_counts is None:
        split_value = "none"
    else:
        split_value = f"{d.split_counts[0]}/{d.split_counts[1]}"
    meta = (
        f"seed={d.seed if d.seed is not None else 'none'}\n"
        f"count={len(d)}\n"
        f"p={d.p}\n"
        f"split={split_value}\n"
    )
    _meta_path(path).write_text(meta, encoding="utf-8")


def read_csv(path, p=None):
    """Read a dataset written by :func:`write_csv`; ``p`` falls back to the sidecar."""
    path = Path(path)
    text = path.read_text(encoding="utf-8").strip().splitlines()
    if not text or text[0] != "x,y":
        raise ValueError(f"{path} is not a dataset CSV (expected header 'x,y')")
    xs = np.empty(len(text) - 1, dtype=np.uint64)
    ys = np.empty(len(text) - 1, dtype=np.int64)
    for i, line in enumerate(text[1:]):
        a, b = line.split(",")
        xs[i] = int(a)
        ys[i] = int(b)

    meta = {}
    meta_file = _meta_path(path)
    if meta_file.exists():
        for line in meta_file.read_text(encoding="utf-8").splitlines():
            if "=" in line:
                key, value = line.split("=", 1)
                meta[key.strip()] = value.strip()
    if p is None:
        if "p" not in meta:
            raise ValueError(f"no modulus: {meta_file} is missing and p was not given")
        p = int(meta["p"])
    seed = None
    if meta.get("seed", "none") != "none":
        seed = int(meta["seed"])
    split_counts = None
    if meta.get("split", "none") != "none":
        a, b = meta["split"].split("/")
        split_counts = (int(a), int(b))
    d = LabeledDataset(p=check_modulus(p), xs=xs, ys=ys, seed=seed, split_counts=split_counts)
    d.validate()
    return d
