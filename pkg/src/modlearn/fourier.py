"""Periodic-basis regression that classifies integers by their residue mod p.

The basis pairs sin(2*pi*j*x/p) with cos(2*pi*j*x/p) for j = 1..J, where
J = floor((p-1)/2) for odd p and one more (the Nyquist pair) for even p.
Trig arguments are computed from r = (j*x) mod p in exact integer
arithmetic, which is a pure periodicity identity: it keeps features accurate
to machine precision for x up to 2**32, where the naive phase 2*pi*j*x/p
would already have lost ~10 digits. Labels never enter this reduction.
"""

import math
from typing import NamedTuple

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from modlearn import ols
from modlearn._validation import check_integer_array, check_labels, check_modulus, check_scalar_integer

DEFAULT_ROUND_TOLERANCE = 1e-5
_TWO_PI = 2.0 * math.pi


def pair_count(p):
    """Number of sine/cosine pairs in the default basis for modulus p."""
    p = check_modulus(p)
    count = (p - 1) // 2
    if p % 2 == 0:
        count += 1
    return count


def _angles(xs, j, p):
    # xs uint64, j and p small positive ints; j*x stays far below 2**64
    reduced = (xs * np.uint64(j)) % np.uint64(p)
    return reduced.astype(np.float64) * (_TWO_PI / p)


def basis_matrix(xs, p, pairs, sine_only=False):
    """Design matrix with columns [sin_1, cos_1, ..., sin_J, cos_J] (or sines only)."""
    columns = []
    for j in range(1, pairs + 1):
        theta = _angles(xs, j, p)
        columns.append(np.sin(theta))
        if not sine_only:
            columns.append(np.cos(theta))
    return np.stack(columns, axis=1)


def basis_features(x, p, pairs=None):
    """Feature vector of length 2*pairs for a single integer."""
    p = check_modulus(p)
    x = check_scalar_integer(x, name="x")
    if pairs is None:
        pairs = pair_count(p)
    return basis_matrix(np.array([x], dtype=np.uint64), p, pairs)[0]


def closed_form_coefficients(p):
    """Exact interpolation coefficients for the residue sequence 0..p-1.

    Returns (intercept, sine_coefficients, cosine_coefficients). Summing the
    geometric series sum_k k*exp(2*pi*i*j*k/p) = p/(exp(2*pi*i*j/p) - 1)
    gives intercept (p-1)/2, sine coefficient -cot(pi*j/p) and cosine
    coefficient -1 for every non-Nyquist j; for even p the Nyquist pair
    contributes (0, -1/2). The resulting function equals x mod p at every
    integer x.
    """
    p = check_modulus(p)
    pairs = pair_count(p)
    sine = np.zeros(pairs)
    cosine = np.zeros(pairs)
    for j in range(1, pairs + 1):
        if 2 * j == p:
            sine[j - 1] = 0.0
            cosine[j - 1] = -0.5
        else:
            sine[j - 1] = -1.0 / math.tan(math.pi * j / p)
            cosine[j - 1] = -1.0
    return (p - 1) / 2.0, sine, cosine


def sawtooth(x, p):
    """Piecewise-linear periodic interpolation of the residue function.

    Identity on [0, p-1], then the line back down to 0 on (p-1, p), extended
    with period p to all x >= 0.
    """
    p = check_modulus(p)
    arr = np.asarray(x, dtype=np.float64)
    if np.any(arr < 0):
        raise ValueError("x must be non-negative")
    local = np.mod(arr, p)
    down = (1.0 - p) * local + (p - 1.0) * p
    out = np.where(local <= p - 1.0, local, down)
    if np.isscalar(x) or arr.ndim == 0:
        return float(out)
    return out


class ClassifiedPrediction(NamedTuple):
    """A raw regression output with its rounded label and confidence flag."""

    raw_value: float
    label: int
    confident: bool


class FourierRegressionClassifier(BaseEstimator, ClassifierMixin):
    """Linear regression on the periodic basis, classified by rounding.

    Fitting regresses the residue labels on the basis features plus an
    intercept by ordinary least squares. A prediction is rounded to the
    nearest integer and reduced mod p for the label; it is ``confident``
    when the raw value sits within ``round_tolerance`` of an integer
    already inside [0, p-1].

    Parameters
    ----------
    p : modulus, integer >= 2.
    pair_count : number of sine/cosine pairs; None selects the default
        basis size for ``p``. Larger values create redundant columns and
        trip the rank warning.
    sine_only : drop the cosine columns (a deliberately crippled basis).
    round_tolerance : confidence window around integers.
    """

    def __init__(self, p=3, pair_count=None, sine_only=False,
                 round_tolerance=DEFAULT_ROUND_TOLERANCE):
        self.p = p
        self.pair_count = pair_count
        self.sine_only = sine_only
        self.round_tolerance = round_tolerance

    def _resolved_pairs(self):
        if self.pair_count is None:
            return pair_count(self.p)
        pairs = int(self.pair_count)
        # j*x must stay below 2**64 for the exact integer reduction
        if not 1 <= pairs <= 2**31:
            raise ValueError(f"pair_count must lie in [1, 2**31], got {pairs}")
        return pairs

    def fit(self, X, y):
        p = check_modulus(self.p)
        if not float(self.round_tolerance) > 0.0:
            raise ValueError(f"round_tolerance must be positive, got {self.round_tolerance}")
        xs = check_integer_array(X, name="X")
        ys = check_labels(y, n_classes=p)
        if xs.size != ys.size:
            raise ValueError(f"dimension mismatch: {xs.size} samples vs {ys.size} labels")
        present = np.unique(ys)
        missing = sorted(set(range(p)) - set(int(v) for v in present))
        if missing:
            raise ValueError(f"training labels never take residue class(es) {missing}; "
                             "every class must appear at least once")

        pairs = self._resolved_pairs()
        design = basis_matrix(xs, p, pairs, sine_only=self.sine_only)
        result = ols.fit(design, ys.astype(np.float64), intercept=True)

        coef = result.coefficients
        if self.sine_only:
            sine = coef[:-1].copy()
            cosine = np.zeros(pairs)
        else:
            sine = coef[:-1:2].copy()
            cosine = coef[1:-1:2].copy()
        self.pair_count_ = pairs
        self.intercept_ = float(coef[-1])
        self.sine_coefficients_ = sine
        self.cosine_coefficients_ = cosine
        self.diagnostics_ = result
        self.fitted_by_ = "ols"
        self.classes_ = np.arange(p)
        return self

    @classmethod
    def closed_form(cls, p, round_tolerance=DEFAULT_ROUND_TOLERANCE):
        """Exact model without any data: the discrete interpolant coefficients."""
        model = cls(p=p, round_tolerance=round_tolerance)
        intercept, sine, cosine = closed_form_coefficients(p)
        model.pair_count_ = pair_count(p)
        model.intercept_ = intercept
        model.sine_coefficients_ = sine
        model.cosine_coefficients_ = cosine
        model.diagnostics_ = None
        model.fitted_by_ = "closed_form"
        model.classes_ = np.arange(check_modulus(p))
        return model

    def _check_fitted(self):
        if not hasattr(self, "intercept_"):
            raise ValueError("model is not fitted")

    def predict_raw(self, X):
        """Raw regression values at integer inputs."""
        self._check_fitted()
        xs = check_integer_array(X, name="X")
        out = np.full(xs.size, self.intercept_, dtype=np.float64)
        for j in range(1, self.pair_count_ + 1):
            theta = _angles(xs, j, self.p)
            out += self.sine_coefficients_[j - 1] * np.sin(theta)
            out += self.cosine_coefficients_[j - 1] * np.cos(theta)
        return out

    def predict(self, X):
        raw = self.predict_raw(X)
        return (np.rint(raw).astype(np.int64)) % self.p

    def predict_residue(self, x):
        """Classify a single integer, reporting the raw value and confidence."""
        raw = float(self.predict_raw(np.array([check_scalar_integer(x, name='x')], dtype=np.uint64))[0])
        nearest = int(np.rint(raw))
        confident = abs(raw - nearest) <= self.round_tolerance and 0 <= nearest <= self.p - 1
        return ClassifiedPrediction(raw_value=raw, label=nearest % self.p, confident=confident)

    def curve(self, xs):
        """Raw regression values over real-valued grid points (plot support).

        Uses the direct phase 2*pi*j*x/p, accurate for the small x of a plot
        grid; integer prediction paths use exact argument reduction instead.
        """
        self._check_fitted()
        xs = np.asarray(xs, dtype=np.float64)
        out = np.full(xs.shape, self.intercept_, dtype=np.float64)
        for j in range(1, self.pair_count_ + 1):
            theta = (_TWO_PI * j / self.p) * xs
            out += self.sine_coefficients_[j - 1] * np.sin(theta)
            out += self.cosine_coefficients_[j - 1] * np.cos(theta)
        return out

    def to_text(self):
        """Serialize to round-trippable key=value lines."""
        self._check_fitted()
        lines = [
            "model=fourier",
            f"p={self.p}",
            f"pair_count={self.pair_count_}",
            f"sine_only={str(bool(self.sine_only)).lower()}",
            f"round_tolerance={self.round_tolerance:.17g}",
            f"fitted_by={self.fitted_by_}",
            f"intercept={self.intercept_:.17g}",
            "sine_coefficients=" + ",".join(f"{v:.17g}" for v in self.sine_coefficients_),
            "cosine_coefficients=" + ",".join(f"{v:.17g}" for v in self.cosine_coefficients_),
        ]
        if self.diagnostics_ is not None:
            d = self.diagnostics_
            lines.extend([
                f"r_squared={d.r_squared:.17g}",
                f"residual_norm={d.residual_norm:.17g}",
                f"condition_estimate={d.condition_estimate:.17g}",
                f"rank={d.rank}",
                f"rank_warning={str(d.rank_warning).lower()}",
            ])
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text):
        fields = {}
        for line in text.strip().splitlines():
            key, value = line.split("=", 1)
            fields[key] = value
        if fields.get("model") != "fourier":
            raise ValueError("not a fourier model file")
        model = cls(
            p=int(fields["p"]),
            sine_only=fields["sine_only"] == "true",
            round_tolerance=float(fields["round_tolerance"]),
        )
        model.pair_count_ = int(fields["pair_count"])
        model.intercept_ = float(fields["intercept"])
        model.sine_coefficients_ = np.array([float(v) for v in fields["sine_coefficients"].split(",")])
        model.cosine_coefficients_ = np.array([float(v) for v in fields["cosine_coefficients"].split(",")])
        model.fitted_by_ = fields["fitted_by"]
        model.classes_ = np.arange(int(fields["p"]))
        if "r_squared" in fields:
            model.diagnostics_ = ols.OlsFit(
                coefficients=np.array([]),
                has_intercept=True,
                r_squared=float(fields["r_squared"]),
                residual_norm=float(fields["residual_norm"]),
                condition_estimate=float(fields["condition_estimate"]),
                rank=int(fields["rank"]),
                rank_warning=fields["rank_warning"] == "true",
            )
        else:
            model.diagnostics_ = None
        return model


def evaluate_accuracy(model, d):
    """Fraction of correctly classified samples in a labeled dataset."""
    if d.p != model.p:
        raise ValueError(f"modulus mismatch: model has p={model.p}, dataset has p={d.p}")
    if len(d) == 0:
        raise ValueError("dataset is empty")
    return float(np.mean(model.predict(d.xs) == d.ys))
