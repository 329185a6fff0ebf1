import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from modlearn import dataset, encoders
from modlearn.encoders import IntegerEncoder, decode, encode, encode_batch, encode_dataset


def _tail(vector, n):
    return list(vector[-n:])


def test_binary_examples():
    assert _tail(encode(4, "binary"), 3) == [1, 0, 0]
    assert _tail(encode(2, "binary"), 3) == [0, 1, 0]
    assert _tail(encode(5, "binary"), 3) == [1, 0, 1]
    assert encode(4, "binary").shape == (33,)
    assert all(v == 0 for v in encode(4, "binary")[:-3])


def test_base3_examples():
    assert _tail(encode(3, "base3"), 2) == [1, 0]
    assert _tail(encode(6, "base3"), 2) == [2, 0]
    assert encode(6, "base3").shape == (21,)


def test_one_gram_example():
    v = encode(123, "one_gram")
    assert v.shape == (10,)
    assert list(v) == [0, 0, 0, 0, 0, 0, 0, 1, 2, 3]


def test_two_gram_example():
    # padded digits of 1234 are 0000001234; pairs slide over them in order
    v = encode(1234, "two_gram")
    assert v.shape == (18,)
    assert list(v[-8:]) == [0, 1, 1, 2, 2, 3, 3, 4]
    assert all(x == 0 for x in v[:-8])


def test_three_gram_example():
    v = encode(1234, "three_gram")
    assert v.shape == (24,)
    assert list(v[-12:]) == [0, 0, 1, 0, 1, 2, 1, 2, 3, 2, 3, 4]


def test_one_gram_sum_example():
    v = encode(1234, "one_gram_sum")
    assert list(v) == [0, 0, 0, 0, 0, 0, 1, 2, 3, 4, 10]


def test_one_gram_sum_mod3_example():
    v = encode(1234, "one_gram_sum_mod3")
    assert list(v) == [0, 0, 0, 0, 0, 0, 1, 2, 3, 4, 1]


@pytest.mark.parametrize("kind", ["binary", "base3", "one_gram", "two_gram", "three_gram",
                                  "one_two_gram", "one_two_three_gram"])
def test_zero_encodes_to_zeros(kind):
    assert not np.any(encode(0, kind))


def test_widths():
    expected = {
        "raw": 1, "binary": 33, "base3": 21, "one_gram": 10, "two_gram": 18,
        "three_gram": 24, "one_two_gram": 28, "one_two_three_gram": 52,
        "one_gram_sum": 11, "one_gram_sum_mod3": 11,
    }
    assert encoders.KIND_WIDTHS == expected
    for kind, width in expected.items():
        assert encoders.EncoderSpec.of(kind).width == width
        assert encode(999, kind).shape == (width,)


def test_combined_kinds_concatenate_in_order():
    x = 987654321
    one = encode(x, "one_gram")
    two = encode(x, "two_gram")
    three = encode(x, "three_gram")
    assert np.array_equal(encode(x, "one_two_gram"), np.concatenate([one, two]))
    assert np.array_equal(encode(x, "one_two_three_gram"), np.concatenate([one, two, three]))


def test_decode_binary_example():
    v = np.zeros(33)
    v[-3:] = [1, 0, 1]
    assert decode(v, "binary") == 5


def test_decode_zero_vector():
    assert decode(np.zeros(10), "one_gram") == 0


def test_decode_base3_roundtrip_against_string_oracle():
    x = 987654321
    digits = []
    n = x
    while n:
        digits.append(n % 3)
        n //= 3
    oracle = int("".join(str(d) for d in reversed(digits)), 3)
    assert oracle == x  # sanity: the oracle itself round-trips
    assert decode(encode(x, "base3"), "base3") == x


def test_decode_rejects_non_positional_kind():
    with pytest.raises(ValueError, match="unsupported"):
        decode(np.zeros(18), "two_gram")


def test_decode_rejects_bad_digits():
    v = np.zeros(10)
    v[-1] = 11
    with pytest.raises(ValueError, match="malformed"):
        decode(v, "one_gram")
    with pytest.raises(ValueError, match="malformed"):
        decode(np.full(33, 1.0), "binary")  # 2**33 - 1 is outside the domain


def test_encode_rejects_out_of_domain():
    with pytest.raises(ValueError):
        encode(2**32 + 1, "one_gram")
    with pytest.raises(ValueError):
        encode(-3, "binary")
    with pytest.raises(ValueError):
        encode(1.5, "binary")


def test_encode_batch_reports_row_index():
    with pytest.raises(ValueError, match="row 2"):
        encode_batch(np.array([1.0, 2.0, 2.5]), "one_gram")


@settings(max_examples=200, deadline=None)
@given(st.integers(min_value=0, max_value=2**32),
       st.sampled_from(encoders.POSITIONAL_KINDS))
def test_positional_roundtrip(x, kind):
    assert decode(encode(x, kind), kind) == x


@settings(max_examples=100, deadline=None)
@given(st.integers(min_value=0, max_value=2**32))
def test_digit_sum_consistency(x):
    v = encode(x, "one_gram_sum")
    assert v[-1] == sum(v[:-1])
    assert v[-1] == sum(int(c) for c in str(x))


@settings(max_examples=100, deadline=None)
@given(st.integers(min_value=0, max_value=2**32))
def test_sum_mod3_matches_residue_oracle(x):
    v = encode(x, "one_gram_sum_mod3")
    assert v[-1] == sum(v[:-1]) % 3
    assert v[-1] == dataset.residue_oracle(x, 3)


@settings(max_examples=100, deadline=None)
@given(st.integers(min_value=0, max_value=2**32))
def test_two_gram_recomputable_from_one_gram(x):
    one = encode(x, "one_gram")
    recomputed = np.concatenate([one[i:i + 2] for i in range(9)])
    assert np.array_equal(encode(x, "two_gram"), recomputed)


def test_encode_dataset_matches_itemwise():
    d = dataset.generate(5, 64, 3)
    fm = encode_dataset(d, "binary")
    assert fm.values.shape == (64, 33)
    assert fm.spec == encoders.EncoderSpec.of("binary")
    for i in (0, 13, 63):
        assert np.array_equal(fm.values[i], encode(int(d.xs[i]), "binary"))


def test_encode_dataset_standard_protocol_shape():
    d = dataset.generate(1, 30000, 3)
    assert encode_dataset(d, "one_gram").values.shape == (30000, 10)
    assert encode_dataset(d, "one_two_three_gram").width == 52


def test_features_csv_roundtrip(tmp_path):
    d = dataset.generate(11, 20, 4)
    fm = encode_dataset(d, "one_gram_sum")
    path = tmp_path / "features.csv"
    encoders.write_features_csv(fm, d.ys, path)
    header = path.read_text().splitlines()[0]
    assert header == ",".join(f"f{i}" for i in range(11)) + ",y"
    X, y = encoders.read_features_csv(path)
    assert np.array_equal(X, fm.values)
    assert np.array_equal(y, d.ys)


def test_integer_encoder_transformer():
    enc = IntegerEncoder(kind="one_gram").fit(np.array([1, 2, 3]))
    out = enc.transform(np.array([123, 4]))
    assert np.array_equal(out, encode_batch(np.array([123, 4]), "one_gram"))
    assert enc.get_params() == {"kind": "one_gram"}
    clone = IntegerEncoder(**enc.get_params())
    assert np.array_equal(clone.fit(None, None).transform([7]), enc.transform([7]))
    assert list(enc.get_feature_names_out()) == [f"f{i}" for i in range(10)]


def test_integer_encoder_rejects_unknown_kind():
    with pytest.raises(ValueError, match="unknown encoder kind"):
        IntegerEncoder(kind="four_gram").fit([1])
