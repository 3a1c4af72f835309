"""Seed derivation and stream determinism."""

import numpy as np
import pytest

from jllab.seeds import Seed, as_seed, mix64


def test_mix64_is_pure_and_bounded():
    a = mix64(12345)
    assert a == mix64(12345)
    assert 0 <= a < 2**64
    assert mix64(12345) != mix64(12346)


def test_child_values_are_frozen():
    # golden values: any change to the derivation breaks every stream
    s = Seed(12345)
    assert s.child(0).value == 2454886589211414944
    assert s.child(1).value == 3778200017661327597
    assert s.child(7).value == 7959005890829367068


def test_child_is_pure_function_of_value_and_index():
    s = Seed(99)
    first = [s.child(i).value for i in range(10)]
    second = [Seed(99).child(i).value for i in reversed(range(10))]
    assert first == list(reversed(second))
    assert len(set(first)) == 10


def test_seed_validation():
    with pytest.raises(ValueError):
        Seed(-1)
    with pytest.raises(ValueError):
        Seed(2**64)
    with pytest.raises(TypeError):
        Seed(1.5)
    with pytest.raises(ValueError):
        Seed(0).child(-1)
    Seed(2**64 - 1).child(2**64)  # large indexes reduce mod 2^64


def test_generator_streams_are_reproducible():
    a = Seed(7).generator().standard_normal(8)
    b = Seed(7).generator().standard_normal(8)
    assert np.array_equal(a, b)
    c = Seed(8).generator().standard_normal(8)
    assert not np.array_equal(a, c)


def test_generator_uses_sfc64():
    assert type(Seed(0).generator().bit_generator).__name__ == "SFC64"


def test_as_seed():
    assert as_seed(5) == Seed(5)
    assert as_seed(Seed(5)) == Seed(5)
