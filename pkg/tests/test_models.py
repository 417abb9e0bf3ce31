"""Built-in models against their closed-form first-order results."""

import numpy as np
import pytest

from msreduce.models import ModelSpec, build, expected_ms, special_case_flags
from msreduce.nondegenerate import effective_model


def random_lambda(rng):
    return ModelSpec(
        kind="lambda",
        omega_p=float(rng.uniform(0.5, 2.0)),
        omega_s=float(rng.uniform(0.5, 2.0)),
        shift=float(rng.uniform(-0.02, 0.02)),
    )


def random_tripod(rng):
    return ModelSpec(
        kind="tripod",
        omega_p=float(rng.uniform(0.5, 2.0)),
        omega_s=float(rng.uniform(0.5, 2.0)),
        omega_c=float(rng.uniform(0.5, 2.0)),
        shift=float(rng.uniform(-0.02, 0.02)),
    )


def random_double_lambda(rng, kind="double_lambda"):
    return ModelSpec(
        kind=kind,
        omega_c=float(rng.uniform(0.5, 2.0)),
        omega_d=float(rng.uniform(0.2, 1.8)),
        shift_g=float(rng.uniform(-0.02, 0.02)),
        shift_e=float(rng.uniform(-0.02, 0.02)),
    )


def test_spec_validation():
    with pytest.raises(ValueError, match="requires omega_s"):
        ModelSpec(kind="lambda", omega_p=1.0)
    with pytest.raises(ValueError, match="not a parameter"):
        ModelSpec(kind="lambda", omega_p=1.0, omega_s=1.0, omega_c=1.0)
    with pytest.raises(ValueError, match="shift_g"):
        ModelSpec(kind="tripod", omega_p=1, omega_s=1, omega_c=1, shift_g=0.1)
    with pytest.raises(ValueError, match="unknown model kind"):
        ModelSpec(kind="vee")


@pytest.mark.parametrize("seed", range(4))
def test_lambda_closed_form(seed):
    rng = np.random.default_rng(100 + seed)
    for _ in range(25):
        spec = random_lambda(rng)
        model = effective_model(build(spec))
        np.testing.assert_allclose(model.h_ms, expected_ms(spec), atol=1e-10)


@pytest.mark.parametrize("seed", range(4))
def test_tripod_closed_form(seed):
    rng = np.random.default_rng(200 + seed)
    for _ in range(25):
        spec = random_tripod(rng)
        model = effective_model(build(spec))
        np.testing.assert_allclose(model.h_ms, expected_ms(spec), atol=1e-10)


@pytest.mark.parametrize("kind", ["double_lambda", "diamond"])
def test_double_lambda_closed_form(kind):
    rng = np.random.default_rng(300)
    for _ in range(25):
        spec = random_double_lambda(rng, kind)
        model = effective_model(build(spec))
        np.testing.assert_allclose(model.h_ms, expected_ms(spec), atol=1e-10)


def test_tripod_dark_pair_ordering():
    rng = np.random.default_rng(7)
    for _ in range(20):
        spec = random_tripod(rng)
        d1, d2 = spec.dark_shift_pair()
        assert d1 <= d2
        model = effective_model(build(spec))
        assert model.qxi[0] == pytest.approx(model.h_ms[0, 0].real, abs=1e-14)


def test_expected_ms_requires_zero_detuning():
    spec = ModelSpec(kind="lambda", omega_p=1.0, omega_s=1.0, detuning=0.5)
    with pytest.raises(ValueError, match="zero common detuning"):
        expected_ms(spec)


def test_diamond_matches_double_lambda():
    # same coupling data, relabeled level diagram
    rng = np.random.default_rng(9)
    spec_dl = random_double_lambda(rng, "double_lambda")
    spec_di = ModelSpec(
        kind="diamond",
        omega_c=spec_dl.omega_c,
        omega_d=spec_dl.omega_d,
        shift_g=spec_dl.shift_g,
        shift_e=spec_dl.shift_e,
    )
    np.testing.assert_array_equal(build(spec_dl).coupling, build(spec_di).coupling)
    np.testing.assert_array_equal(expected_ms(spec_dl), expected_ms(spec_di))


def test_uncoupled_pair_flag():
    spec = ModelSpec(kind="double_lambda", omega_c=1.0, omega_d=1.0)
    flags = special_case_flags(spec)
    assert any("uncoupled" in f for f in flags)
    spec = ModelSpec(kind="tripod", omega_p=1.0, omega_s=1.0, omega_c=1.0, shift=0.01)
    assert any("phase" in f for f in special_case_flags(spec))
