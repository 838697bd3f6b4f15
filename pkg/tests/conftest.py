import pytest

from multinorm_sha import (
    Character,
    FieldConfig,
    KummerSpec,
    LocalData,
    PGroup,
    build_kummer,
    validate_and_normalize,
)


def abstract_config(p, exponents, char_specs, labels=None):
    """(exponent, coeffs) pairs -> normalized config with no places."""
    group = PGroup(p, tuple(exponents))
    chars = tuple(Character(group, eps, tuple(coeffs)) for eps, coeffs in char_specs)
    labels = tuple(labels) if labels else ()
    return validate_and_normalize(FieldConfig(group, chars, labels))


def kummer_config(radicands):
    raw, local = build_kummer(KummerSpec(tuple(radicands)))
    return validate_and_normalize(raw), local


NO_PLACES = LocalData(())


@pytest.fixture
def quartic_17_13():
    """K = Q(i)(4rt 17), Q(i)(4rt 221), Q(i)(4rt 13)."""
    return kummer_config([17, 17 * 13, 13])


@pytest.fixture
def quartic_17_409():
    return kummer_config([17, 17 * 409, 409])


@pytest.fixture
def quartic_bicyclic():
    """K = Q(i)(4rt 13), Q(i)(4rt 17), Q(i)(4rt 13*17^2)."""
    return kummer_config([13, 17, 13 * 17 * 17])
