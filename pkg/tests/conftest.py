"""Shared fixtures: cached small fields and an extended-run gate."""

from __future__ import annotations

import os

import pytest

from apnlab.gf2n import Field, field_new

_FIELDS: dict[int, Field] = {}


def get_field(n: int) -> Field:
    """Default-modulus field, cached across tests (tables are immutable)."""
    if n not in _FIELDS:
        _FIELDS[n] = field_new(n)
    return _FIELDS[n]


@pytest.fixture
def field8() -> Field:
    return get_field(8)


def extended_enabled() -> bool:
    return os.environ.get("APNLAB_EXTENDED", "") == "1"


requires_extended = pytest.mark.skipif(
    not extended_enabled(),
    reason="release-gating check; set APNLAB_EXTENDED=1 to run",
)
