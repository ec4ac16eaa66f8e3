"""Tests for parameter generation, auditing, cost estimates and key exchange."""

import random

import pytest

from src.services.exchange_service import ExchangeService
from src.services.params_service import (
    ParamsService, ParamsServiceError, audit_params, cost_estimate, generate_params,
)


def test_generate_smallest_parameters():
    params = generate_params(3, 50)
    assert params.p == 419
    assert params.ells == (3, 5, 7)


def test_generate_skips_composite_products():
    params = generate_params(5, 50)
    assert params.ells == (3, 5, 7, 11, 17)
    assert params.p == 78539


def test_generate_respects_budget():
    with pytest.raises(ParamsServiceError):
        generate_params(5, 50, budget=1)
    with pytest.raises(ParamsServiceError):
        generate_params(4, 7)


def test_audit_accepts_toy_parameters():
    report = audit_params(419, [3, 5, 7], random.Random(1))
    assert report.passed
    assert report.class_number == 27
    assert {c.name for c in report.checks} >= {"p prime", "p = 3 mod 4", "class number odd"}


def test_audit_explains_p_one_mod_four(caplog):
    report = audit_params(13, rng=random.Random(2))
    assert not report.passed
    check = next(c for c in report.checks if c.name == "p = 3 mod 4")
    assert not check.passed
    assert "2-Sylow" in check.detail
    assert "2-Sylow" in caplog.text


def test_audit_flags_wrong_small_primes():
    report = audit_params(419, [3, 5, 11], random.Random(3))
    assert not report.passed
    failed = {c.name for c in report.checks if not c.passed}
    assert failed == {"p = 4*prod(ells) - 1", "ells odd primes dividing p + 1"}


def test_audit_rejects_composite():
    report = audit_params(15, rng=random.Random(4))
    assert not report.passed
    assert report.class_number is None


@pytest.mark.parametrize("log_p,classical,reference", [(512, 128, 62), (1024, 256, 94), (1792, 448, 129)])
def test_cost_columns(log_p, classical, reference):
    row = cost_estimate(log_p)
    assert row.classical_log2 == classical
    assert row.reference_quantum_log2 == reference
    assert 0 < row.query_log2 < row.subexp_log2 < row.classical_log2


def test_cost_out_of_range():
    with pytest.raises(ParamsServiceError):
        cost_estimate(32)
    result = ParamsService().costs([512, 8192])
    assert result['success'] is False
    assert result['rows'] == []


def test_service_wrappers():
    service = ParamsService(random.Random(5))
    assert service.generate(3, 50)['params'].p == 419
    assert service.generate(3, 5)['success'] is False
    audit = service.audit(419, [3, 5, 7])
    assert audit['success'] and audit['error'] is None
    audit = service.audit(13)
    assert audit['success'] is False and "p = 3 mod 4" in audit['error']


def test_exchange_service_agrees(params419):
    result = ExchangeService(params419, seed=1).exchange(count=5)
    assert result['success'] is True
    assert all(t.agreed and t.m == 1 for t in result['transcripts'])


def test_exchange_service_deterministic(params419):
    first = ExchangeService(params419, seed=3).exchange(count=3)['transcripts']
    second = ExchangeService(params419, seed=3).exchange(count=3)['transcripts']
    assert [t.model_dump_json() for t in first] == [t.model_dump_json() for t in second]


def test_keygen_records(params419):
    result = ExchangeService(params419, seed=2).generate_keys(count=4, m=2)
    assert result['success']
    records = result['records']
    assert [r.index for r in records] == [0, 1, 2, 3]
    assert all(len(r.secret) == 3 and all(abs(e) <= 2 for e in r.secret) for r in records)
