import numpy as np
import pytest

from invmetric.audit import extremal_disk_radius, normalization_audit
from invmetric.product import finsler_product
from invmetric.domains import polydisk


@pytest.fixture(scope="module")
def report():
    return normalization_audit(seed=42)


def test_kob_variant_matches_oracle(report):
    assert report.matches == "kob"
    assert report.passed
    pd = [c for c in report.cases if c.space == "polydisk:2"]
    assert len(pd) == 20
    assert all(c.kob_error <= 1e-3 for c in pd)


def test_hyp_variant_is_twice(report):
    assert all(abs(c.hyp_over_kob - 2.0) <= 1e-9 for c in report.cases)
    assert report.flagged


def test_extremal_disk(report):
    for c in report.cases:
        if c.space == "polydisk:2":
            assert c.extremal_radius_kob == pytest.approx(1.0, abs=1e-12)
            assert c.extremal_radius_hyp == pytest.approx(0.5, abs=1e-12)


def test_half_plane_cases_finite_positive(report):
    hp = [c for c in report.cases if c.space.startswith("product:halfplane")]
    assert hp and all(np.isfinite(c.oracle) and c.oracle > 0 for c in hp)


def test_unit_speed_at_origin():
    assert float(finsler_product(polydisk(2), [0, 0], [1, 0])) == 1.0
    assert float(finsler_product(polydisk(2), [0, 0], [1, 0], "hyp")) == 2.0
    assert extremal_disk_radius([0, 0], [1, 0], 1.0) == 1.0


def test_report_dict(report):
    d = report.to_dict()
    assert d["matches"] == "kob" and len(d["cases"]) == len(report.cases)
