import numpy as np
import pytest

from prefstudy import formats
from prefstudy.ahp import ConsistencyReport, PriorityVector
from prefstudy.study import SubjectRecord


@pytest.fixture(scope="session")
def demo_design():
    return formats.demo_study()[0]


@pytest.fixture(scope="session")
def demo_fits(demo_design):
    return formats.demo_partworths(demo_design)


@pytest.fixture(scope="session")
def demo_cov(demo_design):
    return formats.demo_covariance(demo_design)


def make_record(subject_id, weights, cr=0.0):
    w = np.asarray(weights, dtype=float)
    report = ConsistencyReport(
        lambda_max=float(len(w)),
        ci=0.0,
        ri=0.58,
        cr=cr,
        acceptable_at_0_1=cr <= 0.1,
        acceptable_at_0_2=cr <= 0.2,
        cr_defined=len(w) >= 3,
    )
    return SubjectRecord(subject_id=subject_id, weights=PriorityVector(w), consistency=report)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20110529)
