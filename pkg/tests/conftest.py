import hypothesis.strategies as st
import pytest
from hypothesis import HealthCheck, settings

from schoolmatch.model import Instance
from schoolmatch.strategy import all_reports

settings.register_profile(
    "suite", deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("suite")


@st.composite
def instances(
    draw,
    min_students=2,
    max_students=5,
    min_schools=1,
    max_schools=4,
    max_capacity=2,
    common_priority=False,
):
    """Small random instances with arbitrary preferences and priorities."""
    m = draw(st.integers(min_schools, max_schools))
    n = draw(st.integers(min_students, max_students))
    reports = all_reports(m)
    prefs = tuple(draw(st.sampled_from(reports)) for _ in range(n))
    if common_priority:
        order = tuple(draw(st.permutations(range(n))))
        prios = (order,) * m
    else:
        prios = tuple(tuple(draw(st.permutations(range(n)))) for _ in range(m))
    caps = tuple(draw(st.integers(1, max_capacity)) for _ in range(m))
    return Instance(prefs, prios, caps)


@pytest.fixture
def ladder_3x3():
    """Three unit schools ranked identically by three students, common priority."""
    return Instance(
        preferences=((0, 1, 2),) * 3,
        priorities=((0, 1, 2),) * 3,
        capacities=(1, 1, 1),
    )
