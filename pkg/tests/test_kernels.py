"""Cross-backend parity: the compiled and pure kernels must agree bit for bit."""

import numpy as np
import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

import schoolmatch
from schoolmatch._kernels import pykernels
from schoolmatch.mechanisms import boston, deferred_acceptance
from schoolmatch.strategy import _report_arrays

from conftest import instances

compiled = pytest.importorskip("schoolmatch._kernels._ckernels")


def test_backend_selection_reports_a_name():
    assert schoolmatch.kernel_backend in ("c", "python")


@given(instances(max_students=6, max_schools=4, max_capacity=3), st.integers(1, 5))
@settings(max_examples=150)
def test_da_and_boston_parity(inst, k):
    p = inst.packed()
    limit = np.full(inst.n_students, k, dtype=np.int32)
    for fn in ("da", "boston"):
        a = getattr(pykernels, fn)(p.prefs, p.plen, limit, p.prank, p.cap)
        b = getattr(compiled, fn)(p.prefs, p.plen, limit, p.prank, p.cap)
        assert np.array_equal(a, b), fn


@given(instances(max_students=6, max_schools=4, max_capacity=3), st.integers(1, 5), st.integers(0, 15))
@settings(max_examples=100)
def test_fpf_and_blocking_parity(inst, k, fpf_bits):
    p = inst.packed()
    limit = np.full(inst.n_students, k, dtype=np.int32)
    fpf = np.array(
        [(fpf_bits >> s) & 1 for s in range(inst.n_schools)], dtype=np.uint8
    )
    a = pykernels.fpf_adjust(p.prefs, p.plen, limit, p.prank, fpf)
    b = compiled.fpf_adjust(p.prefs, p.plen, limit, p.prank, fpf)
    assert np.array_equal(a, b)
    assign = pykernels.da(p.prefs, p.plen, limit, a, p.cap)
    ma = pykernels.blocking_mask(p.prefs, p.plen, p.prank, p.cap, assign)
    mb = compiled.blocking_mask(p.prefs, p.plen, p.prank, p.cap, assign)
    assert np.array_equal(ma, mb)


@given(instances(max_students=5, max_schools=3, max_capacity=2), st.integers(1, 3), st.integers(0, 1))
@settings(max_examples=80)
def test_improving_mask_parity(inst, k, mech):
    p = inst.packed()
    limit = np.full(inst.n_students, k, dtype=np.int32)
    reports, rlen = _report_arrays(inst.n_schools)
    check = np.ones(inst.n_students, dtype=np.uint8)
    a = pykernels.improving_mask(
        p.prefs, p.plen, p.prefs, p.plen, limit, p.prank, p.cap, mech, reports, rlen, check
    )
    b = compiled.improving_mask(
        p.prefs, p.plen, p.prefs, p.plen, limit, p.prank, p.cap, mech, reports, rlen, check
    )
    assert np.array_equal(a, b)


@given(instances(max_students=6, max_schools=4, max_capacity=3))
@settings(max_examples=100)
def test_round_by_round_twins_agree_with_kernels(inst):
    fast = deferred_acceptance(inst)
    traced, _ = deferred_acceptance(inst, trace=True)
    assert fast == traced
    fast = boston(inst)
    traced, _ = boston(inst, trace=True)
    assert fast == traced
