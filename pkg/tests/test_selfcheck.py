"""Tests for the cross-validation battery."""

import time

from spintex.selfcheck import ALL_CHECKS, check_sign_audit, run_selfcheck


def test_selfcheck_passes_and_is_quick():
    lines = []
    t0 = time.time()
    assert run_selfcheck(echo=lines.append)
    elapsed = time.time() - t0
    assert elapsed < 300.0
    assert sum(1 for ln in lines if ln.startswith("[pass]")) \
        == len(ALL_CHECKS)
    assert not any(ln.startswith("[FAIL]") for ln in lines)
    assert lines[-1] == "all checks passed"


def test_sign_audit_control():
    # flipping the interaction sign must trip the audit
    assert check_sign_audit().passed
    assert not check_sign_audit(flip_sign=True).passed
