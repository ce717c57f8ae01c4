"""The built-in invariant suites must all pass on a fresh checkout."""

from hfbdyn.selftest import run_all


def test_selftest_suites_all_pass(capsys):
    failures = run_all()
    assert failures == []
    out = capsys.readouterr().out
    for name in ("car", "wick-vs-exact", "purity-transport",
                 "pairing-block-identity", "operator-bounds"):
        assert f"ok   {name}" in out
