"""Smoke test for the fixlogic_py extension module.

Run after `pip install -e . --no-build-isolation` from the repo root:

    python python/smoke_test.py
"""

import fixlogic_py as fx

CD = "vars n; while (n != 0) { n = n - 1; }"
SKIP_FOREVER = "vars x; while (true) { skip; }"


def main() -> None:
    # exact semantics agrees with the bounded interpreter
    t = fx.semantics(CD, -2, 3)
    o = fx.oracle(CD, -2, 3)
    assert t == o, "semantics and oracle disagree"
    assert ("{n=-1}", "BOT") in t["bot"], "negative entries must diverge"
    assert ("{n=3}", "{n=0}") in t["e"]

    # catalog and classification
    names = fx.catalog()
    assert "hoare" in names and "incorrectness" in names
    cls = fx.classify(CD, "n >= 0", "n == 0", -2, 3)
    assert cls["hoare"] and cls["apt-plotkin-assertional"]

    # single checks with witnesses
    holds, wit = fx.check("hoare", CD, "n >= 0", "n == 0", lo=-2, hi=3)
    assert holds and wit is None
    holds, wit = fx.check("apt-plotkin-assertional", SKIP_FOREVER, "true", "true")
    assert not holds and wit is not None and "BOT" in wit

    # relational quadruple through the extended Hoare logic
    holds, _ = fx.check(
        "ehl",
        CD,
        "true",
        "(old(n) >= 0 && n == 0) || (old(n) < 0 && bot)",
        lo=-2,
        hi=3,
    )
    assert holds

    # derivation checking: total correctness of the countdown loop
    cert = """\
while
  INVARIANT = old(n) >= n && n >= 0
  BODYOK = old(n) >= n && n >= 0
  BODYBR = empty
  atomic
"""
    accepted, failures, notices = fx.prove(
        "ehl", CD, cert, "n >= 0", "n == 0", lo=-2, hi=3
    )
    assert accepted, failures
    assert notices, "variant synthesis should leave a notice"

    # and a rejection with a named failing condition
    accepted, failures, _ = fx.prove("ehl", CD, cert, "true", "n == 0", lo=-2, hi=3)
    assert not accepted and failures

    print("smoke test passed")


if __name__ == "__main__":
    main()
