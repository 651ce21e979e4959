"""Smoke test for the compiled `liberata` module.

Build and copy the extension next to this file first:

    cargo build -p liberata-py --features extension-module --release
    cp target/release/libliberata_py.so python/liberata.so
    python3 python/smoke_test.py
"""

import os
import sys
import tempfile

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import liberata  # noqa: E402


def close(a, b, tol=1e-12):
    return abs(a - b) <= tol


def main():
    c = liberata.Corpus.fixture()
    assert len(c) == 3 and c.manuscripts == ["m1", "m2", "m3"], c
    a = liberata.Analysis(c)
    cap = a.capital()
    assert close(cap["m1"], 1.5) and close(cap["m2"], 0.5) and close(cap["m3"], 0.0), cap
    people = a.contributor_capital()
    for who, want in [("c1", 1.05), ("c2", 0.75), ("c3", 0.2)]:
        assert close(people[who], want), people

    acsm = liberata.Analysis(c, "base=inv_ref,acsm")
    edges = {(x, y): w for x, y, w in acsm.weighted_references()}
    assert close(edges[("m1", "m2")], 0.82), edges

    hhi, gini, h = liberata.concentration([0.7, 0.3])
    assert close(hhi, 0.58) and close(gini, 0.2) and abs(h - 0.8813) < 1e-4

    assert liberata.diversification_ratio([1.0], [[1.0, 2.0, 0.5, 3.0]]) is not None
    assert not liberata.provider_feasible(0.5, 1.0, 0.5)
    assert liberata.author_feasible(2.0, 1.0, 0.9, 1.0)

    with tempfile.TemporaryDirectory() as tmp:
        gen = liberata.synthesize(tmp, seed=7, manuscripts=80, contributors=25)
        back = liberata.Corpus.load(tmp)
        assert back.manuscripts == gen.manuscripts
        s = liberata.Analysis(back)
        citing = sum(1 for m in back.manuscripts if back.references(m))
        # retracted manuscripts drop out of effective capital
        assert 0 < s.total_capital() <= citing + 1e-9
        metrics = s.portfolio("contributor=" + back.contributors[0])
        assert metrics["capital"] >= 0
        parts = s.cluster(3)
        assert set(parts.values()) <= {0, 1, 2}

        bad = os.path.join(tmp, "shares.jsonl")
        with open(bad) as f:
            lines = f.readlines()
        with open(bad, "w") as f:
            f.writelines(lines[1:])
        try:
            liberata.Corpus.load(tmp)
        except liberata.ValidationError as e:
            assert any(rule == "share-sum" for rule, _, _ in e.args[0]), e
        else:
            raise AssertionError("truncated shares were accepted")

    try:
        a.portfolio("nonsense")
    except ValueError:
        pass
    else:
        raise AssertionError("bad selector was accepted")

    print("python smoke test passed")


if __name__ == "__main__":
    main()
