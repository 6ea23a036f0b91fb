"""Smoke test for the topk_lsh_py extension module.

Build and install first:  pip install ./crates/python --no-build-isolation
"""

import os
import tempfile

import topk_lsh_py as t


def main():
    tau1, tau2, tau3 = [2, 5, 4, 3], [1, 4, 7, 5], [0, 8, 7, 5]
    q = [8, 1, 0, 6]
    assert t.kendall_k0(tau1, q) == 16
    assert t.kendall_k0(tau2, q) == 10
    assert t.kendall_k0(tau3, q) == 6
    assert t.min_overlap(10, 9.0) == 7
    assert abs(t.p1_scheme1(10, 9.0) - 7 / 13) < 1e-12
    assert abs(t.p1_scheme2(10, 9.0) - 0.91) < 1e-12
    assert t.candidate_probability(1.0, 2, 5) == 1.0
    assert abs(t.f_ratio(10, 9.0) - 700 / 2197) < 1e-12

    engine = t.Engine([tau1, tau2, tau3])
    assert len(engine) == 3 and engine.k == 4
    for method in ("oracle", "invin", "invin-drop", "scheme1"):
        assert engine.query(q, 0.5625, method=method, l=6) == [(2, 6)], method
    assert engine.query(q, 0.999) == [(1, 10), (2, 6)]

    for bad in ([8, 1], [8, 8, 1, 0]):
        try:
            engine.query(bad, 0.5)
        except ValueError:
            pass
        else:
            raise AssertionError(f"query {bad} should fail")

    big = t.Engine.generate(2000, 10, 500, dist="zipf", seed=3)
    src = big.ranking(17)
    probe = src[:]
    probe[0], probe[1] = probe[1], probe[0]
    hits = dict(big.query(probe, 0.1, method="scheme2", l=10))
    assert hits.get(17) == 1, hits

    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "data.txt")
        big.save(path)
        again = t.Engine.load(path)
        assert len(again) == 2000 and again.item_labels(17) == big.item_labels(17)
        assert again.label(17) == big.label(17)

    print("python smoke test passed")


if __name__ == "__main__":
    main()
