"""Smoke test for the sparseres_py extension.

Build and install first:

    maturin build --release -m crates/python/Cargo.toml -o dist
    pip install dist/sparseres_py-*.whl
"""

import json

import sparseres_py as sr


def main():
    assert "two_conics" in sr.System.library_names()

    # x^2 - 5x + 6
    sys_ = sr.System.library("univariate")
    plan = sr.Plan.generate(sys_, seed=1)
    print(plan)
    roots = plan.solve({"a": 1.0, "b": -5.0, "c": 6.0})
    xs = sorted(r["point"][0].real for r in roots)
    assert len(xs) == 2
    assert abs(xs[0] - 2.0) < 1e-9 and abs(xs[1] - 3.0) < 1e-9, xs

    again = sr.Plan.from_json(plan.to_json())
    assert again.to_json() == plan.to_json()

    conics = sr.System.library("two_conics")
    cplan = sr.Plan.generate(conics, seed=1)
    report = json.loads(cplan.bench(200, seed=3))
    assert report["trials"] == 200
    assert report["fail_pct"] < 5.0, report

    coeffs = {"a1": 1.0, "a2": 2.0, "a3": -3.0, "b1": 1.0, "b2": -0.5}
    ref = conics.oracle_roots(coeffs)
    assert len(ref) == 4
    got = cplan.solve(coeffs)
    assert len(got) == 4
    assert max(r["residual"] for r in got) < 1e-8

    am = conics.action_matrix(coeffs)
    assert len(am) == 4 and all(len(row) == 4 for row in am)

    ok, size_match, dev = sr.compare(conics, "res-am", trials=20)
    assert ok and size_match, dev

    pts = sr.lattice_points([[[0, 0], [1, 0], [0, 1]], [[0, 0], [1, 0], [0, 1]]], [-1, -1], 0.1)
    assert len(pts) == 3, pts

    r = sorted(z.real for z in sr.univariate_roots([6.0, -5.0, 1.0]))
    assert abs(r[0] - 2.0) < 1e-12 and abs(r[1] - 3.0) < 1e-12

    try:
        plan.solve({"a": 1.0})
    except ValueError:
        pass
    else:
        raise AssertionError("missing slot should raise ValueError")

    print("smoke test passed")


if __name__ == "__main__":
    main()
