"""Smoke test of the hullwalk Python module.

Build and install first:  pip install --no-build-isolation -e crates/py
Then run:                  python python/smoke_test.py
"""

import json
import math

import hullwalk


def close(a, b, tol=1e-12):
    return abs(a - b) <= tol * max(1.0, abs(b))


def main():
    square = [(0, 0), (1, 0), (1, 1), (0, 1), (0.5, 0.5)]
    assert len(hullwalk.convex_hull(square)) == 4
    assert close(hullwalk.perimeter(square), 4.0)
    assert close(hullwalk.diameter(square), math.sqrt(2))
    assert close(hullwalk.area(square), 1.0)
    assert hullwalk.perimeter([(2, 3)]) == 0.0
    assert close(hullwalk.hausdorff([(0, 0)], [(3, 4)]), 5.0)

    g = hullwalk.drift_geometry((1, 0), (0, 1))
    assert g.a1_holds and g.dominant == "difference"
    sl, sd = hullwalk.variance_constants((1, 0), (0, 1))
    assert close(sl, 4 + 2 * math.sqrt(2)) and close(sd, 2.0)
    assert hullwalk.variance_constants((0, 200), (200, 100))[1] is None
    assert not hullwalk.drift_geometry((100, 0), (100, 0)).a1_holds
    _, per, diam = hullwalk.limit_shape([(1, 0), (0, 1)])
    assert close(per, 2 + math.sqrt(2)) and close(diam, math.sqrt(2))

    s = hullwalk.run_experiment((1, 0), (0, 1), steps=400, reps=60, seed=42)
    again = hullwalk.run_experiment((1, 0), (0, 1), steps=400, reps=60, seed=42, workers=1)
    assert len(s) == 60 and s.perimeters == again.perimeters
    assert s.to_csv().splitlines()[0] == "rep,n,L,D"
    mean_l = sum(s.perimeters) / len(s) / 400
    assert abs(mean_l - (2 + math.sqrt(2))) < 0.1, mean_l

    p = hullwalk.normality_pvalue(s.perimeters)
    assert 0.0 < p <= 1.0
    try:
        hullwalk.normality_pvalue([1.0] * 20)
    except ValueError:
        pass
    else:
        raise AssertionError("constant sample accepted")

    spec = {"n": 2, "walks": [{"support": [[[1, 0], 0.5], [[0, 1], 0.5]]}] * 2}
    report = json.loads(hullwalk.oracle_report(json.dumps(spec)))
    assert report["decomposition"]["passed"]
    assert report["exact"]["outcomes"] == 16

    print("python smoke test passed")


if __name__ == "__main__":
    main()
