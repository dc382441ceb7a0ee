"""Smoke test for the clasper Python extension."""

import json

import clasper


def main():
    z3 = clasper.AbelianGroup([0, 0, 0])
    assert z3.rank() == 3
    assert z3.y_group_invariant_factors() == [0]
    assert clasper.AbelianGroup([2, 2]).is_isomorphic(clasper.AbelianGroup([2, 2]))
    assert clasper.AbelianGroup([2, 2, 2]).detect_trivector([((0, 1, 2), 1)]) == 2
    assert clasper.AbelianGroup([2, 2, 2]).detect_trivector([]) is None

    ball = clasper.Record.homology_sphere(0)
    e8 = clasper.Record.homology_sphere(8)
    assert ball.validate() == []
    verdict = clasper.decide(ball, e8)
    assert verdict["decision"] == "not-equivalent"
    assert verdict["reason"] == "Rochlin multiset mismatch"
    same = clasper.decide(ball, clasper.Record.from_json(ball.to_json()))
    assert same["decision"] == "equivalent"
    assert same["certificate"]["offset"] == ""

    doc = {
        "group": {"orders": [0, 0, 0]},
        "linking": [],
        "quadratic": {format(s, "03b")[::-1]: [] for s in range(8)},
        "cup": {},
        "rochlin": {format(s, "03b")[::-1]: 0 for s in range(8)},
        "moduli": [0, 2],
    }
    r = clasper.Record.from_json(json.dumps(doc))
    graphs = [{"sign": 1, "leaves": [[[1, 0, 0], [0, 1, 0, 0]], [[0, 1, 0], [0, 0, 1, 0]], [[0, 0, 1], [0, 0, 0, 1]]]}]
    s = r.surger(json.dumps(graphs))
    assert s.rochlin[0b111] == 8
    assert json.loads(s.to_json())["cup"]["0"] == {"0,1,2": 1}
    assert clasper.decide(r, s)["decision"] == "not-equivalent"
    assert clasper.decide(r, s, mode="y1-spin")["decision"] == "equivalent"

    passed, cases, failures = clasper.verify("trivectors", 16)
    assert passed and cases > 0 and failures == []
    assert clasper.verify("square", 5, seed=3)[0]
    print("python smoke test passed")


if __name__ == "__main__":
    main()
