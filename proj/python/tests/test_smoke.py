import math

import pytest

import ffincidence as ff


def test_field_arithmetic():
    gf4 = ff.Field(4)
    assert (gf4.p, gf4.k) == (2, 2)
    assert gf4.mul(2, 2) == 3
    assert ff.Field(7).inv(3) == 5
    with pytest.raises(ValueError, match="unsupported field order 6"):
        ff.Field(6)


def test_full_space_incidences():
    field = ff.Field(2)
    points = ff.full_points(2, 2, 2)
    lines = ff.full_linepairs(2)
    assert len(points) == 16 and len(lines) == 36
    assert ff.count_incidences(field, points, lines) == 144
    assert ff.count_incidences(field, points, lines, method="naive") == 144
    cs1, cs2 = ff.verify_cs(field, points, lines)
    assert cs2["theorem_id"] == "cs2"
    assert cs2["ratio"] == pytest.approx(144 / 132)


def test_counters_agree_on_multisets():
    field = ff.Field(5)
    for seed in range(10):
        p = ff.multiset_random_points(5, 2, 2, 60, 4, seed)
        l = ff.random_linepairs(5, 80, False, seed + 100)
        assert ff.count_incidences(field, p, l, "naive") == ff.count_incidences(field, p, l, "indexed")


def test_set_text_round_trip():
    p = ff.multiset_random_points(3, 2, 2, 20, 3, 1)
    text = ff.dump_set(p)
    assert text.startswith("# ffincidence-set v1 q=3 kind=points")
    assert ff.load_points(text) == p


def test_graph_spectrum():
    g = ff.build_graph(ff.Field(2), 2, 2)
    assert (g.n, g.k) == (49, 9)
    report = ff.second_eigenvalue(g)
    assert report["lambda2"] == pytest.approx(3 * math.sqrt(2), abs=1e-9)
    assert report["within_explicit_bound"]


def test_applications():
    field = ff.Field(3)
    full = ff.full_points(3, 2, 2)
    assert ff.dot_product_pair_count(field, full, 1, 1, "as_written")["count"] == 648
    corrected = ff.dot_product_pair_count(field, full, 1, 1)
    assert corrected["count"] == corrected["reduction_count"]
    sp = ff.sum_product(field, ff.full_points(3, 2, 0))
    assert (sp["sumset"], sp["productset"]) == (9, 9)
    assert sp["lower_bound_ok"]


def test_runner_rows_and_errors():
    rows = ff.rows("verify", theorem="vinh", q=[2, 3], seeds="0..9", **{"lambda": "computed"})
    assert len(rows) == 20
    assert [int(r["q"]) for r in rows] == [2] * 10 + [3] * 10
    code, out, err = ff.run("spectrum", q=2)
    assert code == 0 and '"n": 49' in out
    with pytest.raises(ValueError, match="unsupported field order 6"):
        ff.run("verify", q=6)
