import random
from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hpp.errors import GuardExceededError, InvariantViolationError
from hpp.fibers import (
    Analysis,
    apply_map,
    brute_fiber,
    classify_first,
    classify_second_n2,
    elimination_quadratic,
    eta_moments,
    eta_table,
    first_cap,
    good_sets,
    iter_eta_tables,
    n2_constraint,
    pick_analysis,
    solve_n2_triangular,
    summarize_good_sets,
    write_eta_csv,
)
from hpp.gf import make_field, parse_field

F3 = make_field(3)
F5 = make_field(5)
F7 = make_field(7)
F4 = parse_field("2^2")


def test_apply_map_fixture():
    # x=(1,1), b=(1,2) over GF(3): w1 = 1+2 = 0, w2 = 1+4 = 2
    assert apply_map(F3, (1, 1), (1, 2)) == (0, 2)
    assert apply_map(F3, (1, 1), (0, 0)) == (0, 0)
    assert apply_map(F5, (2,), (3,)) == (1,)  # 2*3 = 6 = 1


def test_apply_map_rows_extension():
    # rows beyond len(x): higher power sums
    assert apply_map(F5, (1, 1), (2, 3), rows=3) == (
        (2 + 3) % 5,
        (4 + 9) % 5,
        (8 + 27) % 5,
    )


def test_eta_table_fixture_gf3():
    table = eta_table(F3, (1, 1))
    assert table.counts == {
        (0, 0): 1,
        (0, 2): 2,
        (1, 1): 2,
        (1, 2): 1,
        (2, 1): 2,
        (2, 2): 1,
    }
    assert table.eta((0, 2)) == 2
    assert table.eta((1, 0)) == 0


def test_eta_table_solutions_consistent():
    for ctx in (F3, F5, F4):
        table = eta_table(ctx, (1, 2), store_solutions=True)
        for w, bs in table.solutions.items():
            assert len(bs) == table.counts[w]
            for b in bs:
                assert apply_map(ctx, (1, 2), b) == w


def test_numpy_and_python_paths_agree():
    for ctx in (F3, F5, F7):
        for x in product(range(ctx.d), repeat=2):
            fast = eta_table(ctx, x)
            slow = eta_table(ctx, x, store_solutions=True)
            assert fast.counts == slow.counts


def test_partition_identity_exhaustive():
    for ctx in (F3, F4, F5, F7):
        for table in iter_eta_tables(ctx, 2):
            table.check_partition()
            assert sum(table.counts.values()) == ctx.d**2


def test_partition_check_raises_on_corruption():
    table = eta_table(F3, (1, 1))
    table.counts[(0, 0)] += 1
    with pytest.raises(InvariantViolationError):
        table.check_partition()


def test_enumeration_budget_guard():
    big = make_field(1021)
    with pytest.raises(GuardExceededError):
        next(iter_eta_tables(big, 4))


def test_brute_fiber_matches_table():
    table = eta_table(F5, (2, 3), store_solutions=True)
    for w, bs in table.solutions.items():
        assert brute_fiber(F5, (2, 3), w) == sorted(bs)


def test_moments_first_is_exactly_one_at_k_equals_n():
    for d, n in ((3, 2), (5, 2), (7, 2), (3, 3)):
        first, second = eta_moments(make_field(d), n)
        assert first == 1
        assert isinstance(second, Fraction)


def test_moments_n1_second_closed_form():
    # eta over (x, w) in the n=1 map b -> x*b: x=0 contributes d, else 1
    for d in (3, 5, 7, 11):
        first, second = eta_moments(make_field(d), 1)
        assert first == 1
        assert second == Fraction(2 * d - 1, d)


def test_moments_partial_copies():
    first, _ = eta_moments(F5, 2, k=1)
    assert first == Fraction(1, 5)
    with pytest.raises(ValueError):
        eta_moments(F5, 2, k=3)


def test_n2_constraint():
    assert n2_constraint(F5, (1, 4)) == 0  # x1 + x2 = 0
    assert n2_constraint(F5, (0, 3)) == 0
    assert n2_constraint(F5, (1, 2)) != 0
    assert n2_constraint(F4, (1, 1)) == 0  # char 2: x + x = 0


def test_elimination_quadratic_annihilates_fiber():
    # the eliminated variable's quadratic vanishes on actual solutions
    for ctx in (F5, F7, F4):
        for x in product(range(ctx.d), repeat=2):
            if n2_constraint(ctx, x) == 0:
                continue
            table = eta_table(ctx, x, store_solutions=True)
            for w, bs in table.solutions.items():
                for var in (0, 1):
                    a2, a1, a0 = elimination_quadratic(ctx, x, w, var)
                    for b in bs:
                        t = b[var]
                        val = ctx.add(
                            ctx.add(ctx.mul(a2, ctx.mul(t, t)), ctx.mul(a1, t)), a0
                        )
                        assert val == 0, (ctx.d, x, w, var, b)


def test_triangular_vs_brute_exhaustive_small():
    for ctx in (F4, F5):
        checked = 0
        for x in product(range(ctx.d), repeat=2):
            if n2_constraint(ctx, x) == 0:
                continue
            for w in product(range(ctx.d), repeat=2):
                assert solve_n2_triangular(ctx, x, w) == sorted(brute_fiber(ctx, x, w))
                checked += 1
        assert checked > 0


def test_triangular_random_large_field():
    ctx = make_field(101)
    rng = random.Random("triangular-101")
    done = 0
    while done < 200:
        x = (rng.randrange(101), rng.randrange(101))
        if n2_constraint(ctx, x) == 0:
            continue
        w = (rng.randrange(101), rng.randrange(101))
        assert solve_n2_triangular(ctx, x, w) == sorted(brute_fiber(ctx, x, w))
        done += 1


def test_triangular_requires_nonzero_constraint():
    with pytest.raises(ValueError):
        solve_n2_triangular(F5, (1, 4), (0, 0))


@given(data=st.data())
@settings(max_examples=200, deadline=None)
def test_triangular_property(data):
    ctx = data.draw(st.sampled_from([F4, F5, F7]))
    elt = st.integers(min_value=0, max_value=ctx.d - 1)
    x = (data.draw(elt), data.draw(elt))
    w = (data.draw(elt), data.draw(elt))
    if n2_constraint(ctx, x) == 0:
        return
    assert solve_n2_triangular(ctx, x, w) == sorted(brute_fiber(ctx, x, w))


def test_first_cap_is_factorial():
    assert first_cap(1) == 1
    assert first_cap(2) == 2
    assert first_cap(3) == 6


def test_first_analysis_fiber_structure():
    # x with all coordinates nonzero: fibers obey eta <= 2 except the
    # degenerate pairs x1 + x2 = 0, which put everything with w = 0 in one
    # fiber of size d
    for d in (5, 7):
        ctx = make_field(d)
        for x in product(range(1, d), repeat=2):
            table = eta_table(ctx, x)
            degenerate = ctx.add(x[0], x[1]) == 0
            for w, eta in table.counts.items():
                if degenerate and w == (0, 0):
                    assert eta == d
                else:
                    assert 1 <= eta <= 2


def test_good_set_counts():
    # Second analysis: x1, x2, x1+x2 all nonzero
    for ctx in (F4, F5, F7):
        good = good_sets(ctx, 2, Analysis.SECOND)
        count = sum(
            good.x_good(x) for x in product(range(ctx.d), repeat=2)
        )
        assert count == (ctx.d - 1) * (ctx.d - 2)
    # First analysis: all coordinates nonzero
    for ctx in (F5, F7):
        good = good_sets(ctx, 2, Analysis.FIRST)
        count = sum(
            good.x_good(x) for x in product(range(ctx.d), repeat=2)
        )
        assert count == (ctx.d - 1) ** 2


def test_second_analysis_cap_is_theorem():
    # no fiber over a good x may exceed 4
    for ctx in (F4, F5, F7):
        good = good_sets(ctx, 2, Analysis.SECOND)
        for table in iter_eta_tables(ctx, 2):
            if not good.x_good(table.x):
                continue
            assert max(table.counts.values()) <= good.cap


def test_analysis_selection():
    assert pick_analysis(F5, 2) is Analysis.FIRST
    assert pick_analysis(F4, 2) is Analysis.SECOND
    assert pick_analysis(parse_field("2^3"), 2) is Analysis.SECOND
    with pytest.raises(ValueError):
        pick_analysis(F4, 3)  # no certificate applies
    with pytest.raises(ValueError):
        good_sets(F4, 2, Analysis.FIRST)  # needs p > n


def test_classify_helpers_match_good_sets():
    table = eta_table(F5, (1, 2))
    good_f = good_sets(F5, 2, Analysis.FIRST)
    good_s = good_sets(F5, 2, Analysis.SECOND)
    for w, eta in table.counts.items():
        assert classify_first(F5, 2, (1, 2), w, table) == good_f.w_good((1, 2), w, eta)
        assert classify_second_n2(F5, (1, 2), w, table) == good_s.w_good((1, 2), w, eta)
    with pytest.raises(ValueError):
        classify_first(F5, 2, (2, 2), (0, 0), table)


def test_summary_scan():
    good = good_sets(F4, 2, Analysis.SECOND)
    summary = summarize_good_sets(iter_eta_tables(F4, 2), good)
    assert summary.x_good_count == 6
    assert summary.w_good_min == 16
    assert summary.as_dict()["D"] == 4
    with pytest.raises(InvariantViolationError):
        summarize_good_sets([eta_table(F4, (1, 2))], good)


def test_csv_export(tmp_path):
    path = tmp_path / "eta.csv"
    write_eta_csv(eta_table(F3, (1, 1)), path)
    lines = path.read_text().splitlines()
    assert lines[0] == "x,w,eta"
    assert "1;1,0;0,1" in lines
    path2 = tmp_path / "eta_sol.csv"
    write_eta_csv(
        eta_table(F3, (1, 1), store_solutions=True), path2, include_solutions=True
    )
    text = path2.read_text()
    assert "solutions" in text.splitlines()[0]
    assert "0,2|2,0" in text
