from __future__ import annotations

import pytest

from disgen.metrics import MetricReport, ModeStat
from disgen.model_select import ModelSelectError, model_select


def report(**kw) -> MetricReport:
    base = dict(
        n_mcqs=126,
        dis_recall=0.0,
        any_dis_ref_match=0.0,
        any_dis_in_text=0.0,
        key_in_dis=0.0,
        any_same_dis=0.0,
        all_same_dis=0.0,
        any_dis_rep=0.0,
        any_dis_empty=0.0,
        any_dis_from_train_dis=0.0,
        mean_ncptk=0.0,
        median_ncptk=0.0,
        mode_ncptk=ModeStat(value=1.0, share=0.0),
        ncptk_pairs=0,
        ncptk_excluded=0,
        any_dis_cap_diff=0.0,
        any_dis_is_train_dis=0.0,
        any_dis_in_any_train_text=0.0,
        any_dis_in_train_text_not_own=0.0,
        all_dis_in_text=0.0,
        all_dis_in_train_text=0.0,
        all_dis_are_train_dis=0.0,
    )
    base.update(kw)
    return MetricReport(**base)


# dev-set numbers of the two best checkpoints per variant
L2R_BEST = report(
    dis_recall=12.41, any_dis_ref_match=21.43, any_dis_in_text=73.81,
    key_in_dis=3.17, any_same_dis=19.84, all_same_dis=0.79,
    any_dis_rep=0.00, any_dis_empty=0.00, any_dis_from_train_dis=6.35,
    mean_ncptk=0.39, median_ncptk=0.21, mode_ncptk=ModeStat(value=1.0, share=17.6),
)
UPMLM_BEST = report(
    dis_recall=21.43, any_dis_ref_match=37.30, any_dis_in_text=72.22,
    key_in_dis=5.56, any_same_dis=10.32, all_same_dis=0.79,
    any_dis_rep=1.59, any_dis_empty=0.00, any_dis_from_train_dis=2.38,
    mean_ncptk=0.41, median_ncptk=0.26, mode_ncptk=ModeStat(value=1.0, share=20.3),
)


def test_identical_reports_all_tied():
    result = model_select([("a", L2R_BEST), ("b", L2R_BEST)])
    assert result.wins == (12, 12)
    assert [r for r, _, _ in result.ranking] == [1, 1]


def test_best_checkpoints_comparison():
    result = model_select([("l2r", L2R_BEST), ("upmlm", UPMLM_BEST)])
    assert result.ranking[0][1] == "upmlm"
    by_label = {row.label: row for row in result.rows}
    assert by_label["DisRecall"].winners == (1,)
    assert by_label["AnyDisInText"].winners == (0,)
    assert by_label["AllSameDis"].winners == (0, 1)  # tied
    assert by_label["ModeNCPTK"].winners == (1,)  # same value, larger share
    # win counts: 9 for the arbitrary-order variant, 5 for left-to-right
    assert result.wins == (5, 9)


def test_dominating_report_wins_every_row():
    worse = report(
        dis_recall=1.0, any_dis_ref_match=1.0, any_dis_in_text=1.0,
        key_in_dis=9.0, any_same_dis=9.0, all_same_dis=9.0,
        any_dis_rep=9.0, any_dis_empty=9.0, any_dis_from_train_dis=9.0,
        mean_ncptk=0.1, median_ncptk=0.1, mode_ncptk=ModeStat(value=0.5, share=10.0),
    )
    better = report(
        dis_recall=2.0, any_dis_ref_match=2.0, any_dis_in_text=2.0,
        key_in_dis=1.0, any_same_dis=1.0, all_same_dis=1.0,
        any_dis_rep=1.0, any_dis_empty=1.0, any_dis_from_train_dis=1.0,
        mean_ncptk=0.9, median_ncptk=0.9, mode_ncptk=ModeStat(value=1.0, share=50.0),
    )
    result = model_select([("worse", worse), ("better", better), ("worse2", worse)])
    assert result.wins[1] == 12
    assert result.ranking[0] == (1, "better", 12)


def test_na_rows_not_ranked():
    with_na = report(any_dis_from_train_dis=None)
    result = model_select([("a", with_na), ("b", with_na)])
    by_label = {row.label: row for row in result.rows}
    assert by_label["AnyDisFromTrainDis"].winners == ()
    assert result.wins == (11, 11)


def test_single_report_rejected():
    with pytest.raises(ModelSelectError):
        model_select([("only", L2R_BEST)])


def test_table_formatting():
    result = model_select([("l2r", L2R_BEST), ("upmlm", UPMLM_BEST)])
    text = result.format_table()
    assert "ranking: #1 upmlm (9 wins), #2 l2r (5 wins)" in text.replace("  ", " ")
