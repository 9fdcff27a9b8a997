import filecmp
import json
import math
import os

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from learnbranch.cli import main
from learnbranch.dqn import AgentConfig, DQNAgent
from learnbranch.estimator import LearnedValueSelector, check_instances
from learnbranch.harness import (CSVFormatError, RunConfig, emit_plots, evaluate_solver,
                                 performance_profile, plot_curve, plot_profile, read_results,
                                 train, validate_greedy)
from learnbranch.harness.csvio import TRAIN_CURVE_COLUMNS, TRAIN_CURVE_TYPES, read_csv
from learnbranch.harness.evaluate import RESULT_COLUMNS, TIMING_COLUMNS
from learnbranch.harness.profile import ProfileCurve, read_profile, write_profile
from learnbranch.problems import ColoringProblem, GraphColoringInstance, TSPTWProblem



def read_curve(path):
    return read_csv(path, TRAIN_CURVE_COLUMNS, TRAIN_CURVE_TYPES)


DATA = os.path.join(os.path.dirname(__file__), "data")


def small_config(tmp_path, name="run", **kw):
    base = dict(problem="coloring", generator={"n": 6, "k": 3}, episodes=20, eval_every=10,
                eval_set_size=3, test_set_size=2, baseline_trials=5,
                output_dir=str(tmp_path / name))
    base.update(kw)
    return RunConfig(**base)


# config

def test_config_lists_every_error():
    cfg = RunConfig(problem="coloring", episodes=-1, eval_every=0, select="last",
                    agent={"seed": 3}, seeds={"bogus": 1})
    errs = cfg.errors()
    assert len(errs) == 5
    with pytest.raises(ValueError, match="episodes"):
        cfg.validate()
    assert RunConfig(problem="knapsack").errors()[0].startswith("problem")
    assert "generator" in RunConfig(generator={"q": 1}).errors()[0]


def test_config_round_trip(tmp_path):
    cfg = small_config(tmp_path, agent={"lr": 0.001})
    cfg.save(tmp_path / "c.json")
    assert RunConfig.load(tmp_path / "c.json") == cfg
    with pytest.raises(ValueError):
        RunConfig.from_dict({"epochs": 3})


# training cadence

def test_zero_episodes_saves_initial_weights(tmp_path):
    cfg = small_config(tmp_path, episodes=0, test_set_size=0)
    out = train(cfg)
    assert out.curve == []
    assert read_curve(os.path.join(cfg.output_dir, "train_curve.csv")) == []
    fresh = DQNAgent(ColoringProblem(n=6, k=3).network_spec(), out.agent.config)
    saved = DQNAgent.load(os.path.join(cfg.output_dir, "checkpoints", "final.json"))
    for (_, a), (_, b) in zip(fresh.learner.online.params, saved.learner.online.params):
        assert np.array_equal(a.data, b.data)


def test_one_evaluation_row(tmp_path):
    cfg = small_config(tmp_path, episodes=30, eval_every=30, test_set_size=0)
    out = train(cfg)
    assert [r["episode"] for r in out.curve] == [30]


def test_smoke_run_has_three_rows(tmp_path):
    cfg = RunConfig(problem="coloring", generator={"n": 10}, episodes=90, eval_every=30,
                    eval_set_size=10, output_dir=str(tmp_path / "smoke"))
    out = train(cfg)
    rows = read_curve(os.path.join(cfg.output_dir, "train_curve.csv"))
    assert [r["episode"] for r in rows] == [30, 60, 90]
    assert all(r["n_instances"] == 10 for r in rows)
    ckpts = sorted(os.listdir(os.path.join(cfg.output_dir, "checkpoints")))
    assert ckpts == ["best.json", "episode_00030.json", "episode_00060.json",
                     "episode_00090.json", "final.json"]
    assert out.best_episode in (30, 60, 90)


def test_run_is_byte_reproducible(tmp_path):
    a = train(small_config(tmp_path, "a"))
    b = train(small_config(tmp_path, "b"))
    for name in ("train_curve.csv", "episodes.csv", "eval_results.csv", "profile.csv",
                 "train_curve.svg", "profile.svg", "checkpoints/final.json"):
        assert filecmp.cmp(os.path.join(a.output_dir, name), os.path.join(b.output_dir, name),
                           shallow=False), name


def test_validation_does_not_touch_the_agent():
    p = ColoringProblem(n=6, k=3)
    agent = DQNAgent(p.network_spec(), AgentConfig(seed=5))
    before = agent.learner.online.params.state_dict()
    steps, rng_state = agent.steps, agent.rng.bit_generator.state
    validate_greedy(p, agent, [p.generate(s) for s in range(3)])
    assert agent.steps == steps and len(agent.buffer) == 0
    assert agent.rng.bit_generator.state == rng_state
    for name, param in agent.learner.online.params:
        assert np.array_equal(param.data, before[name])


# evaluation

K4 = GraphColoringInstance(4, [(1, 2), (2, 3), (3, 4), (1, 4), (1, 3)])


def test_min_value_single_instance():
    rows = evaluate_solver(ColoringProblem(n=4, k=3), "min_value", [K4])
    assert len(rows) == 1 and rows[0].trials == 1 and rows[0].objective == 3


def test_random_order_statistics():
    p = ColoringProblem(n=10, k=4)
    (row,) = evaluate_solver(p, "random", [p.generate(0)], trials=200, seed=7)
    assert row.trials == 200
    assert row.nodes_best <= row.nodes_avg <= row.nodes_worst
    again = evaluate_solver(p, "random", [p.generate(0)], trials=200, seed=7)[0]
    assert again.result_record() == row.result_record()


def test_learned_evaluation_is_deterministic():
    p = ColoringProblem(n=8, k=4)
    agent = DQNAgent(p.network_spec(), AgentConfig(seed=1))
    inst = p.generate(4)
    a = evaluate_solver(p, agent, [inst])[0]
    b = evaluate_solver(p, agent, [inst])[0]
    assert a.result_record() == b.result_record() and a.solver == "learned"


def test_limit_gives_failure_row():
    p = ColoringProblem(n=10, k=4)
    (row,) = evaluate_solver(p, "random", [p.generate(1)], trials=3, node_limit=3)
    assert row.failures == 3 and row.status == "limit" and row.objective is None


def test_results_csv_round_trip(tmp_path):
    from learnbranch.harness import write_results, write_timing
    p = ColoringProblem(n=6, k=3)
    rows = evaluate_solver(p, "random", [p.generate(0), p.generate(1)], trials=4)
    write_results(rows, tmp_path / "r.csv")
    write_timing(rows, tmp_path / "t.csv")
    back = read_results(tmp_path / "r.csv")
    assert [r["nodes_worst"] for r in back] == [r.nodes_worst for r in rows]
    assert open(tmp_path / "r.csv").readline().strip() == ",".join(RESULT_COLUMNS)
    assert open(tmp_path / "t.csv").readline().strip() == ",".join(TIMING_COLUMNS)


# performance profiles

def test_profile_two_solvers():
    c = performance_profile({"A": {"p": 10}, "B": {"p": 20}})
    assert c["A"].at(1) == 1 and c["B"].at(1) == 0 and c["B"].at(2) == 1


def test_profile_identical_solvers():
    c = performance_profile({"A": {"p": 3, "q": 5}, "B": {"p": 3, "q": 5}})
    for s in "AB":
        assert c[s].at(1) == 1 and c[s].at(0.999) == 0


def test_profile_hand_computed():
    table = {"A": {1: 1, 2: 2, 3: 4, 4: math.inf},
             "B": {1: 2, 2: 2, 3: 2, 4: 2},
             "C": {1: 4, 2: 1, 3: 8, 4: 3}}
    c = performance_profile(table)
    # ratios: A (1, 2, 2, ∞)  B (2, 2, 1, 1)  C (4, 1, 4, 1.5)
    np.testing.assert_array_equal(c["A"].tau, [1, 1.5, 2, 4])
    np.testing.assert_allclose(c["A"].rho, [0.25, 0.25, 0.75, 0.75])
    np.testing.assert_allclose(c["B"].rho, [0.5, 0.5, 1, 1])
    np.testing.assert_allclose(c["C"].rho, [0.25, 0.5, 0.5, 1])


def test_profile_errors():
    with pytest.raises(ValueError):
        performance_profile({"A": {1: 1}})
    with pytest.raises(ValueError):
        performance_profile({"A": {1: 1}, "B": {2: 1}})
    with pytest.raises(ValueError):
        performance_profile({"A": {1: 0}, "B": {1: 1}})


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(st.one_of(st.integers(1, 50), st.just(None)), min_size=3, max_size=3),
                min_size=1, max_size=8))
def test_profile_monotone_and_bounded(rows):
    table = {s: {i: r[j] for i, r in enumerate(rows)} for j, s in enumerate("ABC")}
    if all(v is None for r in rows for v in r):
        return
    for c in performance_profile(table).values():
        assert np.all(np.diff(c.rho) >= 0)
        assert np.all((c.rho >= 0) & (c.rho <= 1))
        assert np.all(np.diff(c.tau) > 0) and c.tau[0] == 1


def test_profile_csv_round_trip(tmp_path):
    c = performance_profile({"A": {1: 3, 2: 5}, "B": {1: 4, 2: 5}})
    write_profile(c, tmp_path / "p.csv")
    back = read_profile(tmp_path / "p.csv")
    assert list(back) == ["A", "B"]
    np.testing.assert_allclose(back["A"].rho, c["A"].rho)


# plots

def series_markers(svg, gid="series"):
    start = svg.find(f'<g id="{gid}">')
    assert start >= 0
    return svg[start:].split("</g>")[0].count("<use")


def test_empty_series_gives_axes_only(tmp_path):
    plot_curve([], tmp_path / "e.svg")
    svg = open(tmp_path / "e.svg").read()
    assert 'id="axes_1"' in svg and 'id="series"' not in svg


def test_single_point_gives_one_marker(tmp_path):
    plot_curve([{"episode": 30, "mean_nodes": 12.5}], tmp_path / "one.svg")
    assert series_markers(open(tmp_path / "one.svg").read()) == 1
    plot_curve([{"episode": e, "mean_nodes": 3.0} for e in (30, 60, 90)], tmp_path / "three.svg")
    assert series_markers(open(tmp_path / "three.svg").read()) == 3


GOLDEN_CURVES = {"learned": ProfileCurve("learned", np.array([1.0, 1.5, 2.0]),
                                         np.array([0.5, 0.75, 1.0])),
                 "random": ProfileCurve("random", np.array([1.0, 1.5, 2.0]),
                                        np.array([0.25, 0.5, 0.5]))}


def test_profile_svg_matches_golden(tmp_path):
    out = tmp_path / "profile.svg"
    plot_profile(GOLDEN_CURVES, out)
    svg = open(out).read()
    assert series_markers(svg, "series-learned") == 3
    with open(os.path.join(DATA, "golden_profile.svg")) as fh:
        assert svg == fh.read()


def test_emit_plots_detects_schema(tmp_path):
    write_profile(GOLDEN_CURVES, tmp_path / "profile.csv")
    (path,) = emit_plots([tmp_path / "profile.csv"], tmp_path / "svg")
    assert path.endswith("profile.svg") and os.path.getsize(path) > 0
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b\n1,2\n")
    with pytest.raises(CSVFormatError) as err:
        emit_plots([bad], tmp_path / "svg")
    assert err.value.lineno == 1


def test_malformed_csv_reports_line(tmp_path):
    write_profile(GOLDEN_CURVES, tmp_path / "p.csv")
    lines = open(tmp_path / "p.csv").read().splitlines()
    lines[3] = "learned,oops,0.5"
    (tmp_path / "p.csv").write_text("\n".join(lines) + "\n")
    with pytest.raises(CSVFormatError) as err:
        emit_plots([tmp_path / "p.csv"], tmp_path / "svg")
    assert err.value.lineno == 4 and str(err.value).startswith(f"{tmp_path / 'p.csv'}:4:")


# command line

def test_cli_generate_evaluate_profile_plot(tmp_path, capsys):
    inst = tmp_path / "inst"
    assert main(["generate", "--problem", "coloring", "--n", "6", "--k", "3", "--count", "3",
                 "--seed", "5", "--out", str(inst)]) == 0
    assert sorted(os.listdir(inst)) == [f"coloring_{i:04d}.col" for i in range(3)]
    ev = tmp_path / "ev"
    assert main(["evaluate", "--instances", str(inst), "--baseline", "min_value",
                 "--baseline", "random", "--trials", "5", "--out", str(ev)]) == 0
    rows = read_results(ev / "eval_results.csv")
    assert [r["solver"] for r in rows] == ["min_value"] * 3 + ["random"] * 3
    assert main(["profile", "--inputs", str(ev / "eval_results.csv"), "--out",
                 str(tmp_path / "prof")]) == 0
    assert os.path.exists(tmp_path / "prof" / "profile.svg")
    assert main(["plot", "--inputs", str(tmp_path / "prof" / "profile.csv"), "--out",
                 str(tmp_path / "plots")]) == 0


def test_cli_train_and_evaluate_checkpoint(tmp_path):
    cfg = small_config(tmp_path, test_set_size=0)
    cfg.save(tmp_path / "c.json")
    assert main(["train", "--config", str(tmp_path / "c.json")]) == 0
    ckpt = os.path.join(cfg.output_dir, "checkpoints", "best.json")
    inst = tmp_path / "inst"
    main(["generate", "--problem", "coloring", "--n", "6", "--k", "3", "--count", "2",
          "--seed", "1", "--out", str(inst)])
    assert main(["evaluate", "--checkpoint", ckpt, "--instances", str(inst),
                 "--out", str(tmp_path / "ev")]) == 0
    assert [r["solver"] for r in read_results(tmp_path / "ev" / "eval_results.csv")] == [
        "learned", "learned"]


def test_cli_errors(tmp_path, capsys):
    (tmp_path / "c.json").write_text(json.dumps({"problem": "coloring", "episodes": -2}))
    assert main(["train", "--config", str(tmp_path / "c.json")]) == 2
    assert "episodes" in capsys.readouterr().err
    assert main(["generate", "--problem", "tsptw", "--n", "5", "--k", "3", "--count", "1",
                 "--seed", "0", "--out", str(tmp_path / "x")]) == 2
    assert main(["evaluate", "--instances", str(tmp_path)]) == 2
    assert main(["plot", "--inputs", str(tmp_path / "missing.csv"), "--out",
                 str(tmp_path)]) == 1


# estimator

def test_estimator_fit_predict_score():
    est = LearnedValueSelector(problem_params={"n": 6, "k": 3}, episodes=15, random_state=2)
    assert est.get_params()["episodes"] == 15
    p = ColoringProblem(n=6, k=3)
    X = [p.generate(s) for s in range(3)]
    est.fit(X)
    assert est.n_episodes_ == 15 and est.train_nodes_.shape == (15,)
    pred = est.predict(X)
    assert pred.dtype == np.int64 and pred.shape == (3,)
    assert est.score(X) == -pred.mean()
    again = LearnedValueSelector(problem_params={"n": 6, "k": 3}, episodes=15,
                                 random_state=2).fit(X)
    assert np.array_equal(again.predict(X), pred)


def test_estimator_fresh_instances_and_clone():
    from sklearn.base import clone
    est = LearnedValueSelector(problem="tsptw", problem_params={"n": 5}, episodes=5)
    c = clone(est)
    assert c.get_params() == est.get_params()
    c.fit()
    assert c.n_episodes_ == 5


def test_estimator_input_checks():
    p = ColoringProblem(n=4, k=3)
    with pytest.raises(TypeError):
        check_instances("abc", p)
    with pytest.raises(TypeError):
        check_instances([1, 2], p)
    with pytest.raises(ValueError):
        check_instances([], p)
    with pytest.raises(ValueError):
        check_instances([ColoringProblem(n=6, k=3).generate(0)], p)
    assert check_instances([K4], p) == [K4]
    with pytest.raises(ValueError):
        check_instances([TSPTWProblem(n=5).generate(0)], TSPTWProblem(n=6))
    with pytest.raises(ValueError):
        LearnedValueSelector(problem="maxcut").fit()
    with pytest.raises(ValueError):
        LearnedValueSelector(episodes=-1).fit()
    from sklearn.exceptions import NotFittedError
    with pytest.raises(NotFittedError):
        LearnedValueSelector().predict([K4])
