import math
from dataclasses import replace

import numpy as np
import pytest

from conftest import make_scenario
from qabc_offload.objective import ObjectiveWeights, evaluate
from qabc_offload.optimizer import (
    MAX_ORACLE_TASKS,
    OracleSizeError,
    QabcParams,
    _Tracker,
    brute_force_oracle,
    collapse_phase,
    employee_phase,
    onlooker_phase,
    onlooker_probabilities,
    run_baseline,
    run_qabc,
    scout_phase,
)
from qabc_offload.quantum import HALF_PI, QuantumIndividual, init_population
from qabc_offload.scenario import GenerationParams, generate_scenario

FAST = dict(n_pop=10, n_iter=5, scout_limit=3)


def three_tier_scenario():
    """One task: local 2 s, edge 1 s, cloud 3 s."""
    return make_scenario([(2e9, 0.0)], cpu_hz=1e9, mec_hz=2e9, cloud_hz=1e9, prop_delay_s=1.0)


def test_oracle_single_task_argmin():
    sc = three_tier_scenario()
    assert [evaluate(sc, [t]).total_latency_s for t in range(3)] == [2.0, 1.0, 3.0]
    res = brute_force_oracle(sc)
    assert res.best_decision == (1,) and res.best_fitness_s == 1.0
    assert res.evaluations == 3


def test_oracle_ten_tasks_enumerates_all():
    sc = make_scenario([(1e8 * (k + 1), 1e5) for k in range(10)])
    assert brute_force_oracle(sc).evaluations == 59049


def test_oracle_size_limit():
    sc = make_scenario([(1e8, 1e5)] * (MAX_ORACLE_TASKS + 1))
    with pytest.raises(OracleSizeError):
        brute_force_oracle(sc)


def test_oracle_tie_break_lexicographic():
    sc = make_scenario([(0.0, 0.0)] * 3, prop_delay_s=0.0)
    assert brute_force_oracle(sc).best_decision == (0, 0, 0)


def test_baselines():
    sc = make_scenario([(1e9, 1e6), (2e9, 1e6)], cpu_hz=1e9)
    assert run_baseline(sc, "all_local").best_fitness_s == pytest.approx(3.0)
    edge = run_baseline(sc, "all_edge")
    # second task waits for the first on the single RSU
    assert evaluate(sc, edge.best_decision).per_task_s == pytest.approx((1.5, 1.0 + 1.0 + 0.5))
    r1, r2 = run_baseline(sc, "uniform_random", seed=9), run_baseline(sc, "uniform_random", seed=9)
    assert r1 == r2 and len(r1.convergence) == 1
    with pytest.raises(ValueError):
        run_baseline(sc, "greedy")


def test_oracle_not_worse_than_baselines(reference):
    best = brute_force_oracle(reference).best_fitness_s
    for kind in ("all_local", "all_edge", "all_cloud", "uniform_random"):
        assert best <= run_baseline(reference, kind).best_fitness_s


def test_onlooker_probabilities():
    assert onlooker_probabilities([1.0, 3.0]) == pytest.approx([0.75, 0.25])
    assert onlooker_probabilities([2.0] * 4) == pytest.approx([0.25] * 4)
    p = onlooker_probabilities([1.0, math.inf])
    assert p[1] == 0.0 and p[0] == 1.0
    assert onlooker_probabilities([math.inf, math.inf]) == pytest.approx([0.5, 0.5])


def _flat_scenario():
    # every plan costs exactly zero
    return make_scenario([(0.0, 0.0)] * 4, prop_delay_s=0.0)


def test_employee_keeps_incumbent_on_tie():
    sc = _flat_scenario()
    params = QabcParams(**FAST)
    pop = [QuantumIndividual(np.full(4, 0.5), 2, np.zeros(4, int), 0.0) for _ in range(3)]
    out = employee_phase(pop, sc, params)
    assert all(o is p for o, p in zip(out, pop))


def test_employee_replaces_on_strict_improvement():
    sc = _flat_scenario()
    params = QabcParams(**FAST)
    pop = [QuantumIndividual(np.full(4, 0.5), 7, None, math.inf)]
    out = employee_phase(pop, sc, params)
    assert out[0].fitness == 0.0 and out[0].stagnation == 0
    assert not np.array_equal(out[0].thetas, pop[0].thetas)
    assert pop[0].stagnation == 7


def test_onlooker_replacement_and_ties():
    sc = _flat_scenario()
    params = QabcParams(**FAST)
    pop = [QuantumIndividual(np.full(4, 0.5), 1, np.zeros(4, int), 0.0),
           QuantumIndividual(np.full(4, 0.5), 1, np.zeros(4, int), 0.0)]
    assert all(o is p for o, p in zip(onlooker_phase(pop, sc, params), pop))


def test_scout_phase_rule():
    params = QabcParams(n_pop=3, n_iter=1, scout_limit=5)
    pop = [QuantumIndividual(np.full(3, 1.0), s) for s in (0, 5, 6)]
    out = scout_phase(pop, params)
    assert [o.stagnation for o in out] == [1, 6, 0]
    assert np.array_equal(out[1].thetas, pop[1].thetas)
    assert not np.array_equal(out[2].thetas, pop[2].thetas)
    assert np.all((out[2].thetas >= 0) & (out[2].thetas <= HALF_PI))


def test_phases_record_matching_fitness(reference):
    params = QabcParams(n_pop=8, n_iter=1, scout_limit=2, seed=4)
    tracker = _Tracker()
    pop = init_population(8, reference.n_tasks, np.random.default_rng(0))
    for phase in (collapse_phase, employee_phase, onlooker_phase):
        pop = phase(pop, reference, params, tracker=tracker)
        for ind in pop:
            assert ind.fitness == evaluate(reference, ind.decision).penalized_fitness
    assert tracker.evaluations == 8 * 3
    assert tracker.best_fitness <= min(ind.fitness for ind in pop)


def test_smallest_population(reference):
    res = run_qabc(reference, QabcParams(n_pop=2, n_iter=3, scout_limit=1))
    assert len(res.convergence) == 3 and res.evaluations == 18


def test_local_is_found_when_strictly_fastest():
    # local 0.1 s; edge and cloud both need a 1 s upload
    sc = make_scenario([(1e8, 1e6)], cpu_hz=1e9)
    assert brute_force_oracle(sc).best_decision == (0,)
    for seed in range(20):
        assert run_qabc(sc, QabcParams(n_pop=10, n_iter=20, seed=seed)).best_decision == (0,)


def test_deterministic(reference):
    p = QabcParams(**FAST, seed=123)
    assert run_qabc(reference, p) == run_qabc(reference, p)
    assert run_qabc(reference, p) != run_qabc(reference, replace(p, seed=124))


@pytest.mark.parametrize("n_jobs", [2, 5, -1])
def test_threads_do_not_change_result(reference, n_jobs):
    p = QabcParams(n_pop=12, n_iter=6, scout_limit=1, seed=77)
    assert run_qabc(reference, p, n_jobs=n_jobs) == run_qabc(reference, p)


def test_result_invariants_and_evaluation_budget(reference):
    p = QabcParams(n_pop=15, n_iter=12, scout_limit=2, seed=3)
    res = run_qabc(reference, p)
    assert len(res.convergence) == p.n_iter
    assert all(b <= a for a, b in zip(res.convergence, res.convergence[1:]))
    assert res.best_fitness_s == res.convergence[-1]
    assert res.best_fitness_s == evaluate(reference, res.best_decision).penalized_fitness
    assert res.evaluations <= p.n_iter * p.n_pop * 3 + p.n_pop
    assert res.best_fitness_s >= brute_force_oracle(reference).best_fitness_s


def test_all_infeasible_still_returns_plan():
    sc = make_scenario([(1e9, 1e6)] * 2, tx_power_w=0.0)
    res = run_qabc(sc, QabcParams(**FAST))
    assert res.best_decision is not None and len(res.best_decision) == 2
    # local is always reachable, so the colony finds a finite plan
    assert math.isfinite(res.best_fitness_s)


def test_penalty_steers_away_from_overload():
    sc = generate_scenario(GenerationParams(n_vehicles=3, n_rsus=1, tasks_per_vehicle=2,
                                            rsu_range_m=500.0, capacity_fraction=0.05), 2)
    res = run_qabc(sc, QabcParams(n_pop=20, n_iter=15, seed=1), ObjectiveWeights(lambda_cap=1e3))
    assert evaluate(sc, res.best_decision).capacity_excess_cycles["cloud"] == 0.0


@pytest.mark.parametrize("bad", [dict(n_pop=0), dict(n_pop=1), dict(n_iter=0), dict(scout_limit=0),
                                 dict(phi=0.0), dict(seed=-1), dict(seed=2**64)])
def test_params_validation(bad):
    with pytest.raises(ValueError):
        QabcParams(**bad)
