import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from conftest import make_scenario
from qabc_offload import (
    BaselineOffloader,
    ExhaustiveOffloader,
    QABCOffloader,
    check_scenario,
)
from qabc_offload.scenario import REFERENCE_SCENARIO_PATH, dumps_scenario, scenario_to_dict


def test_params_round_trip():
    est = QABCOffloader(n_pop=12, random_state=5)
    params = est.get_params()
    assert params["n_pop"] == 12 and params["random_state"] == 5
    twin = clone(est)
    assert twin.get_params() == params
    twin.set_params(n_iter=3)
    assert twin.n_iter == 3 and est.n_iter == 20


def test_fit_predict(reference):
    est = QABCOffloader(n_pop=10, n_iter=5, random_state=1).fit(reference)
    assert est.predict().shape == (8,)
    assert est.convergence_.shape == (5,)
    assert est.n_evaluations_ == 150
    assert est.score(reference) == -est.best_fitness_
    np.testing.assert_array_equal(est.fit_predict(reference), est.predict(reference))


def test_not_fitted():
    with pytest.raises(NotFittedError):
        QABCOffloader().predict()


def test_predict_checks_task_count(reference):
    est = BaselineOffloader("all_local").fit(reference)
    with pytest.raises(ValueError, match="fitted on 8 tasks"):
        est.predict(make_scenario([(1e9, 1e6)]))


@pytest.mark.parametrize("source", ["scenario", "dict", "text", "path", "strpath"])
def test_check_scenario_inputs(reference, source):
    X = {"scenario": reference, "dict": scenario_to_dict(reference), "text": dumps_scenario(reference),
         "path": REFERENCE_SCENARIO_PATH, "strpath": str(REFERENCE_SCENARIO_PATH)}[source]
    assert check_scenario(X) == reference


def test_check_scenario_rejects_arrays():
    with pytest.raises(TypeError):
        check_scenario(np.zeros((3, 3)))


def test_exhaustive_and_baselines(reference):
    oracle = ExhaustiveOffloader().fit(reference)
    assert oracle.n_evaluations_ == 3 ** 8
    for kind in ("all_local", "all_edge", "all_cloud", "uniform_random"):
        base = BaselineOffloader(kind).fit(reference)
        assert base.best_fitness_ >= oracle.best_fitness_
    with pytest.raises(ValueError, match="strategy"):
        BaselineOffloader("nope").fit(reference)


def test_objective_params_forwarded():
    sc = make_scenario([(1e9, 1e6)] * 2)
    est = BaselineOffloader("all_edge", queue_mode="constant", q_edge_s=1.0).fit(sc)
    assert est.report(sc).per_task_s == pytest.approx((2.5, 2.5))


def test_n_jobs_is_scheduling_only(reference):
    a = QABCOffloader(n_pop=8, n_iter=4, random_state=3).fit(reference)
    b = QABCOffloader(n_pop=8, n_iter=4, random_state=3, n_jobs=4).fit(reference)
    assert a.result_ == b.result_


def test_module_example_runs():
    import doctest

    from qabc_offload import estimators

    assert doctest.testmod(estimators).failed == 0
