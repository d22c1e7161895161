import json
import math

import numpy as np
import pytest

import fxtflow as fx


def test_robust_bound_case1_parameters():
    assert fx.robust_bound(1.0, 3.0, 3.0, 2.0, 1.0, 1.0).value == pytest.approx(16.0 / 15.0)


def test_regret_bounds():
    assert fx.regret_bound("ge", 5.0, 2.0) == pytest.approx(0.25)
    assert fx.regret_bound("g1", 2.0, 1.0) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        fx.regret_bound("gpq", 2.0, 1.0, 0.5, 1.0)


def test_protocol_eval_and_constants():
    g = fx.Protocol.componentwise_power(0.5)
    np.testing.assert_allclose(g.eval(np.array([4.0, -9.0])), [2.0, -3.0])
    status, q, rho = fx.class_constants(fx.Protocol.componentwise_power(3.0), 4)
    assert status == "tabulated"
    assert q == pytest.approx(3.0) and rho == pytest.approx(0.25)
    ok, margin = fx.verify_class_membership(fx.Protocol.rescaled(0.5), 0.5, 1.0, 3, 2000, 7)
    assert ok and margin >= -1e-9


def test_nominal_flow_settles_within_bound():
    obj = fx.quadratic_objective(np.diag([1.0, 2.0]), np.zeros(2))
    flow = fx.first_order_flow(obj, fx.Protocol.rescaled(0.5) + fx.Protocol.power(2.0))
    cfg = fx.IntegratorConfig()
    cfg.dt = 1e-3
    cfg.t_max = 10.0
    cfg.settle_tol = 1e-6
    tr = fx.integrate(flow, np.array([3.0, -4.0]), obj, config=cfg)
    bound = fx.nominal_bound(1.0, 1.0, 1.0, 0.5, 2.0).value
    assert tr["settling_time"] is not None
    assert tr["settling_time"] <= bound * 1.05 + 0.01
    assert tr["states"].shape == (len(tr["times"]), 2)
    assert fx.measure_regret(tr, 0.0) > 0.0


def test_python_callable_objective():
    obj = fx.Objective(2, lambda x: 0.5 * float(x @ x), lambda x: x, f_star=0.0, pl_mu=1.0)
    assert fx.pl_residual(obj, np.array([3.0, 4.0])) == pytest.approx(0.0, abs=1e-12)
    flow = fx.first_order_flow(obj, fx.Protocol.identity())
    cfg = fx.IntegratorConfig()
    cfg.dt = 1e-2
    cfg.t_max = 1.0
    tr = fx.integrate(flow, np.array([1.0, 1.0]), obj, config=cfg)
    assert tr["costs"][-1] < tr["costs"][0]


def test_prox_and_envelope():
    h = fx.ProxFunction.l1_plus_box(1.0, np.full(2, -1.0), np.full(2, 1.0))
    np.testing.assert_allclose(fx.prox(h, 0.5, np.array([3.0, -0.2])), [1.0, 0.0])
    A = np.array([[1.0, 0.0], [1.0, 2.0]])
    f = fx.least_squares_objective(A, np.ones(2))
    x = np.array([0.3, -0.1])
    g = fx.fb_envelope_gradient(f, h, 0.1, x)
    eps = 1e-6
    fd = [(fx.fb_envelope(f, h, 0.1, x + eps * e) - fx.fb_envelope(f, h, 0.1, x - eps * e)) / (2 * eps)
          for e in np.eye(2)]
    np.testing.assert_allclose(g, fd, atol=1e-6)


def test_dispatch_kkt_matches_published_optimum():
    a = np.array([0.001562, 0.00194, 0.00482, 0.00228])
    b = np.array([7.92, 7.85, 7.97, 7.48])
    x, lam = fx.dispatch_kkt(a, b, 230.0)
    np.testing.assert_allclose(x, [42.87, 52.56, 8.71, 125.86], atol=5e-3)
    assert x.sum() == pytest.approx(230.0)
    assert lam == pytest.approx(8.05393, abs=1e-5)


def test_consensus_flow_rejects_non_componentwise():
    with pytest.raises(ValueError):
        fx.consensus_flow(fx.Graph.complete(4), fx.Protocol.rescaled(0.5))


def test_solve_config_roundtrip():
    cfg = {
        "schema_version": 1,
        "problem": {"type": "quadratic", "Q": [[2.0, 0.0], [0.0, 1.0]], "c": [0.0, 0.0]},
        "flow": {"variant": "first_order",
                 "protocol": [{"kind": "rescaled", "p": 0.5}, {"kind": "power", "q": 2.0}]},
        "integrator": {"dt": 1e-3, "t_max": 5.0, "settle_tol": 1e-6},
        "x0": [1.0, 2.0],
    }
    out = fx.solve_config(json.dumps(cfg))
    assert out["bound"] is not None and math.isfinite(out["bound"])
    assert out["settling_time"] is not None and out["settling_time"] <= out["bound"]


def test_case4_via_bindings():
    summary = fx.run_case(4, 4)
    assert summary["passed"] == "true"
