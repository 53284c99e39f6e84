"""Smoke test for the pyrtu extension module."""

import json
import math

import pyrtu


def close(a, b, tol=1e-9):
    return abs(a - b) <= tol


def main():
    pareto = pyrtu.Utility("pareto", {"kappa0": 1.0, "alpha": 1.0})
    assert pareto.evaluate(0.5) == 1.0
    assert close(pareto.evaluate(4.0), 0.25)

    a = pyrtu.RuntimeDistribution.discrete([(1.0, 0.99), (math.inf, 0.01)])
    b = pyrtu.RuntimeDistribution.dirac(864000.0)
    sa = pyrtu.score_analytic(a, pareto)["score"]
    sb = pyrtu.score_analytic(b, pareto)["score"]
    assert sa >= 0.99 and sb <= 1 / 864000, (sa, sb)

    step = pyrtu.Utility.from_json(json.dumps({"family": "step", "params": {"kappa": 2.0}}))
    r = pyrtu.score_empirical([0.5, 1.0, 3.0, 0.1], 2.0, step)
    assert close(r["score"], 0.75)
    assert r["ci"]["low"] <= r["score"] <= r["ci"]["high"]
    assert close(pyrtu.hoeffding_half_width(666, 0.95), math.sqrt(math.log(40) / 1332))

    exp1 = pyrtu.Utility("exponential", {"kappa0": 1.0})
    plan = pyrtu.plan(exp1, 0.1, 0.05)
    assert plan["m"] == 666
    assert close(plan["captime"], -math.log(0.05))

    est = pyrtu.estimate(pyrtu.RuntimeDistribution.dirac(0.0), exp1, 0.1, 0.05, seed=1)
    assert close(est["score"], 1.0)

    c = pyrtu.classical([1.0, 2.0, 10.0], 5.0, 2.0)
    assert close(c["par"], (1 + 2 + 10) / 3)

    sol = pyrtu.solve_maxent(json.dumps({"constraints": [{"type": "mean", "mean": 1.0}], "cells": 512}))
    assert close(sum(sol["masses"]), 1.0)
    assert all(abs(x) <= 1e-8 for x in sol["residuals"])

    try:
        pyrtu.Utility("pareto", {"kappa0": -1.0, "alpha": 1.0})
    except ValueError:
        pass
    else:
        raise AssertionError("negative kappa0 accepted")

    print("smoke test passed")


if __name__ == "__main__":
    main()
