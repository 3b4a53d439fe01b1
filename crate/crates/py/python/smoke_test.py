"""Smoke test for the Python bindings.

Build and install first:  maturin develop  (or pip install a built wheel)
Then run:                 python python/smoke_test.py
"""

import cmath
import math

import grassmann


def close(a, b, tol=1e-12):
    return abs(a - b) <= tol


def main():
    e1 = grassmann.Subspace([[1.0], [0.0]])
    e2 = grassmann.Subspace([[0.0], [1j]])
    assert close(grassmann.min_angle(e1, e2), math.pi / 2)
    assert close(grassmann.gap(e1, e2), 1.0)

    diag = grassmann.Subspace([[1.0], [cmath.exp(0.3j)]])
    assert close(grassmann.min_angle(e1, diag), math.pi / 4)
    assert close(grassmann.gap(e1, diag), math.sqrt(0.5))
    assert close(grassmann.trace_product(e1, diag), 0.5)

    s = grassmann.Subspace.random(6, 2, seed=1)
    t = grassmann.Subspace.random(6, 2, seed=2)
    angles = grassmann.principal_angles(s, t)
    assert len(angles) == 2 and angles == sorted(angles)
    assert close(grassmann.gap(s, t), math.sin(angles[-1]), 1e-10)
    assert close(grassmann.trace_product(s, t), sum(math.cos(a) ** 2 for a in angles), 1e-10)
    assert grassmann.Subspace.from_json(s.to_json()).dim == 2
    assert s.complement().dim == 4

    rec = grassmann.recover_random_preserver(6, 2, seed=3, conjugate=True)
    assert rec["branch"] == "standard" and rec["max_residual"] < 1e-7
    rec = grassmann.recover_random_preserver(4, 2, seed=4, complement=True)
    assert rec["branch"] == "complement"

    report = grassmann.run_suite("direct-sum", seed=7, trials=200, d=3)
    assert report["pass"], report
    for name in ("two_by_two", "complement_cert", "degenerate"):
        assert grassmann.certificate(name)["valid"], name

    print("smoke test passed")


if __name__ == "__main__":
    main()
