"""Smoke test for the pyframekit extension module.

Run with the built module on PYTHONPATH:

    cargo build -p framekit-py --release
    cp target/release/libpyframekit.so /tmp/pyframekit.so
    PYTHONPATH=/tmp python3 crates/python/python/smoke_test.py
"""

import json
import math

import pyframekit as fk


def close(a, b, tol=1e-10):
    return abs(a - b) <= tol


def fro(rows_a, rows_b):
    return math.sqrt(
        sum(abs(x - y) ** 2 for ra, rb in zip(rows_a, rows_b) for x, y in zip(ra, rb))
    )


def main():
    # e1, e1, e2 in C^2: frame operator diag(2, 1)
    frame = fk.Frame.from_vectors([[1, 0], [1, 0], [0, 1]])
    a, b = frame.bounds()
    assert close(a, 1.0) and close(b, 2.0), (a, b)

    x = [0.3 + 0.1j, -0.7 + 0.2j]
    coeffs = frame.analysis(x)
    out = frame.reconstruct(coeffs, target_error=1e-12, truth=x)
    assert out["certified_bounds"][-1] <= 1e-12
    assert max(abs(u - v) for u, v in zip(out["x"], x)) <= 1e-10
    assert max(abs(u - v) for u, v in zip(frame.reconstruct_direct(coeffs), x)) <= 1e-12
    assert out["csv"].startswith("iter,certified_bound")

    povm = frame.to_povm()
    report = povm.validate()
    assert report["passed"], report
    assert povm.is_framed()["framed"]
    assert fro(povm.total(), frame.frame_operator()) <= 1e-12

    trace = povm.decompose("trace")
    dyadic = povm.decompose("dyadic")
    assert close(sum(dyadic.weights), 1.25)
    uniq = fk.verify_uniqueness(trace, dyadic)
    assert uniq["max_residual"] <= 1e-10, uniq

    rebuilt = trace.to_ovf()
    eq = fk.verify_ovf_equivalence(frame, rebuilt)
    assert eq["max_residual"] <= 1e-10, eq

    # JSON round trips are exact
    assert fk.Povm.from_json(povm.to_json()).to_json() == povm.to_json()
    assert fk.Decomposition.from_json(trace.to_json()).to_json() == trace.to_json()
    assert fk.Frame.from_json(frame.to_json()).to_json() == frame.to_json()
    assert json.loads(frame.to_json())["dim_h"] == 2

    # seeded generators are deterministic
    g = fk.generate_povm(3, 5, seed=7)
    assert g.to_json() == fk.generate_povm(3, 5, seed=7).to_json()
    probs = g.normalized().probabilities([1, 0, 0])
    assert close(sum(probs), 1.0)
    assert fk.generate_frame(4, 9, seed=1).bounds()[0] > 0

    vals, vecs = fk.hermitian_eigen([[2, 1j], [-1j, 2]])
    assert close(vals[0], 1.0) and close(vals[1], 3.0)
    root = fk.psd_sqrt([[4, 0], [0, 9]])
    assert close(root[0][0].real, 2.0) and close(root[1][1].real, 3.0)

    try:
        fk.Frame.from_vectors([[1, 0], [2, 0]])
    except fk.FramekitError as e:
        assert str(e).startswith("NotAFrame"), str(e)
    else:
        raise AssertionError("non-spanning family accepted")

    print("pyframekit smoke test: ok")


if __name__ == "__main__":
    main()
