"""Time the compiled kernels against the pure-numpy fallback.

Runs the full objective+gradient evaluation on a mid-sized problem for every
available backend, serial and threaded, and checks that the numbers agree.
Invoke as:  python3 benchmarks/bench_backends.py
"""

import time

import numpy as np

from wdro import (
    Dataset,
    DualState,
    Logistic,
    ModelParams,
    RobustConfig,
    available_backends,
    build_clouds,
    dual_value_and_grad,
    warm_up,
)

N, D, M = 400, 10, 64
REPEATS = 7


def make_problem():
    rng = np.random.default_rng(0)
    ds = Dataset(rng.normal(size=(N, D)), rng.choice([-1.0, 1.0], size=N))
    params = ModelParams(0.3 * rng.normal(size=D), 0.1)
    dual = DualState(0.5)
    cfg = RobustConfig(rho=0.1, epsilon=0.05, sigma=0.3, m_samples=M, seed=1)
    return ds, params, dual, cfg


def bench(backend, workers):
    ds, params, dual, cfg = make_problem()
    loss = Logistic()
    # fixed clouds so the timing isolates the kernels, not the sampler
    clouds = build_clouds(loss, params, ds, cfg, use_importance_sampling=True)

    def once():
        return dual_value_and_grad(
            loss, params, dual, ds, cfg, clouds=clouds,
            backend=backend, workers=workers,
        )

    once()  # untimed pass (allocations, thread pool spin-up)
    best = np.inf
    for _ in range(REPEATS):
        t0 = time.perf_counter()
        value, grad = once()
        best = min(best, time.perf_counter() - t0)
    return best, value.total, grad.grad_alpha


def main():
    warm_up()
    print(f"problem: n={N} anchors, d={D}, m={M} cloud points, logistic loss")
    print(f"{'backend':<10} {'workers':>7} {'best of ' + str(REPEATS):>12} {'speedup':>9}")
    rows = []
    for backend in available_backends():
        for workers in (1, 4):
            secs, total, galpha = bench(backend, workers)
            rows.append((backend, workers, secs, total, galpha))
    base = next(r[2] for r in rows if r[0] == "numpy" and r[1] == 1)
    for backend, workers, secs, _, _ in rows:
        print(f"{backend:<10} {workers:>7} {secs * 1e3:>10.2f}ms {base / secs:>8.1f}x")
    totals = {r[3] for r in rows}
    spread = max(totals) - min(totals)
    print(f"objective spread across configurations: {spread:.3e}")
    assert spread < 1e-9, "backends disagree"


if __name__ == "__main__":
    main()
