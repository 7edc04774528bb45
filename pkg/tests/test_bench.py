import numpy as np
import pytest

from efdmkit.bench import BenchReport, bench_inputs, kernels, run_bench


def test_inputs_deterministic():
    a = bench_inputs(2048, 3)
    b = bench_inputs(2048, 3)
    assert all(np.array_equal(u, v) for u, v in zip(a, b))
    assert not np.array_equal(a[0], bench_inputs(2048, 4)[0])


def test_every_kernel_runs():
    x, y = bench_inputs(2048, 0)
    for name, fn in kernels().items():
        assert fn(x, y).values.shape == (2048,), name


def test_report_fields():
    reps = run_bench(2048, ["efdm", "adain"], runs=5, seed=1)
    assert [r.method for r in reps] == ["efdm", "adain"]
    assert all(r.seconds > 0 and r.runs == 5 and r.n == 2048 for r in reps)
    assert BenchReport("x", 10, 2.0, 5).throughput == 5.0


@pytest.mark.parametrize("kw", [dict(n=512), dict(runs=4), dict(methods=["nope"])])
def test_validation(kw):
    args = dict(n=2048, methods=["efdm"], runs=5)
    args.update(kw)
    with pytest.raises(ValueError):
        run_bench(**args)
