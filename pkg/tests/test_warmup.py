import numpy as np
import pytest

from smcreg.design import BlockLayout
from smcreg.engine import ParticleSystem, uniform_system
from smcreg.errors import TuningError
from smcreg.gaussian import GaussianLayout
from smcreg.gibbs import ChainOutput, gibbs_lmm
from smcreg.hyper import diagonal_hyper
from smcreg.models import GaussianStreamModel
from smcreg.rng import RandomStream
from smcreg.warmup import (
    ConvergenceReport,
    WarmupPlan,
    autotune,
    checkpoint_indices,
    seed_particles,
    validate_convergence,
)


def make_chain(n_kept=10, d=3):
    draws = np.arange(n_kept * d, dtype=float).reshape(n_kept, d)
    return ChainOutput(names=tuple(f"t{i}" for i in range(d)), draws=draws, n_warm=0)


def test_seed_particles_takes_last_draws_transposed():
    chain = make_chain(n_kept=10, d=3)
    theta = seed_particles(chain, 4)
    assert theta.shape == (3, 4)
    assert np.array_equal(theta[:, -1], chain.draws[-1])
    assert np.array_equal(theta[:, 0], chain.draws[-4])


def test_seed_particles_needs_enough_draws():
    with pytest.raises(TuningError):
        seed_particles(make_chain(n_kept=3), 5)


def test_checkpoint_indices_even_spacing():
    assert checkpoint_indices(100, 5) == [20, 40, 60, 80, 100]
    assert checkpoint_indices(10, 2) == [5, 10]
    # more checkpoints than observations: one per observation
    assert checkpoint_indices(3, 5) == [1, 2, 3]
    with pytest.raises(TuningError):
        checkpoint_indices(0, 5)


def test_report_worst_gap_and_describe():
    report = ConvergenceReport(passed=False, threshold=3.0, n_warm=100)
    assert report.worst_gap == 0.0
    assert "diverging" in report.describe()


def lm_setup(seed, n):
    rng = np.random.default_rng(seed)
    x = rng.uniform(size=n)
    c = np.column_stack([np.ones(n), x])
    y = 2.0 - 1.5 * x + 0.35 * rng.standard_normal(n)
    return y, c


def test_validate_convergence_passes_on_well_seeded_gaussian():
    y, c = lm_setup(0, 150)
    layout = GaussianLayout(BlockLayout(p=2, blocks=()))
    hyper = diagonal_hyper(2)
    model = GaussianStreamModel(layout, hyper, ["b0", "b1"])
    stream = RandomStream(1)
    chain = gibbs_lmm(y[:100], c[:100], layout.blocks, hyper, 500, 200,
                      stream.substream(10), coef_names=["b0", "b1"])
    model.absorb_warm_data(y[:100], c[:100])
    system = model.seed_system(chain.draws[-200:].T.copy())
    plan = WarmupPlan(n_warm=100, n_burn=500, n_valid=50, compare_kept=500)
    report = validate_convergence(
        model, system, y[100:], c[100:], y[:100], c[:100],
        lambda yy, cc, s: gibbs_lmm(yy, cc, layout.blocks, hyper, 500, 500, s,
                                    coef_names=["b0", "b1"]),
        ["b0", "b1"], plan, tau=2.0 / 200, stream=stream.substream(11),
    )
    assert report.passed
    assert len(report.gaps) == 5 * 2
    assert report.worst_gap < 3.0
    # checkpoints cover the cumulative counts 110..150
    assert sorted({g.n for g in report.gaps}) == [110, 120, 130, 140, 150]


class _StubModel:
    def ingest(self, system, y_new, c_new, tau, stream):
        return system


def constant_batch_fn(center):
    def fn(y, c, stream):
        draws = center + stream.std_normal_vec(200).reshape(-1, 1)
        return ChainOutput(names=("b0",), draws=draws, n_warm=0)

    return fn


def test_validate_convergence_fails_on_large_gap():
    system = uniform_system(np.zeros((1, 50)), ["b0"])
    plan = WarmupPlan(n_warm=10, n_valid=10, n_checkpoints=2, threshold=3.0)
    report = validate_convergence(
        _StubModel(), system, np.zeros(10), np.zeros((10, 1)),
        np.zeros(0), np.zeros((0, 1)),
        constant_batch_fn(50.0), ["b0"], plan, tau=0.1, stream=RandomStream(3),
    )
    assert not report.passed
    assert report.worst_gap > 3.0


def test_derived_monitor_compares_linear_combinations():
    # monitor w'theta: online particles at w'theta = 5, batch draws near 0
    system = uniform_system(np.vstack([np.full(40, 2.0), np.full(40, 3.0)]), ["a", "b"])
    plan = WarmupPlan(n_warm=10, n_valid=10, n_checkpoints=1, threshold=3.0)

    def batch_fn(y, c, stream):
        draws = np.column_stack(
            [stream.std_normal_vec(200), stream.std_normal_vec(200)]
        )
        return ChainOutput(names=("a", "b"), draws=draws, n_warm=0)

    w = np.array([1.0, 1.0])
    report = validate_convergence(
        _StubModel(), system, np.zeros(10), np.zeros((10, 1)),
        np.zeros(0), np.zeros((0, 1)), batch_fn,
        [("combo", w)], plan, tau=0.1, stream=RandomStream(8),
    )
    gap = report.gaps[0]
    assert gap.param == "combo"
    assert gap.online_mean == pytest.approx(5.0)
    assert not report.passed  # 5 standardized units away from the batch mean


def test_autotune_grows_until_converged():
    # the stub seed places the particle mean at 100/n_warm, so only the
    # third round (n_warm = 2 * 5 * 5 = 50) falls under the threshold
    n = 500
    y = np.zeros(n)
    c = np.zeros((n, 1))

    def seed_fn(model, y_warm, c_warm, m_count, stream):
        value = 100.0 / y_warm.shape[0]
        return uniform_system(np.full((1, m_count), value), ["b0"])

    model, system, report, n_warm = autotune(
        y, c, _StubModel, seed_fn, constant_batch_fn(0.0), ["b0"],
        m_count=20, plan=WarmupPlan(n_warm=2, n_valid=10, n_checkpoints=1),
        tau=0.1, stream=RandomStream(4),
    )
    assert n_warm == 50
    assert report.passed and report.n_warm == 50


def test_autotune_raises_with_last_report_when_data_runs_out():
    y = np.zeros(30)
    c = np.zeros((30, 1))

    def seed_fn(model, y_warm, c_warm, m_count, stream):
        return uniform_system(np.full((1, m_count), 99.0), ["b0"])

    with pytest.raises(TuningError) as exc:
        autotune(
            y, c, _StubModel, seed_fn, constant_batch_fn(0.0), ["b0"],
            m_count=10, plan=WarmupPlan(n_warm=5, n_valid=10, n_checkpoints=1),
            tau=0.1, stream=RandomStream(5),
        )
    assert exc.value.report is not None and not exc.value.report.passed


def test_autotune_exhausts_rounds():
    y = np.zeros(100000)
    c = np.zeros((100000, 1))

    def seed_fn(model, y_warm, c_warm, m_count, stream):
        return uniform_system(np.full((1, m_count), 99.0), ["b0"])

    plan = WarmupPlan(n_warm=2, n_valid=5, n_checkpoints=1, max_rounds=3)
    with pytest.raises(TuningError) as exc:
        autotune(y, c, _StubModel, seed_fn, constant_batch_fn(0.0), ["b0"],
                 m_count=10, plan=plan, tau=0.1, stream=RandomStream(6))
    assert "3 rounds" in str(exc.value)
