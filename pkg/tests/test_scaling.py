import numpy as np
import pytest

from cifa.cobe import CobeConfig, cobe, loadings_for
from cifa.errors import DegenerateLift, DimensionMismatch
from cifa.multiblock import make_rng, validate
from cifa.preprocess import preprocess
from cifa.scaling import ProjectionPlan, lift_common, make_plan, project_blocks, projected_common_basis, verify_common
from oracles import max_angle, orth


def test_identity_plan_leaves_blocks():
    rng = make_rng(0)
    data = validate([rng.standard_normal((15, 4)), rng.standard_normal((15, 3))])
    out = project_blocks(data, ProjectionPlan(np.eye(15)))
    assert all(np.array_equal(a, b) for a, b in zip(out, data))


def test_projection_preserves_rank_and_zero(exact_fixture):
    data, _ = exact_fixture
    plan = make_plan(200, 20, seed=1, max_rank=8)
    for y in project_blocks(data, plan):
        s = np.linalg.svd(y, compute_uv=False)
        assert np.count_nonzero(s > 1e-10 * s[0]) == 8
    zero = project_blocks([np.zeros((200, 3)), np.ones((200, 2))], plan)
    assert not zero[0].any()


def test_plan_bounds():
    with pytest.raises(ValueError):
        make_plan(100, 8, seed=0, max_rank=8)
    with pytest.raises(ValueError):
        make_plan(100, 101, seed=0)
    with pytest.raises(DimensionMismatch):
        project_blocks([np.ones((5, 2)), np.ones((5, 2))], make_plan(6, 3, 0))


def _projected_weights(data, i_p, seed=0):
    plan = make_plan(data.shared_rows, i_p, seed)
    factors = preprocess(project_blocks(data, plan))
    basis = cobe(factors, CobeConfig(epsilon=1e-6))
    w = [np.zeros((j, basis.c)) for j in data.cols]
    for k in range(basis.c):
        for n, wn in enumerate(loadings_for(factors, basis.a_bar[:, k]).w):
            w[n][:, k] = wn
    return plan, basis, w


def test_lift_exact(exact_fixture):
    data, truth = exact_fixture
    _, basis, w = _projected_weights(data, 40)
    assert basis.c == 3
    lifted = lift_common(data, w, tol=1e-12)
    assert max_angle(lifted.a_bar, truth.common_basis) < 1e-6
    assert all(lifted.diagnostics["accepted"])
    assert max(lifted.residuals) < 1e-16


def test_completeness(exact_fixture):
    data, truth = exact_fixture
    plan = make_plan(200, 40, seed=3)
    for y in data:
        w = np.linalg.pinv(y) @ truth.common_basis
        assert np.linalg.norm(y @ w - truth.common_basis) < 1e-10
        assert np.linalg.norm(plan.p @ y @ w - plan.p @ truth.common_basis) < 1e-10


def test_lift_degenerate_and_empty(exact_fixture):
    data, _ = exact_fixture
    with pytest.raises(DegenerateLift):
        lift_common(data, [np.zeros((30, 1))] * 5)
    empty = lift_common(data, [np.zeros((30, 0))] * 5)
    assert empty.c == 0


def test_null_space_decoys_are_rejected():
    i, i_p = 120, 10
    rng = make_rng(4)
    plan = make_plan(i, i_p, seed=5)
    null = np.linalg.svd(plan.p)[2][i_p:].T
    decoys = null[:, : i_p + 1]
    a = orth(rng.standard_normal((i, 1)))[:, 0]
    blocks = [np.column_stack([a + 0.5 * decoys[:, n], rng.standard_normal((i, 3))]) for n in range(i_p + 1)]
    projected = [plan.p @ y for y in blocks]
    # in the projected space the shared column is exactly common
    assert all(np.allclose(p[:, 0], projected[0][:, 0]) for p in projected)
    factors = preprocess(projected)
    basis = cobe(factors, CobeConfig(epsilon=1e-8, max_components=1))
    assert basis.c == 1
    w = [wn[:, None] for wn in loadings_for(factors, basis.a_bar[:, 0]).w]
    lifted = lift_common(blocks, w, tol=1e-6)
    assert lifted.residuals[0] > 1e-2
    assert lifted.diagnostics["accepted"] == (False,)


def test_verify_common_true_and_zero_tol(exact_fixture):
    data, truth = exact_fixture
    a = truth.common_basis[:, 0]
    w = loadings_for(data, a).w
    ok, res = verify_common(data, w, a, 1e-12)
    assert ok and res < 1e-16
    noisy = [y + 1e-3 * make_rng(n).standard_normal(y.shape) for n, y in enumerate(data)]
    w = loadings_for(noisy, a).w
    assert verify_common(noisy, w, a, 0.0)[0] is False


def test_end_to_end_equivalence():
    from cifa.experiments import projection_run

    out = projection_run(seed=0)
    assert out["c_full"] == 3
    for i_p, corr in out["corr"].items():
        assert out["c"][i_p] == 3
        assert corr.min() > 0.99


def test_projected_cobec_path(exact_fixture):
    from cifa.cobec import CobecConfig

    data, truth = exact_fixture
    run = projected_common_basis(data, 40, cfg=CobecConfig(c=3))
    assert max_angle(run.basis.a_bar, truth.common_basis) < 1e-6
