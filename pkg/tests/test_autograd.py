from autograd import ParamStore, Tensor, attention, no_grad
from autograd.gradcheck import OP_CASES, check_function, op_inputs, op_suite
from autograd.optim import AdamW, clip_grad_norm
from autograd.tensor import debug_checks, grad_enabled, set_debug_checks
from util.exceptions import DomainError, NonScalarLossError, ParameterError, ShapeError
import numpy as np
import pytest
import threading


def _inputs(*shapes, seed=0, low=-1.0, high=1.0):
    rng = np.random.default_rng(seed)
    return [rng.uniform(low, high, size=shape) for shape in shapes]


@pytest.mark.parametrize('name', sorted(OP_CASES))
def test_op_gradients(name):
    fn = OP_CASES[name][0]
    assert check_function(fn, op_inputs(name)).passed, name


def test_op_suite_covers_every_op():
    results = op_suite(seed=4)
    assert set(results) == set(OP_CASES)
    assert all(r.passed for r in results.values())


def test_prod_with_zero_entry():
    x = np.array([[0.0, 0.5, 2.0], [0.3, 0.0, 0.0]])
    assert check_function(lambda a: a.prod(axis=-1), [x]).passed


def test_kinked_ops_away_from_kinks():
    x = np.array([-0.7, -0.2, 0.3, 0.9])
    assert check_function(lambda a: a.relu(), [x]).passed
    assert check_function(lambda a: a.abs(), [x]).passed
    assert check_function(lambda a: a.clip(-0.5, 0.5), [x]).passed


def test_masked_keys_get_no_weight():
    q, k, v = [Tensor(a, requires_grad=True) for a in _inputs((1, 2, 4), (1, 3, 4), (1, 3, 4), seed=4)]
    mask = np.array([[True, True, False]])
    out = attention(q, k, v, heads=1, key_mask=mask)
    out.sum().backward()
    np.testing.assert_array_equal(v.grad[0, 2], 0.0)
    np.testing.assert_array_equal(k.grad[0, 2], 0.0)

    changed = v.data.copy()
    changed[0, 2] += 10.0
    with no_grad():
        again = attention(q, k, Tensor(changed), heads=1, key_mask=mask)
    np.testing.assert_allclose(again.data, out.data)


def test_stable_sigmoid_and_softmax():
    x = Tensor(np.array([-1000.0, 0.0, 1000.0]))
    np.testing.assert_allclose(x.sigmoid().data, [0.0, 0.5, 1.0])
    soft = Tensor(np.array([[1e4, 0.0, -1e4]])).softmax()
    assert np.all(np.isfinite(soft.data))
    assert soft.data[0, 0] == pytest.approx(1.0)


def test_gradient_accumulates_over_reuse():
    x = Tensor(np.array([2.0]), requires_grad=True)
    (x * x + x * 3.0).sum().backward()
    assert x.grad[0] == pytest.approx(7.0)


def test_errors():
    with pytest.raises(NonScalarLossError):
        Tensor(np.ones(3), requires_grad=True).backward()
    with pytest.raises(DomainError):
        Tensor(np.array([0.0, 1.0])).log()
    with pytest.raises(ShapeError):
        Tensor(np.ones((2, 3))) @ Tensor(np.ones((2, 3)))


def test_debug_checks_catch_non_finite_outputs(monkeypatch):
    x = Tensor(np.array([1.0, np.inf]), requires_grad=True)
    assert (x * 2.0).shape == (2,)

    monkeypatch.setattr('autograd.tensor._debug_checks', False)
    set_debug_checks(True)
    assert debug_checks()
    with pytest.raises(DomainError, match='mul'):
        x * 2.0
    with pytest.raises(DomainError, match='sum'):
        Tensor(np.array([np.nan, 1.0])).sum()
    # Finite ops, including masked attention, still pass
    q = Tensor(np.ones((1, 2, 4)))
    assert np.all(np.isfinite(attention(q, q, q, 2, np.array([[True, False]])).data))


def test_no_grad_is_thread_local():
    seen = []
    with no_grad():
        assert not grad_enabled()
        worker = threading.Thread(target=lambda: seen.append(grad_enabled()))
        worker.start()
        worker.join()
        y = Tensor(np.ones(2), requires_grad=True) * 2.0
    assert seen == [True]
    assert not y.requires_grad
    assert grad_enabled()


def test_param_store_names():
    store = ParamStore()
    store.add('a', np.zeros(3))
    with pytest.raises(ParameterError):
        store.add('a', np.ones(3))
    with pytest.raises(ParameterError):
        store['missing']
    assert store.astype(np.float64)['a'].dtype == np.float64
    assert store['a'].dtype == np.float32


def test_adamw_decay_is_decoupled():
    store = ParamStore(np.float64)
    store.add('p', np.array([2.0, -4.0]))
    optimizer = AdamW(store, lr=0.1, weight_decay=0.5)
    optimizer.zero_grad()
    optimizer.step()
    # Zero gradient: only the decay moves the weights
    np.testing.assert_allclose(store['p'].data, [2.0 * 0.95, -4.0 * 0.95])
    assert store.step == 1


def test_adamw_minimizes_quadratic():
    store = ParamStore(np.float64)
    store.add('p', np.zeros(3))
    target = np.array([3.0, -1.0, 0.5])
    optimizer = AdamW(store, lr=0.05, weight_decay=0.0)
    for _ in range(2000):
        optimizer.zero_grad()
        diff = store['p'] - target
        (diff * diff).sum().backward()
        optimizer.step()
    np.testing.assert_allclose(store['p'].data, target, atol=1e-2)


def test_clip_grad_norm():
    store = ParamStore(np.float64)
    p = store.add('p', np.zeros(2))
    p.grad = np.array([3.0, 4.0])
    assert clip_grad_norm(store, 1.0) == pytest.approx(5.0)
    np.testing.assert_allclose(p.grad, [0.6, 0.8])
