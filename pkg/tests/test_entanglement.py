import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from submanifold_states.entanglement import (
    ENTANGLED,
    INCONCLUSIVE,
    SEPARABLE,
    UnsupportedDimensionError,
    analyze,
    concurrence,
    entanglement_entropy,
    partial_transpose,
    ppt_check,
    schmidt,
    wootters_eof,
)
from submanifold_states.quadrature import SubmanifoldSpec
from submanifold_states.states import DensityMatrix, partial_trace_2, projector, restriction_state, tensor_product

from .oracles import random_density, random_unit, random_unitary, werner, wootters_direct

BELL = np.array([1, 0, 0, 1]) / np.sqrt(2)


def test_schmidt_examples():
    np.testing.assert_allclose(schmidt(np.kron([1, 0], [1, 0]), 2, 2), [1, 0], atol=1e-15)
    np.testing.assert_allclose(schmidt(BELL, 2, 2), [2**-0.5, 2**-0.5], atol=1e-15)
    with pytest.raises(ValueError):
        schmidt(np.array([1.0, 1.0, 0, 0]), 2, 2)


def test_schmidt_squared_are_reduced_eigenvalues(rng):
    for _ in range(100):
        d1, d2 = sorted(rng.integers(1, 6, size=2))
        v = random_unit(rng, d1 * d2)
        lam = np.sort(np.linalg.eigvalsh(partial_trace_2(projector(v, (d1, d2)))))[::-1]
        np.testing.assert_allclose(schmidt(v, d1, d2) ** 2, lam, atol=1e-12)


def test_entropy_examples(rng):
    assert entanglement_entropy(np.kron(random_unit(rng, 2), random_unit(rng, 3)), 2, 3) < 1e-12
    assert entanglement_entropy(BELL, 2, 2) == pytest.approx(np.log(2), abs=1e-12)
    v = np.array([np.sqrt(0.9), 0, 0, np.sqrt(0.1)])
    # -0.9 ln 0.9 - 0.1 ln 0.1 by direct evaluation
    assert entanglement_entropy(v, 2, 2) == pytest.approx(0.3250829733914482, abs=1e-12)


def test_entropy_bounds(rng):
    for _ in range(1000):
        d1, d2 = sorted(rng.integers(1, 5, size=2))
        e = entanglement_entropy(random_unit(rng, d1 * d2), d1, d2)
        assert -1e-15 <= e <= np.log(d1) + 1e-12


@pytest.mark.parametrize("d", [2, 3, 5])
def test_max_entangled_entropy(d):
    v = np.eye(d).ravel() / np.sqrt(d)
    assert entanglement_entropy(v, d, d) == pytest.approx(np.log(d), abs=1e-12)


def test_wootters_bell():
    c, eof = wootters_eof(projector(BELL, (2, 2)))
    assert c == pytest.approx(1.0, abs=1e-12)
    assert eof == pytest.approx(np.log(2), abs=1e-12)
    assert wootters_direct(projector(BELL, (2, 2)).matrix) == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("p", [0.0, 0.2, 1 / 3, 0.5, 2 / 3, 0.9, 1.0])
def test_wootters_werner(p):
    rho = DensityMatrix(werner(p), (2, 2))
    expected = max(0.0, (3 * p - 1) / 2)
    assert concurrence(rho) == pytest.approx(expected, abs=1e-12)
    assert concurrence(rho) == pytest.approx(wootters_direct(rho.matrix), abs=1e-7)


def test_wootters_product_states(rng):
    for _ in range(20):
        rho = tensor_product(random_density(rng, 2), random_density(rng, 2))
        c, eof = wootters_eof(rho)
        assert c == 0 and eof == 0


def test_wootters_matches_direct_oracle(rng):
    for _ in range(50):
        m = random_density(rng, 4, rank=int(rng.integers(1, 5)))
        rho = DensityMatrix(m, (2, 2))
        assert concurrence(rho) == pytest.approx(wootters_direct(m), abs=1e-7)


def test_wootters_rejects_other_dims():
    with pytest.raises(UnsupportedDimensionError):
        wootters_eof(DensityMatrix(np.eye(6) / 6, (2, 3)))


def test_eof_range(rng):
    for _ in range(50):
        rho = DensityMatrix(random_density(rng, 4, rank=2), (2, 2))
        c, eof = wootters_eof(rho)
        assert 0 <= c <= 1 and 0 <= eof <= np.log(2) + 1e-15
        assert (eof == 0) == (c == 0)


def test_ppt_examples(rng):
    lam, verdict = ppt_check(projector(BELL, (2, 2)))
    assert lam == pytest.approx(-0.5, abs=1e-14) and verdict == "NPT"
    lam, verdict = ppt_check(DensityMatrix(np.eye(6) / 6, (2, 3)))
    assert lam == pytest.approx(1 / 6) and verdict == "PPT"
    for _ in range(20):
        lam, verdict = ppt_check(tensor_product(random_density(rng, 2), random_density(rng, 3)))
        assert lam >= -1e-12 and verdict == "PPT"


def test_partial_transpose_involution(rng):
    rho = DensityMatrix(random_density(rng, 6), (2, 3))
    pt = partial_transpose(rho)
    assert np.trace(pt) == pytest.approx(1.0)
    back = pt.reshape(2, 3, 2, 3).transpose(0, 3, 2, 1).reshape(6, 6)
    np.testing.assert_allclose(back, rho.matrix)


def _separable_mixture(rng, d1, d2, k):
    p = rng.dirichlet(np.ones(k))
    m = sum(pj * np.kron(np.outer(a, a.conj()), np.outer(b, b.conj()))
            for pj, a, b in zip(p, [random_unit(rng, d1) for _ in range(k)], [random_unit(rng, d2) for _ in range(k)]))
    return DensityMatrix(0.5 * (m + m.conj().T), (d1, d2))


def test_separable_mixtures_have_zero_eof(rng):
    for _ in range(100):
        rho = _separable_mixture(rng, 2, 2, int(rng.integers(1, 6)))
        assert wootters_eof(rho)[1] < 1e-10
        assert ppt_check(rho)[1] == "PPT"


@given(st.integers(0, 2**31))
def test_local_unitary_invariance(seed):
    rng = np.random.default_rng(seed)
    W = np.kron(random_unitary(rng, 2), random_unitary(rng, 2))
    for rho in (DensityMatrix(random_density(rng, 4, rank=2), (2, 2)), projector(random_unit(rng, 4), (2, 2))):
        m = W @ rho.matrix @ W.conj().T
        a, b = analyze(rho), analyze(DensityMatrix(0.5 * (m + m.conj().T), (2, 2)))
        for name in ("purity", "concurrence", "eof", "ppt_min_eigenvalue", "product_residual", "entropy"):
            x, y = getattr(a, name), getattr(b, name)
            assert (x is None) == (y is None)
            if x is not None:
                assert abs(x - y) < 1e-10, name
        if a.schmidt is not None:
            np.testing.assert_allclose(a.schmidt, b.schmidt, atol=1e-10)
        assert a.ppt == b.ppt


def test_analyze_point_state():
    rho = restriction_state(1, 1, 3, SubmanifoldSpec("point", {"p1": [0.4], "p2": [[0.0, -1.0]]}))
    rep = analyze(rho)
    assert rep.pure and rep.entropy < 1e-10
    assert rep.separable_verdict == SEPARABLE


def test_analyze_product_state():
    spec = SubmanifoldSpec("product", {"first": {"kind": "circle", "params": {"radius": 1.0}}, "second": {"kind": "circle", "params": {"radius": 0.7}}})
    rep = analyze(restriction_state(1, 1, 1, spec))
    assert rep.separable_verdict == SEPARABLE
    assert rep.eof < 1e-10 and rep.product_residual < 1e-9


def test_analyze_bell():
    rep = analyze(projector(BELL, (2, 2)))
    assert rep.entropy == pytest.approx(np.log(2))
    assert rep.ppt == "NPT"
    assert rep.separable_verdict == ENTANGLED


def test_analyze_inconclusive_beyond_two_qubits(rng):
    # separable but not a product, mixed, 3x3: no certificate available
    rho = _separable_mixture(rng, 3, 3, 4)
    rep = analyze(rho)
    assert rep.eof is None and rep.concurrence is None
    assert rep.separable_verdict == INCONCLUSIVE


def test_analyze_diagonal_circle_is_separable():
    rep = analyze(restriction_state(1, 1, 1, SubmanifoldSpec("diagonal_circle", {"radius": 1.0})))
    assert not rep.pure
    assert rep.concurrence < 1e-10 and rep.ppt == "PPT"
    assert rep.product_residual > 0.1
    assert rep.separable_verdict == SEPARABLE
