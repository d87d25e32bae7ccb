import numpy as np
import pytest
from scipy.linalg import expm

from guenoise.channels import (
    GROUPS,
    PAIRING_GROUP,
    pairing_operator,
    PauliVector,
    avg_channel_apply,
    depolarizing_f,
    matel_variance,
    qubit_evolve,
    qubit_f,
    qubit_matel_means,
    qubit_variance_curves,
    twofold_apply,
    twofold_closed_form,
    twofold_coefficients,
    twofold_from_contractions,
    twofold_operators,
    typicality,
    variance_matel_gue_avg,
    variance_operator,
)
from guenoise.ensemble import RngStream, sample_gue, sample_gue_batch
from guenoise.errors import DegeneratePointError, InvalidDimensionError, InvalidInputError
from guenoise.montecarlo import mc_channel_average, mc_twofold, run_batches, evolved_batch
from conftest import frac_within, random_hermitian

PAULI = [np.array([[0, 1], [1, 0]]), np.array([[0, -1j], [1j, 0]]), np.diag([1.0, -1.0])]


def test_qubit_evolve_examples():
    a = PauliVector(0.0, (1, 0, 0))
    assert qubit_evolve(a, (0.3, -1.0, 2.0), 0.0) == a
    for t in (0.2, 1.0, 2.7):
        out = qubit_evolve(a, (0, 0, 1), t)
        assert np.allclose(out.a, (np.cos(2 * t), -np.sin(2 * t), 0), atol=1e-14)


def test_qubit_evolve_matches_matrix_exponential():
    rng = np.random.default_rng(5)
    for _ in range(10):
        a = PauliVector(rng.normal(), tuple(rng.normal(size=3)))
        g, t = rng.normal(size=3), rng.normal()
        h = sum(gi * p for gi, p in zip(g, PAULI))
        u = expm(1j * t * h)
        ref = u @ a.to_matrix() @ u.conj().T
        out = qubit_evolve(a, g, t)
        assert out.a0 == a.a0
        assert np.allclose(out.to_matrix(), ref, atol=1e-12)


def test_qubit_evolve_small_g_series():
    a = PauliVector(0.0, (0.3, -0.4, 0.8))
    g = np.array([1e-9, -2e-9, 3e-9])
    out = qubit_evolve(a, g, 2.0)
    u = expm(1j * 2.0 * sum(gi * p for gi, p in zip(g, PAULI)))
    assert np.allclose(out.to_matrix(), u @ a.to_matrix() @ u.conj().T, atol=1e-15)
    assert qubit_evolve(a, (0, 0, 0), 5.0).a == pytest.approx(a.a)


def test_qubit_f_values():
    assert qubit_f(0.0) == 0
    peak = (2 / 3) * (1 + 2 * np.exp(-1.5))
    assert qubit_f(np.sqrt(3)) == pytest.approx(peak, abs=1e-15)
    grid = np.linspace(0, 10, 2001)
    assert np.max(qubit_f(grid)) <= peak + 1e-15
    assert qubit_f(40.0) == pytest.approx(2 / 3, abs=1e-15)


@pytest.mark.parametrize("t", [0.0, 0.3, 1.7, 6.0])
def test_depolarizing_n2_equals_qubit(t):
    assert depolarizing_f(t, 2).f == pytest.approx(qubit_f(t), abs=1e-12)


def test_depolarizing_limits():
    assert depolarizing_f(0.0, 5).f == 0
    for n in (2, 4, 8, 16):
        assert depolarizing_f(10.0 * n, n).f == pytest.approx(n / (n + 1), abs=1e-6)
    with pytest.raises(InvalidDimensionError):
        depolarizing_f(1.0, 1)


def test_qubit_means_and_variances_examples():
    z = PauliVector(0, (0, 0, 1))
    assert qubit_matel_means(z, 0.0) == ((1, 1), 0)
    assert qubit_variance_curves(z, 0.0) == (0, 0)
    x = PauliVector(0, (1, 0, 0))
    for t in (0.4, 2.0):
        assert qubit_matel_means(x, t)[1] == pytest.approx(1 - qubit_f(t))
    shifted = PauliVector(7.0, (0, 0, 1))
    assert qubit_variance_curves(shifted, 1.3) == qubit_variance_curves(z, 1.3)


@pytest.mark.parametrize("a", [PauliVector(0, (0, 0, 1)), PauliVector(0, (1, 0, 0)), PauliVector(0.4, (0.3, -0.7, 0.5))])
def test_qubit_variances_vs_mc(a):
    m = a.to_matrix()
    for j, t in enumerate((0.5, 1.0, 2.0, 5.0)):
        first = run_batches(lambda g, s: evolved_batch(m, t, g, s), 100_000, RngStream(j, 1), 4096)
        second = run_batches(lambda g, s: (lambda x: (np.abs(x[0]) ** 2, 0))(evolved_batch(m, t, g, s)), 100_000, RngStream(j, 1), 4096)
        var = second.mean - np.abs(first.mean) ** 2
        vd, vo = qubit_variance_curves(a, t)
        # the second moment's SE dominates the error of the plug-in variance
        assert abs(var[0, 0] - vd) <= 4 * second.std_error[0, 0] + 1e-3
        assert abs(var[0, 1] - vo) <= 4 * second.std_error[0, 1] + 1e-3


def test_qubit_means_vs_mc():
    z = PauliVector(0.0, (0, 0, 1))
    est = mc_channel_average(z.to_matrix(), 1.0, 50_000, RngStream(3))
    (d0, d1), _ = qubit_matel_means(z, 1.0)
    assert abs(est.mean[0, 0].real - d0) <= 4 * est.std_error[0, 0]
    assert abs(est.mean[1, 1].real + d1) <= 4 * est.std_error[1, 1]


def test_avg_channel_examples(herm):
    a = herm(4, 1)
    assert np.array_equal(avg_channel_apply(a, 0.0), a)
    traceless = a - np.trace(a) / 4 * np.eye(4)
    assert np.allclose(avg_channel_apply(traceless, 400.0), traceless / 5, atol=1e-12)
    with pytest.raises(InvalidInputError):
        avg_channel_apply(np.array([[0, 1], [0, 0]]), 1.0)


def test_avg_channel_vs_mc(herm):
    a = herm(4, 2)
    est = mc_channel_average(a, 1.2, 100_000, RngStream(4))
    assert frac_within(est, avg_channel_apply(a, 1.2)) >= 0.95


@pytest.mark.parametrize("n", range(4, 17))
def test_twofold_identity_at_zero(n):
    assert np.allclose(twofold_coefficients(0.0, n).as_array(), np.eye(8)[0], atol=1e-9)


@pytest.mark.parametrize("n", [4, 5, 7, 12])
def test_closed_form_matches_contraction_sum(n):
    rng = np.random.default_rng(n)
    for _ in range(3):
        sffs = rng.normal(size=4) * n**2
        a = twofold_closed_form(n, *sffs).as_array()
        b = twofold_from_contractions(n, *sffs).as_array()
        assert np.max(np.abs(a - b)) <= 1e-12 * max(1.0, np.max(np.abs(a)))


def test_operator_census():
    a, b = random_hermitian(3, 1), random_hermitian(3, 2)
    grouped = twofold_operators(a, b)
    assert set(grouped) == set(GROUPS)
    ops = {pi: pairing_operator(pi, a, b) for pi in PAIRING_GROUP}
    # 24 distinct operators for generic A, B
    mats = list(ops.values())
    assert all(not np.allclose(mats[i], mats[j]) for i in range(24) for j in range(i))
    # grouped sums are exactly the per-pairing operators
    for g in GROUPS:
        total = sum(ops[pi] for pi, grp in PAIRING_GROUP.items() if grp == g)
        assert np.allclose(total, grouped[g], atol=1e-12)
    # with B = A and scalar trace prefactors stripped, twelve operators remain:
    # {1, A(x)A, 1(x)A, A(x)1, 1(x)A^2, A^2(x)1} each with and without SWAP
    aa = random_hermitian(3, 3)
    distinct = []
    for pi in PAIRING_GROUP:
        m = pairing_operator(pi, aa, aa)
        m = m / np.linalg.norm(m)
        lead = m.flat[np.argmax(np.abs(m))]
        m = m * abs(lead) / lead
        if not any(np.allclose(m, d) for d in distinct):
            distinct.append(m)
    assert len(distinct) == 12


@pytest.mark.parametrize("n", [2, 3, 4, 8])
def test_twofold_basic_identities(n):
    a, b = random_hermitian(n, 4), random_hermitian(n, 5)
    assert np.allclose(twofold_apply(a, b, 0.0), np.kron(a, b), atol=1e-12)
    one = np.eye(n)
    for t in (0.0, 0.7, 3.0):
        assert np.allclose(twofold_apply(one, one, t), np.eye(n * n), atol=1e-12)
        marg = twofold_apply(a, one, t).reshape(n, n, n, n).trace(axis1=1, axis2=3)
        assert np.allclose(marg, n * avg_channel_apply(a, t), atol=1e-11)


def test_twofold_dimension_mismatch():
    with pytest.raises(InvalidInputError):
        twofold_apply(np.eye(2), np.eye(3), 1.0)


@pytest.mark.parametrize("n", [3, 8])
def test_twofold_vs_mc(n):
    a, b = random_hermitian(n, 6), random_hermitian(n, 7)
    est = mc_twofold(a, b, 1.0, 100_000 if n == 8 else 50_000, RngStream(n, 8))
    assert frac_within(est, twofold_apply(a, b, 1.0)) >= 0.95


@pytest.mark.parametrize("t", [0.5, 1.0, 2.0])
def test_variance_operator_qubit(t):
    for a in (PauliVector(0, (0, 0, 1)), PauliVector(0, (1, 0, 0)), PauliVector(0.2, (0.5, -0.1, 0.9))):
        v = variance_operator(a.to_matrix(), t)
        vd, vo = qubit_variance_curves(a, t)
        assert matel_variance(v, 0, 0) == pytest.approx(vd, abs=1e-9)
        assert matel_variance(v, 1, 1) == pytest.approx(vd, abs=1e-9)
        assert matel_variance(v, 0, 1) == pytest.approx(vo, abs=1e-9)


def test_variance_operator_zero_time_and_sign(herm):
    a = herm(5, 9)
    assert np.allclose(variance_operator(a, 0.0), 0, atol=1e-12)
    v = variance_operator(a, 1.4)
    assert min(matel_variance(v, m, k) for m in range(5) for k in range(5)) >= -1e-9


def test_variance_operator_vs_mc(herm):
    a = herm(4, 10)
    t = 0.9
    est = run_batches(lambda g, s: (lambda x: (np.abs(x[0]) ** 2, 0))(evolved_batch(a, t, g, s)), 100_000, RngStream(5), 4096)
    second = variance_operator(a, t).reshape(4, 4, 4, 4)
    avg = avg_channel_apply(a, t)
    for m in range(4):
        for k in range(4):
            assert abs(second[m, m, k, k].real + abs(avg[m, k]) ** 2 - est.mean[m, k]) <= 4 * est.std_error[m, k]


def test_variance_gue_avg_examples():
    assert variance_matel_gue_avg(0, 1, 0.0, 4, 1.0) == 0
    for t in (0.3, 2.0, 9.0):
        ratio = variance_matel_gue_avg(0, 1, t, 6, 1.3) / variance_matel_gue_avg(2, 2, t, 6, 1.3)
        assert ratio == pytest.approx(1 / (1 - 1 / 6))


def test_typicality_denominator_is_mean_square():
    # E_A |E_G (A_G)_{mk}|^2 with A from the GUE, via the exact onefold channel
    n, t, samples = 3, 1.1, 200_000
    a = sample_gue_batch(n, samples, RngStream(12))  # entry scale 1/sqrt(2)
    f = depolarizing_f(t, n).f
    avg = (1 - f) * a + f * np.trace(a, axis1=1, axis2=2)[:, None, None] / n * np.eye(n)
    for (m, k) in ((0, 0), (0, 1)):
        x = np.abs(avg[:, m, k]) ** 2 / 0.5
        delta = float(m == k)
        expected = (1 - f) ** 2 + delta * f * (2 - f) / n
        assert abs(x.mean() - expected) <= 4 * x.std(ddof=1) / np.sqrt(samples)
        var = variance_matel_gue_avg(m, k, t, n, np.sqrt(0.5)) / 0.5
        assert typicality(m, k, t, n) == pytest.approx(np.sqrt(var / expected))


def test_typicality_regimes():
    assert typicality(0, 1, 0.0, 4) == 0
    for t in np.linspace(0.01, 0.3, 5):
        assert typicality(0, 1, t, 2) < 0.5
    for n in (2, 4, 8):
        assert typicality(0, 1, 12.0 * n, n) == pytest.approx(np.sqrt(n * (n + 2)), rel=1e-5)


def test_typicality_degenerate_point(monkeypatch):
    import guenoise.channels as ch

    monkeypatch.setattr(ch, "depolarizing_f", lambda t, n: ch.DepolarizingChannel(n, 1.0))
    with pytest.raises(DegeneratePointError) as info:
        ch.typicality(0, 1, 2.5, 3)
    assert info.value.point == 2.5
