import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import brute_objective, random_instance
from kmm_eda.qap import (
    QapFormatError,
    QapInstance,
    ardp,
    delta_swap,
    evaluate,
    evaluate_from,
    evaluate_many,
    load_qaplib,
    parse_qaplib,
    serialize_qaplib,
)

TOY2 = "2\n0 1\n1 0\n0 3\n3 0"


def test_parse_toy():
    inst = parse_qaplib(TOY2)
    assert inst.n == 2
    assert inst.dist.tolist() == [[0, 1], [1, 0]]
    assert inst.flow.tolist() == [[0, 3], [3, 0]]
    assert parse_qaplib(TOY2.encode() + b"\n\n  \n") == inst


@pytest.mark.parametrize(
    "text, match",
    [
        ("2\n0 1\n1 0\n0 3", "token count"),
        ("2\n0 1\n1 0\n0 3\n3 x", "non-integer"),
        ("2\n0 1\n1 0\n0 3\n3 0.5", "non-integer"),
        ("2\n0 1\n1 0\n0 -3\n3 0", "negative"),
        ("1\n0\n0", "size"),
        ("", "empty"),
    ],
)
def test_parse_errors(text, match):
    with pytest.raises(QapFormatError, match=match):
        parse_qaplib(text)


def test_round_trip(rng, data_dir):
    inst = random_instance(rng, 7)
    assert parse_qaplib(serialize_qaplib(inst), name=inst.name) == inst
    bur = load_qaplib(data_dir / "bur26a.dat")
    assert bur.name == "bur26a"
    assert parse_qaplib(serialize_qaplib(bur), name="bur26a") == bur


def test_instance_is_read_only(rng):
    inst = random_instance(rng, 3)
    with pytest.raises(ValueError):
        inst.dist[0, 0] = 5


def test_evaluate_toy():
    inst = parse_qaplib(TOY2)
    # D01*H01 + D10*H10 = 3 + 3
    assert evaluate(inst, [0, 1]) == 6
    assert evaluate(inst, [1, 0]) == 6
    with pytest.raises(ValueError):
        evaluate(inst, [0, 1, 2])


def test_zero_flow_annihilates(rng):
    inst = QapInstance(rng.integers(0, 9, (5, 5)), np.zeros((5, 5), dtype=int))
    for p in itertools.permutations(range(5)):
        assert evaluate(inst, p) == 0
    assert delta_swap(inst, np.arange(5), 0, 1, 3) == 0


def test_evaluate_matches_double_loop_on_all_of_s4(rng):
    inst = random_instance(rng, 4)
    perms = np.array(list(itertools.permutations(range(4))))
    batch = evaluate_many(inst, perms)
    for p, fb in zip(perms, batch):
        expected = brute_objective(inst.dist, inst.flow, p)
        assert evaluate(inst, p) == expected == fb


def test_known_optima(data_dir):
    # published optimal assignments, 1-based
    bur = load_qaplib(data_dir / "bur26a.dat")
    sln = [26, 15, 11, 7, 4, 12, 13, 2, 6, 18, 1, 5, 9, 21, 8, 14, 3, 20, 19, 25, 17, 10, 16, 24, 23, 22]
    assert evaluate(bur, np.array(sln) - 1) == 5426670
    chr12c = load_qaplib(data_dir / "chr12c.dat")
    assert evaluate(chr12c, np.array([7, 5, 1, 3, 10, 4, 8, 6, 9, 11, 2, 12]) - 1) == 11156


def test_delta_swap_toy():
    inst = parse_qaplib(TOY2)
    assert delta_swap(inst, [0, 1], 6, 0, 1) == 6


def test_delta_swap_errors(rng):
    inst = random_instance(rng, 4)
    sigma = np.arange(4)
    f = evaluate(inst, sigma)
    with pytest.raises(ValueError):
        delta_swap(inst, sigma, f, 2, 2)
    with pytest.raises(IndexError):
        delta_swap(inst, sigma, f, 0, 4)


def test_delta_swap_fuzz_asymmetric():
    rng = np.random.default_rng(2024)
    for _ in range(1000):
        n = int(rng.integers(2, 31))
        inst = random_instance(rng, n, high=1000)
        sigma = rng.permutation(n)
        i1, i2 = rng.choice(n, size=2, replace=False)
        swapped = sigma.copy()
        swapped[[i1, i2]] = swapped[[i2, i1]]
        assert delta_swap(inst, sigma, evaluate(inst, sigma), i1, i2) == evaluate(inst, swapped)


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 40), st.integers(1, 50), st.integers(0, 2**32 - 1))
def test_delta_chain_matches_full(n, length, seed):
    rng = np.random.default_rng(seed)
    inst = random_instance(rng, n, high=10_000)
    sigma = rng.permutation(n)
    f = evaluate(inst, sigma)
    for _ in range(length):
        i1, i2 = rng.choice(n, size=2, replace=False)
        g = delta_swap(inst, sigma, f, i1, i2)
        # swap is an involution
        sigma2 = sigma.copy()
        sigma2[[i1, i2]] = sigma2[[i2, i1]]
        assert delta_swap(inst, sigma2, g, i1, i2) == f
        sigma, f = sigma2, g
    assert f == evaluate(inst, sigma)


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 30), st.integers(0, 2**32 - 1))
def test_evaluate_from_center(n, seed):
    rng = np.random.default_rng(seed)
    inst = random_instance(rng, n)
    center = rng.permutation(n)
    sigma = rng.permutation(n)
    assert evaluate_from(inst, center, evaluate(inst, center), sigma) == evaluate(inst, sigma)


def test_no_overflow_at_largest_supported_scale():
    rng = np.random.default_rng(5)
    n = 256
    inst = QapInstance(rng.integers(9_000, 10_001, (n, n)), rng.integers(9_000, 10_001, (n, n)))
    sigma = rng.permutation(n)
    exact = sum(
        int(a) * int(b) for a, b in zip(inst.dist.ravel().tolist(), inst.flow[np.ix_(sigma, sigma)].ravel().tolist())
    )
    assert exact < 2**63
    assert evaluate(inst, sigma) == exact
    assert evaluate_many(inst, sigma[None])[0] == exact


@pytest.mark.parametrize(
    "best, values, expected",
    [(100, [105], 5.0), (100, [100, 100], 0.0), (200, [210, 190], 0.0)],
)
def test_ardp(best, values, expected):
    assert ardp(best, values) == pytest.approx(expected, abs=1e-12)


def test_ardp_errors():
    with pytest.raises(ValueError):
        ardp(0, [1])
    with pytest.raises(ValueError):
        ardp(10, [])
