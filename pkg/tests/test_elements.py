"""Beamsplitter elements, circuit containers, and transfer matrices."""

import numpy as np
import pytest

from conftest import random_circuit
from loqc.elements import (
    Beamsplitter,
    Circuit,
    beamsplitter_matrix,
    compose_transfer_matrix,
    validate_circuit,
)
from loqc.postselect import DetectionPattern

RNG = np.random.default_rng(4031)


def test_beamsplitter_matrix_structure():
    for eta in (0.0, 0.17, 0.5, 1.0):
        for grey in (0, 1):
            m = beamsplitter_matrix(eta, grey)
            assert np.allclose(m @ m.T, np.eye(2), atol=1e-15)
            assert np.allclose(m, m.T, atol=1e-15)
            assert np.allclose(m @ m, np.eye(2), atol=1e-15)
            assert abs(np.linalg.det(m) + 1.0) < 1e-15
    m = beamsplitter_matrix(0.36, 1)
    assert m[0, 0] == pytest.approx(0.6)
    assert m[1, 1] == pytest.approx(-0.6)
    assert m[0, 1] == pytest.approx(0.8)
    m = beamsplitter_matrix(0.36, 0)
    assert m[0, 0] == pytest.approx(-0.6)
    assert m[1, 1] == pytest.approx(0.6)


def test_beamsplitter_matrix_rejects_bad_arguments():
    with pytest.raises(ValueError):
        beamsplitter_matrix(-0.1, 0)
    with pytest.raises(ValueError):
        beamsplitter_matrix(1.1, 1)
    with pytest.raises(ValueError):
        beamsplitter_matrix(0.5, 2)


def test_element_grey_port_and_matrix():
    el = Beamsplitter(2, 5, 0.3, grey=5, label="x")
    assert el.grey_port() == 1
    assert np.allclose(el.matrix(), beamsplitter_matrix(0.3, 1))
    el = Beamsplitter(2, 5, 0.3, grey=2)
    assert el.grey_port() == 0
    bad = Beamsplitter(2, 5, 0.3, grey=4)
    with pytest.raises(ValueError):
        bad.grey_port()
    degenerate = Beamsplitter(2, 2, 0.3, grey=2)
    with pytest.raises(ValueError):
        degenerate.matrix()


def test_circuit_mode_lookup():
    c = Circuit(2, ("in", "out"), (Beamsplitter(0, 1, 0.5, grey=1),))
    assert c.mode_index("out") == 1
    with pytest.raises(KeyError):
        c.mode_index("nope")
    assert c.user_modes() == (0, 1)
    c2 = Circuit(
        2, ("in", "anc"), c.elements, ancilla_prep={1: 1}
    )
    assert c2.user_modes() == (0,)


def test_validate_circuit_reports_every_issue():
    c = Circuit(
        n_modes=2,
        labels=("a", "a"),
        elements=(
            Beamsplitter(0, 3, 1.7, grey=2, label="bad"),
            Beamsplitter(1, 1, 0.5, grey=1),
        ),
        ancilla_prep={5: -1},
        detection=DetectionPattern(exact={9: 1}),
        cuts={"q": 7},
    )
    report = validate_circuit(c)
    assert not report.valid
    text = "\n".join(report.issues)
    assert "labels are not unique" in text
    assert "mode 3 outside" in text
    assert "reflectivity 1.7" in text
    assert "grey mode 2" in text
    assert "modes coincide" in text
    assert "ancilla prep mode 5" in text
    assert "outside 0..1" in text
    assert "cut 'q'" in text


def test_validate_circuit_accepts_good_circuits():
    for _ in range(10):
        report = validate_circuit(random_circuit(RNG))
        assert report.valid
        assert report.issues == []


def test_compose_transfer_matrix_is_unitary():
    for _ in range(10):
        c = random_circuit(RNG)
        u = compose_transfer_matrix(c)
        assert np.allclose(u @ u.conj().T, np.eye(c.n_modes), atol=1e-12)


def test_compose_transfer_matrix_order_and_prefix():
    e1 = Beamsplitter(0, 1, 0.3, grey=1)
    e2 = Beamsplitter(1, 2, 0.8, grey=1)
    c = Circuit(3, ("a", "b", "c"), (e1, e2))
    u1 = np.eye(3, dtype=complex)
    u1[:2, :2] = e1.matrix()
    u2 = np.eye(3, dtype=complex)
    u2[1:, 1:] = e2.matrix()
    assert np.allclose(compose_transfer_matrix(c), u2 @ u1, atol=1e-15)
    assert np.allclose(compose_transfer_matrix(c, upto=1), u1, atol=1e-15)
    assert np.allclose(compose_transfer_matrix(c, upto=0), np.eye(3), atol=1e-15)


def test_transfer_matrix_embeds_element_on_its_modes():
    el = Beamsplitter(1, 3, 0.42, grey=3)
    c = Circuit(4, ("a", "b", "c", "d"), (el,))
    u = compose_transfer_matrix(c)
    block = el.matrix()
    assert u[1, 1] == pytest.approx(block[0, 0])
    assert u[1, 3] == pytest.approx(block[0, 1])
    assert u[3, 1] == pytest.approx(block[1, 0])
    assert u[3, 3] == pytest.approx(block[1, 1])
    assert u[0, 0] == 1.0 and u[2, 2] == 1.0
    assert u[0, 2] == 0.0
