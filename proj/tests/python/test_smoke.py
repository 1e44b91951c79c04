import math

import numpy as np
import pytest

import pwidths


def test_version():
    assert pwidths.__version__.count(".") == 2


def test_widths_table_and_weyl():
    doc = pwidths.widths_table(20)
    assert doc["passed"] and doc["failures"] == []
    assert [e["omega"] for e in doc["entries"]][:4] == [2 * math.pi] * 3 + [4 * math.pi]
    assert "csv" in doc
    assert pwidths.isqrt(99) == 9
    assert abs(pwidths.weyl_constant(10**6) - math.sqrt(math.pi)) < 1e-15


def test_quantize_and_errors():
    assert pwidths.quantize("1/40", 10)["count"] == 120
    with pytest.raises(pwidths.PwidthsError) as info:
        pwidths.quantize("0.3", 2)
    assert info.value.kind == "MuTooLarge"
    assert isinstance(info.value, RuntimeError)


def test_crofton_deterministic():
    a = pwidths.crofton(1, trials=2, samples=500, seed=4)
    b = pwidths.crofton(1, trials=2, samples=500, seed=4, threads=2)
    assert a["per_trial"] == b["per_trial"]
    assert a["bound"] == pytest.approx(2 * math.pi)


def test_phase_field():
    assert pwidths.h0() == pytest.approx(8 / math.pi**2, abs=1e-12)
    sol = pwidths.solve_axisymmetric(0.1, 1024)
    assert isinstance(sol["values"], np.ndarray) and sol["values"].shape == sol["grid"].shape
    assert sol["index"] == 1
    assert 6.2 < sol["mass"] < 2 * math.pi
    rows = pwidths.minmax1([0.1, 0.05], 1024)["rows"]
    assert rows[0]["mass"] < rows[1]["mass"]


def test_scattering():
    lam = complex(math.cos(1.0), math.sin(1.0))
    assert abs(pwidths.kink_transmission(lam) - (lam - 1j) / (lam + 1j)) < 1e-8
    doc = pwidths.scatter({"analytic": "kink"}, thetas=32)
    assert doc["antipodal"] is True and len(doc["bound_states"]) == 1
    field = pwidths.glue([90, 270], grid=128)
    assert field["passed"]
    assert pwidths.scatter(field, thetas=32)["passed"]


def test_surfaces_and_nets():
    ell = pwidths.principal_geodesic_lengths(1.0, 1.0, 1.0)
    assert ell == pytest.approx([2 * math.pi] * 3, abs=1e-10)
    J = pwidths.principal_lengths_jacobian([1.0, 1.0, 1.0])
    assert np.allclose(J, math.pi * (np.ones((3, 3)) - np.eye(3)), atol=1e-4)
    tuned = pwidths.ellipsoid_tune(0.05)
    assert tuned["passed"]
    doc = pwidths.nets({"kind": "RoundSphere", "params": []}, preset="theta", Q=4)
    assert doc["kernel_dim"] == 3
    assert len(doc["vertex_positions"]) == 14
