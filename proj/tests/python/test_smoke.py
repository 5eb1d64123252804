import json
import math

import numpy as np
import pytest

import membrane_fem as mf


def iso_material():
    return {"type": "isotropic", "E": 70e9, "nu": 0.3, "rho": 1600, "h": 0.001}


def test_structured_mesh_and_refine():
    spec = mf.StructuredSpec(1.0, 1.0, 4, 4)
    mesh = mf.generate_structured(spec)
    assert mesh.num_nodes == 25
    assert mesh.num_triangles == 32
    assert mesh.total_area() == pytest.approx(1.0)
    fine = mf.refine(spec)
    assert (fine.nx, fine.ny) == (8, 8)
    assert mf.generate_structured(fine).num_nodes == 81
    assert len(mf.boundary_nodes(mesh)) == 16
    assert mf.nearest_node(mesh, 0.5, 0.5) == 12


def test_mesh_from_arrays_rejects_clockwise():
    nodes = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    mesh = mf.Mesh(nodes, np.array([[0, 1, 2]]))
    assert mesh.signed_area(0) == pytest.approx(0.5)
    with pytest.raises(Exception):
        mf.Mesh(nodes, np.array([[0, 2, 1]]))


def test_read_msh_text():
    text = "\n".join([
        "$MeshFormat", "2.2 0 8", "$EndMeshFormat",
        "$Nodes", "4", "1 0 0 0", "2 1 0 0", "3 1 1 0", "4 0 1 0", "$EndNodes",
        "$Elements", "2", "1 2 2 0 1 1 2 3", "2 2 2 0 1 1 3 4", "$EndElements", "",
    ])
    mesh = mf.read_msh(text)
    assert mesh.num_nodes == 4
    assert mesh.num_triangles == 2


def test_element_stiffness_is_symmetric_with_rigid_null_space():
    coords = np.array([[0.0, 0.0], [1.0, 0.2], [0.3, 0.9]])
    K = mf.element_stiffness(coords, mf.reference_composite(), 1e-3)
    assert K.shape == (9, 9)
    assert np.allclose(K, K.T, rtol=0, atol=1e-9 * np.abs(K).max())
    eig = np.linalg.eigvalsh(K)
    assert np.sum(np.abs(eig) < 1e-9 * eig.max()) == 4
    translation = np.tile([1.0, 0.0, 0.0], 3)
    assert np.abs(K @ translation).max() < 1e-6


def test_assemble_returns_sparse_with_total_mass():
    mesh = mf.generate_structured(mf.StructuredSpec(1.0, 1.0, 3, 3))
    mat = mf.MaterialParams(1600.0, 1e-3, mf.isotropic(70e9, 0.3))
    K, M = mf.assemble(mesh, mat)
    n = 3 * mesh.num_nodes
    assert K.shape == (n, n) and M.shape == (n, n)
    ones_x = np.tile([1.0, 0.0, 0.0], mesh.num_nodes)
    assert ones_x @ (M @ ones_x) == pytest.approx(1600.0 * 1e-3 * 1.0)


def test_norms_and_rate():
    assert mf.norm([3.0, -4.0], "Linf") == 4.0
    assert mf.fit_rate([1.0, 0.25, 0.0625]) == pytest.approx(2.0)
    assert mf.distributed_b(0.5, 0.5, 2.0, 1.0) == pytest.approx(2.0)


def test_run_config_case1():
    cfg = {
        "mesh": {"Lx": 1.0, "Ly": 1.0, "nx": 4, "ny": 4},
        "material": iso_material(),
        "T": 2e-5,
        "border": "fixed",
        "case": {"id": 1, "b0": 1e6},
        "output": {"every_n_steps": 5},
    }
    r = mf.run_config(json.dumps(cfg))
    assert r["steps"] > 0
    assert r["snapshots"][0]["step"] == 0
    assert r["snapshots"][-1]["step"] == r["steps"]
    w_dot = np.asarray(r["final"]["adot"])[2::3]
    assert np.abs(w_dot).max() > 0
    assert np.all(np.isfinite(w_dot))


def test_run_study_small():
    cfg = {
        "mesh": {"Lx": 1.0, "Ly": 1.0, "nx": 2, "ny": 2},
        "material": iso_material(),
        "T": 2e-5,
        "border": "fixed",
        "case": {"id": 1, "b0": 1e6, "window_fraction": 2.0},
        "study": {"k_max": 2},
    }
    r = mf.run_study(json.dumps(cfg))
    assert len(r["levels"]) == 2
    assert set(r["rates"]) == {"L1", "L2", "Linf"}
    assert all(math.isfinite(v) for v in r["rates"].values())
    assert r["csv"].startswith("level,")
