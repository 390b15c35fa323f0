import json

import numpy as np
import pytest

from jdlab.specio import (
    SpecError,
    build_from_spec,
    load_built,
    load_spec,
    round_floats,
    round_sig,
    save_built,
    validate_spec,
)


def test_validate_rejects_missing_fields():
    with pytest.raises(SpecError, match="type"):
        validate_spec({"truncation_radius": 5})
    with pytest.raises(SpecError, match="truncation_radius"):
        validate_spec({"type": "lattice"})
    with pytest.raises(SpecError, match="positive"):
        validate_spec({"type": "lattice", "truncation_radius": -1})


def test_load_spec_reports_bad_json(tmp_path):
    p = tmp_path / "broken.json"
    p.write_text("{not json")
    with pytest.raises(SpecError, match="JSON"):
        load_spec(p)


@pytest.mark.parametrize(
    "payload, n_expected",
    [
        ({"type": "lattice", "truncation_radius": 10, "params": {"dim": 1}}, 21),
        (
            {"type": "weighted_line", "truncation_radius": 5, "params": {"lam": 1.0, "spacing": 0.5}},
            21,
        ),
        (
            {"type": "model_manifold", "truncation_radius": 4,
             "params": {"dim": 1, "spacing": 0.5, "profile": "constant"}},
            8,
        ),
        (
            {"type": "stack", "truncation_radius": 3,
             "params": {"dim": 1, "spacing": 1.0, "layers": 2, "alpha": 1.0, "beta": 1.0,
                        "psi": {"kind": "power", "a": 1.0, "p": 0.0}}},
            14,
        ),
        (
            {"type": "graph", "truncation_radius": 3,
             "params": {"graph_kind": "lattice2d", "extent": 2, "subdivisions": 1}},
            25 + 40,
        ),
    ],
)
def test_build_each_spec_type(payload, n_expected):
    built = build_from_spec(payload)
    assert built.space.n_points == n_expected
    if built.kernel is not None and built.kernel.matrix.nnz:
        assert (abs(built.kernel.matrix - built.kernel.matrix.T)).nnz == 0


def test_explicit_kernel_spec_roundtrip():
    payload = {
        "type": "lattice",
        "truncation_radius": 3,
        "params": {"dim": 1, "kernel": {"family": "explicit", "n_points": 4,
                                        "entries": [[0, 1, 2.0], [2, 1, 0.5]]}},
    }
    built = build_from_spec(payload)
    assert built.kernel.density(1, 0) == 2.0
    assert built.kernel.density(1, 2) == 0.5


def test_explicit_entries_conflicting_symmetry_rejected():
    payload = {
        "type": "lattice",
        "truncation_radius": 3,
        "params": {"dim": 1, "kernel": {"family": "explicit", "n_points": 3,
                                        "entries": [[0, 1, 2.0], [1, 0, 3.0]]}},
    }
    with pytest.raises(SpecError, match="conflicting"):
        build_from_spec(payload)


def test_explicit_entries_diagonal_rejected():
    payload = {
        "type": "lattice",
        "truncation_radius": 3,
        "params": {"dim": 1, "kernel": {"family": "explicit", "n_points": 3,
                                        "entries": [[1, 1, 2.0]]}},
    }
    with pytest.raises(SpecError, match="off-diagonal"):
        build_from_spec(payload)


def test_save_and_load_built(tmp_path):
    built = build_from_spec({"type": "lattice", "truncation_radius": 5, "params": {"dim": 1}})
    path = tmp_path / "inst.pkl"
    save_built(path, built)
    again = load_built(path)
    assert again.space.n_points == built.space.n_points
    assert (again.kernel.matrix != built.kernel.matrix).nnz == 0


def test_round_sig_and_floats():
    assert round_sig(1.0 / 3.0) == pytest.approx(0.333333333333, abs=1e-15)
    assert round_sig(0.0) == 0.0
    nested = round_floats({"a": [np.float64(1 / 7), {"b": np.int64(3)}]})
    assert isinstance(nested["a"][1]["b"], int)
    assert json.dumps(nested)  # json-serializable after conversion
