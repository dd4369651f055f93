"""Report records: determinism and numpy coercion."""

import json

import numpy as np

from dunkl.reports import REPORT_SCHEMA_VERSION, OperatorReport


def test_serialization_deterministic():
    def make():
        return OperatorReport(
            id="demo",
            params={"n": np.int64(4), "x": np.array([1.0, 2.0])},
            values={"z": np.complex128(1 + 2j), "v": np.float32(0.5)},
            tolerances={"z": 1e-6},
            passed=True,
            notes=["a"],
        )

    assert make().to_json() == make().to_json()


def test_json_shape():
    rep = OperatorReport(id="demo", values={"r": np.float64(1.5)})
    text = rep.to_json()
    assert text.endswith("\n")
    doc = json.loads(text)
    assert doc["schema_version"] == REPORT_SCHEMA_VERSION
    assert doc["id"] == "demo"
    assert doc["values"]["r"] == 1.5
    assert doc["passed"] is None
    # keys are sorted for byte-stable output
    keys = list(doc)
    assert keys == sorted(keys)


def test_numpy_and_complex_coercion():
    rep = OperatorReport(
        id="demo",
        values={
            "arr": np.arange(3),
            "cplx": 1.5 - 0.5j,
            "nested": {"t": (np.float64(1.0), 2)},
        },
    )
    doc = json.loads(rep.to_json())
    assert doc["values"]["arr"] == [0, 1, 2]
    assert doc["values"]["cplx"] == {"re": 1.5, "im": -0.5}
    assert doc["values"]["nested"]["t"] == [1.0, 2]
