import numpy as np
import pytest

from rankone.errors import ParameterError
from rankone.recovery import RecoveryConfig, recover
from rankone.specs import approximant_to_dict, factor_from_spec, tensor_from_spec
from rankone.tensor import QueryOracle


class TestFactorFromSpec:
    def test_bump(self):
        f = factor_from_spec({"kind": "bump", "orientation": "left"}, 2)
        assert float(f(0.0)) == pytest.approx(1.0)

    def test_trig(self):
        f = factor_from_spec({"kind": "trig", "amplitude": 0.2,
                              "frequency": 1.0, "offset": 0.7}, 1)
        assert float(f(0.0)) == pytest.approx(0.7)

    def test_polynomial(self):
        f = factor_from_spec({"kind": "polynomial-piecewise",
                              "coefficients": [0.5, 0.5]}, 1)
        assert float(f(1.0)) == pytest.approx(1.0)

    def test_table(self):
        f = factor_from_spec({"kind": "explicit-table", "ts": [0, 1],
                              "values": [0, 1], "sup_bound": 1.0,
                              "deriv_bound": 1.0}, 1)
        assert float(f(0.5)) == pytest.approx(0.5)

    def test_unknown_kind(self):
        with pytest.raises(ParameterError):
            factor_from_spec({"kind": "mystery"}, 1)


class TestTensorFromSpec:
    def test_replicate(self):
        t = tensor_from_spec({"d": 3, "r": 1, "M": 2.0, "replicate": True,
                              "factor": {"kind": "bump", "orientation": "left"}})
        assert t.d == 3 and t.value(np.zeros(3)) == pytest.approx(1.0)

    def test_explicit_factors(self):
        t = tensor_from_spec({
            "d": 2, "r": 1, "M": 2.0,
            "factors": [{"kind": "bump", "orientation": "left"},
                        {"kind": "bump", "orientation": "right"}]})
        assert t.value(np.array([0.0, 1.0])) == pytest.approx(1.0)

    def test_factor_count_mismatch(self):
        with pytest.raises(ParameterError):
            tensor_from_spec({"d": 3, "r": 1, "M": 1.0,
                              "factors": [{"kind": "bump", "orientation": "left"}]})

    def test_missing_field(self):
        with pytest.raises(ParameterError):
            tensor_from_spec({"d": 2, "r": 1})

    def test_witness_box(self):
        t = tensor_from_spec({"d": 2, "r": 1, "M": 2.0, "V": 0.04,
                              "replicate": True,
                              "factor": {"kind": "bump", "orientation": "left"},
                              "witness_box": {"lower": [0.1, 0.1],
                                              "upper": [0.4, 0.4]}})
        assert t.support_volume == 0.04
        assert t.witness_box.volume == pytest.approx(0.09)


class TestApproximantSerialization:
    def test_roundtrip_fields(self):
        t = tensor_from_spec({"d": 2, "r": 2, "M": 1.0, "replicate": True,
                              "factor": {"kind": "polynomial-piecewise",
                                         "coefficients": [0.5, 0.3]}})
        ap = recover(QueryOracle(t), np.full(2, 0.4),
                     RecoveryConfig(r=2, budget_n2=21))
        obj = approximant_to_dict(ap)
        assert obj["center_value"] == pytest.approx(t.value(np.full(2, 0.4)))
        assert len(obj["axes"]) == 2
        axis = obj["axes"][0]
        assert len(axis["coefficients"]) == len(axis["breakpoints"]) - 1
        assert all(len(piece) == 2 for piece in axis["nodes"])
