"""FastAPI service endpoints: behavior, determinism, error mapping."""

import json
import warnings

import pytest

with warnings.catch_warnings():
    warnings.simplefilter("ignore")
    from fastapi.testclient import TestClient

from lie_prelim.service.app import app


@pytest.fixture(scope="module")
def client():
    return TestClient(app)


class TestHealth:
    def test_health(self, client):
        body = client.get("/health").json()
        assert body["status"] == "ok"


class TestDerive:
    def test_builtin_class(self, client):
        r = client.post("/derive", json={"source": {"builtin": "gen-diff"}})
        assert r.status_code == 200
        body = r.json()
        assert len(body["equations"]) == 7
        assert body["residuals_vanish"] is None
        assert "Diff(tau,u)" in body["text"]
        assert body["latex"].startswith("\\begin{align*}")

    def test_inline_class(self, client):
        inline = {
            "name": "heat", "delta": "u_t - u_xx", "solved_for": "u_t",
            "rhs": "u_xx", "arbitrary_elements": {}, "auxiliary": [],
            "nonvanishing": []}
        r = client.post("/derive", json={"source": {"inline": inline},
                                         "ansatz": "Q = 2*t*dt + x*dx"})
        assert r.status_code == 200
        assert r.json()["residuals_vanish"] is True

    def test_failing_ansatz(self, client):
        r = client.post("/derive", json={"source": {"builtin": "heat"},
                                         "ansatz": "u*dx"})
        assert r.status_code == 200
        assert r.json()["residuals_vanish"] is False

    def test_bad_ansatz_is_input_error(self, client):
        r = client.post("/derive", json={"source": {"builtin": "heat"},
                                         "ansatz": ""})
        assert r.status_code == 422
        r = client.post("/derive", json={"source": {"builtin": "heat"},
                                         "ansatz": "dx*dx"})
        assert r.status_code == 422

    def test_unknown_builtin(self, client):
        r = client.post("/derive", json={"source": {"builtin": "nope"}})
        assert r.status_code == 422


class TestKernelEndpoint:
    def test_conditions_and_candidate(self, client):
        r = client.post("/kernel", json={"source": {"builtin": "gen-diff"},
                                         "candidate": {"coefficients": {"_ansatz": "dt"}}})
        body = r.json()
        assert body["conditions"] == ["eta", "Diff(tau,t)", "xi"]
        assert body["candidate_passes"] is True

    def test_failing_candidate(self, client):
        r = client.post("/kernel", json={"source": {"builtin": "gen-diff"},
                                         "candidate": {"coefficients": {"_ansatz": "u*du"}}})
        assert r.json()["candidate_passes"] is False


class TestCheckEquiv:
    def test_symbolic_h_passes(self, client):
        r = client.post("/check-equiv", json={
            "source": {"builtin": "gen-diff"},
            "field": {"coefficients":
                      {"_ansatz": "h*du - (Diff(h,u)*f + Diff(h,u,u)*g)*df"},
                      "functions": {"h": ["u"]}}})
        assert r.json()["passed"] is True

    def test_published_error_fails(self, client):
        r = client.post("/check-equiv", json={
            "source": {"builtin": "gen-diff"},
            "field": {"coefficients": {"_ansatz": "b*du"},
                      "functions": {"b": ["x"]}}})
        body = r.json()
        assert body["passed"] is False
        assert body["main_residuals"]


class TestTransform:
    def test_burgers(self, client):
        r = client.post("/transform", json={
            "transformation": {"u_rule": "exp(u)", "u_inverse": "ln(u)"},
            "f": "1", "g": "1"})
        assert r.json() == {"f": "0", "g": "1"}

    def test_scalings(self, client):
        r = client.post("/transform", json={
            "transformation": {"A1": "2", "B1": "3"}, "f": "f", "g": "g",
            "functions": {"f": ["x", "u"], "g": ["x", "u"]}})
        body = r.json()
        assert body["g"] == "9*g(x/3,u)/2"

    def test_degenerate_rejected(self, client):
        r = client.post("/transform", json={
            "transformation": {"A1": "0"}, "f": "1", "g": "1"})
        assert r.status_code == 422


class TestCommutatorAdjoint:
    def test_commutator(self, client):
        r = client.post("/commutator", json={
            "v": {"coefficients": {"_ansatz": "dx"}},
            "w": {"coefficients": {"_ansatz": "x^2*dx - 3*x*u*du"}}})
        assert r.json()["result"] == {"u": "-3*u", "x": "2*x"}

    def test_adjoint_series_vs_closed(self, client):
        payload = {"v": {"a3": "1"}, "w": {"a1": "1"}, "eps": "eps",
                   "order": 4, "method": "series"}
        r1 = client.post("/adjoint", json=payload).json()
        payload["method"] = "closed"
        r2 = client.post("/adjoint", json=payload).json()
        assert r1["result"] == r2["result"]
        assert r1["terminated"] is True


class TestClassify:
    def test_1d(self, client):
        r = client.post("/classify", json={"basis": [
            {"a1": "1", "a2": "3", "a3": "5"}]})
        body = r.json()
        assert body["list_id"] == "1D-1"
        assert body["params"] == {"a": "3", "delta": "0"}
        assert body["appropriateness"]["passes"] is True

    def test_2d_case_trace(self, client):
        r = client.post("/classify", json={"basis": [{"a3": "1"}, {"a1": "1"}]})
        body = r.json()
        assert body["list_id"] == "2D-3"
        assert any("subcase (b)" in t for t in body["case_trace"])

    def test_wronskian_failure(self, client):
        r = client.post("/classify", json={"basis": [
            {"h": "1"}, {"h": "u"}, {"h": "u^2"}]})
        body = r.json()
        assert body["appropriateness"]["m"] == 3
        assert body["appropriateness"]["passes"] is False

    def test_structural_error(self, client):
        r = client.post("/classify", json={"basis": [{"h": "1"}, {"h": "u^2"}]})
        assert r.status_code == 409
        assert r.json()["detail"]["kind"] == "structure"


class TestVerifyEndpoint:
    def test_all(self, client):
        r = client.post("/verify", json={"table": "all"})
        body = r.json()
        assert body["passed"] is True and len(body["rows"]) == 17

    def test_bad_table(self, client):
        assert client.post("/verify", json={"table": "9"}).status_code == 422

    def test_deterministic_bytes(self, client):
        a = client.post("/verify", json={"table": "1", "seed": 5}).content
        b = client.post("/verify", json={"table": "1", "seed": 5}).content
        assert a == b


class TestReport:
    def test_full_report(self, client):
        r = client.post("/report", json={})
        body = r.json()
        assert body["equivalence_generators_pass"] is True
        assert body["tables"]["passed"] is True
        assert body["kernel_conditions"] == ["eta", "Diff(tau,t)", "xi"]
        assert "Diff(T,t,t)" in body["admissible_constraints"]
