"""Command-line client for the verification service.

The CLI is a thin HTTP client: by default it mounts the FastAPI app over an
in-process ASGI transport, so no server is needed; --server switches to a
remote instance.  Exit codes: 0 all checks pass, 1 verification failures,
2 input errors, 3 structural errors (input not a subalgebra).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import httpx

EXIT_OK = 0
EXIT_VERIFICATION = 1
EXIT_INPUT = 2
EXIT_STRUCTURE = 3

BUILTIN_CLASSES = ("gen-diff", "heat", "linear-evolution")


def make_client(server: str | None) -> httpx.Client:
    if server:
        return httpx.Client(base_url=server, timeout=120.0)
    import warnings
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        from fastapi.testclient import TestClient
    from .service.app import app
    return TestClient(app)


def _fail(code: int, message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _post(client: httpx.Client, path: str, payload: dict):
    resp = client.post(path, json=payload)
    if resp.status_code == 200:
        return resp.json(), EXIT_OK
    try:
        detail = resp.json().get("detail")
    except Exception:
        detail = resp.text
    if isinstance(detail, dict):
        kind = detail.get("kind", "input")
        message = detail.get("message", str(detail))
    else:
        kind, message = "input", str(detail)
    code = EXIT_STRUCTURE if kind == "structure" else EXIT_INPUT
    print(f"error ({kind}): {message}", file=sys.stderr)
    return None, code


def _class_source(spec: str) -> dict:
    if spec in BUILTIN_CLASSES:
        return {"builtin": spec}
    path = Path(spec)
    if not path.exists():
        raise ValueError(f"class file not found: {spec}")
    return {"inline": json.loads(path.read_text())}


def _functions_arg(pairs: list[str]) -> dict[str, list[str]]:
    out = {}
    for p in pairs:
        name, _, args = p.partition(":")
        if not args:
            raise ValueError(f"malformed function declaration {p!r}; use name:arg1,arg2")
        out[name] = args.split(",")
    return out


def _field_payload(text: str, fns: list[str]) -> dict:
    return {"coefficients": {"_ansatz": text}, "functions": _functions_arg(fns)}


def _emit(data, fmt: str, text_key: str = "text") -> None:
    if fmt == "json":
        print(json.dumps(data, indent=2, sort_keys=True))
    elif fmt == "latex" and "latex" in data:
        print(data["latex"])
    elif text_key in data:
        print(data[text_key])
    else:
        print(json.dumps(data, indent=2, sort_keys=True))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="lie-prelim",
        description="Lie-symmetry determining equations, equivalence structure and "
                    "preliminary group classification for generalized diffusion equations")
    ap.add_argument("--server", help="URL of a running service (default: in-process)")
    ap.add_argument("--format", choices=("text", "latex", "json"), default="text")
    ap.add_argument("--seed", type=int, default=None,
                    help="seed for randomized oracles (env LIE_PRELIM_SEED overrides)")
    ap.add_argument("--tol", type=float, default=None, help="numeric oracle tolerance")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("derive", help="determining equations or ansatz residuals")
    p.add_argument("--class", dest="cls", required=True,
                   help="builtin name or JSON class file")
    p.add_argument("--ansatz", help="vector field, e.g. 'Q = 2*t*dt + x*dx'")

    p = sub.add_parser("kernel", help="kernel conditions of a class")
    p.add_argument("--class", dest="cls", required=True)
    p.add_argument("--candidate", help="candidate field, e.g. 'dt' syntax like derive")
    p.add_argument("--fn", action="append", default=[], help="declare function name:args")

    p = sub.add_parser("check-equiv", help="equivalence-algebra invariance check")
    p.add_argument("--class", dest="cls", required=True)
    p.add_argument("--field", required=True,
                   help="field like 'h*du - (Diff(h,u)*f + Diff(h,u,u)*g)*df'")
    p.add_argument("--fn", action="append", default=[], help="declare function name:args")

    p = sub.add_parser("admissible", help="admissible-transformation split")
    p.add_argument("--class", dest="cls", required=True)

    p = sub.add_parser("transform", help="equivalence-group action on (f, g)")
    p.add_argument("--f", required=True)
    p.add_argument("--g", required=True)
    p.add_argument("--u-rule", default="u")
    p.add_argument("--u-inverse", default=None)
    p.add_argument("--A0", default="0")
    p.add_argument("--A1", default="1")
    p.add_argument("--B0", default="0")
    p.add_argument("--B1", default="1")
    p.add_argument("--fn", action="append", default=[])

    p = sub.add_parser("commutator", help="commutator of two vector fields")
    p.add_argument("--v", required=True)
    p.add_argument("--w", required=True)
    p.add_argument("--fn", action="append", default=[])

    p = sub.add_parser("adjoint", help="adjoint action on algebra elements")
    p.add_argument("--v", required=True, help='element JSON, e.g. \'{"a1": "1"}\'')
    p.add_argument("--w", required=True)
    p.add_argument("--eps", default="eps")
    p.add_argument("--order", type=int, default=6)
    p.add_argument("--method", choices=("series", "closed"), default="closed")

    p = sub.add_parser("classify", help="normalize a subalgebra to the optimal lists")
    p.add_argument("--input", help="JSON file with {'basis': [elements]}")
    p.add_argument("--basis", help="inline JSON list of elements")

    p = sub.add_parser("verify", help="verify classification tables")
    p.add_argument("--table", default="all", help="1, 2, 3 or all")
    p.add_argument("--uncorrected", action="store_true")

    sub.add_parser("report", help="full verification report")

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    seed = args.seed
    env_seed = os.environ.get("LIE_PRELIM_SEED")
    if env_seed is not None:
        try:
            seed = int(env_seed)
        except ValueError:
            return _fail(EXIT_INPUT, f"LIE_PRELIM_SEED is not an integer: {env_seed!r}")

    if args.command == "serve":
        import uvicorn
        from .service.app import app
        uvicorn.run(app, host=args.host, port=args.port)
        return EXIT_OK

    try:
        client = make_client(args.server)
    except Exception as e:
        return _fail(EXIT_INPUT, str(e))
    with client:
        return run_command(client, args, seed)


def run_command(client: httpx.Client, args, seed: int | None) -> int:
    fmt = args.format
    try:
        if args.command == "derive":
            source = _class_source(args.cls)
            payload = {"source": source, "ansatz": args.ansatz, "seed": seed}
            data, code = _post(client, "/derive", payload)
            if data is None:
                return code
            _emit(data, fmt)
            if data.get("residuals_vanish") is False:
                print("ansatz residuals do not vanish", file=sys.stderr)
                return EXIT_VERIFICATION
            if data.get("residuals_vanish") is True and fmt == "text":
                print("all determining residuals vanish: the ansatz is a symmetry")
            return EXIT_OK

        if args.command == "kernel":
            payload = {"source": _class_source(args.cls)}
            if args.candidate:
                payload["candidate"] = _field_payload(args.candidate, args.fn)
            data, code = _post(client, "/kernel", payload)
            if data is None:
                return code
            if fmt == "json":
                _emit(data, fmt)
            else:
                print("kernel conditions: "
                      + ", ".join(f"{c} = 0" for c in data["conditions"]))
                if data.get("candidate_passes") is not None:
                    print(f"candidate: {'PASS' if data['candidate_passes'] else 'FAIL'}")
            if data.get("candidate_passes") is False:
                return EXIT_VERIFICATION
            return EXIT_OK

        if args.command == "check-equiv":
            payload = {"source": _class_source(args.cls),
                       "field": _field_payload(args.field, args.fn)}
            data, code = _post(client, "/check-equiv", payload)
            if data is None:
                return code
            if fmt == "json":
                _emit(data, fmt)
            else:
                print("PASS" if data["passed"] else "FAIL")
                for eq in data["main_residuals"]:
                    print(f"  [{eq['monomial']}]  {eq['lhs']} = 0 violated")
                for name, r in data["auxiliary_residuals"]:
                    if r != "0":
                        print(f"  [{name}]  {r} = 0 violated")
            return EXIT_OK if data["passed"] else EXIT_VERIFICATION

        if args.command == "admissible":
            data, code = _post(client, "/admissible",
                               {"source": _class_source(args.cls)})
            if data is None:
                return code
            if fmt == "json":
                _emit(data, fmt)
            else:
                for eq in data["equations"]:
                    print(f"{eq['monomial']:8}: {eq['lhs']} = 0")
                print("constraints: " + ", ".join(f"{c} = 0" for c in data["constraints"]))
            return EXIT_OK

        if args.command == "transform":
            payload = {"transformation": {"A0": args.A0, "A1": args.A1,
                                          "B0": args.B0, "B1": args.B1,
                                          "u_rule": args.u_rule,
                                          "u_inverse": args.u_inverse},
                       "f": args.f, "g": args.g,
                       "functions": _functions_arg(args.fn)}
            data, code = _post(client, "/transform", payload)
            if data is None:
                return code
            if fmt == "json":
                _emit(data, fmt)
            else:
                print(f"f -> {data['f']}")
                print(f"g -> {data['g']}")
            return EXIT_OK

        if args.command == "commutator":
            payload = {"v": _field_payload(args.v, args.fn),
                       "w": _field_payload(args.w, args.fn)}
            data, code = _post(client, "/commutator", payload)
            if data is None:
                return code
            if fmt == "json":
                _emit(data, fmt)
            else:
                result = data["result"]
                if not result:
                    print("0")
                else:
                    print(" + ".join(f"({e})*d_{c}" for c, e in sorted(result.items())))
            return EXIT_OK

        if args.command == "adjoint":
            payload = {"v": json.loads(args.v), "w": json.loads(args.w),
                       "eps": args.eps, "order": args.order, "method": args.method}
            data, code = _post(client, "/adjoint", payload)
            if data is None:
                return code
            _emit(data, "json")
            return EXIT_OK

        if args.command == "classify":
            if bool(args.input) == bool(args.basis):
                return _fail(EXIT_INPUT, "classify needs exactly one of --input or --basis")
            if args.input:
                basis = json.loads(Path(args.input).read_text())["basis"]
            else:
                basis = json.loads(args.basis)
            data, code = _post(client, "/classify", {"basis": basis, "seed": seed})
            if data is None:
                return code
            if fmt == "json":
                _emit(data, fmt)
            else:
                if data["list_id"]:
                    params = ", ".join(f"{k}={v}" for k, v in data["params"].items())
                    print(f"canonical form: {data['list_id']}"
                          + (f" [{params}]" if params else ""))
                    print("case trace: " + " | ".join(data["case_trace"]))
                    for step in data["witness"]:
                        print(f"  witness {step['kind']}: {step['note']}")
                rep = data["appropriateness"]
                print(f"appropriateness: {'PASS' if rep['passes'] else 'FAIL'} "
                      f"(closed={rep['closed']}, dim={rep['dim']}, "
                      f"Dt in span={rep['dt_in_span']}, m={rep['m']})")
                for note in rep["notes"]:
                    print(f"  note: {note}")
            return EXIT_OK if data["appropriateness"]["passes"] else EXIT_VERIFICATION

        if args.command == "verify":
            payload = {"table": str(args.table), "corrected": not args.uncorrected,
                       "seed": seed}
            data, code = _post(client, "/verify", payload)
            if data is None:
                return code
            _emit(data, fmt)
            return EXIT_OK if data["passed"] else EXIT_VERIFICATION

        if args.command == "report":
            data, code = _post(client, "/report", {"seed": seed})
            if data is None:
                return code
            if fmt == "json":
                _emit(data, fmt)
            else:
                print(data["determining_text"])
                print()
                print("kernel: " + ", ".join(f"{c} = 0" for c in data["kernel_conditions"]))
                print("equivalence generators: "
                      + ("PASS" if data["equivalence_generators_pass"] else "FAIL"))
                print("admissible constraints: "
                      + ", ".join(f"{c} = 0" for c in data["admissible_constraints"]))
                print()
                print(data["tables"]["text"])
                print()
                print(data["summary"])
            ok = data["equivalence_generators_pass"] and data["tables"]["passed"]
            return EXIT_OK if ok else EXIT_VERIFICATION
    except (ValueError, json.JSONDecodeError) as e:
        return _fail(EXIT_INPUT, str(e))
    except httpx.HTTPError as e:
        return _fail(EXIT_INPUT, f"transport failure: {e}")
    return _fail(EXIT_INPUT, f"unknown command {args.command!r}")


if __name__ == "__main__":
    sys.exit(main())
