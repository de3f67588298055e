"""Serve loop: line-delimited JSON over stdin/stdout (protocol version 1).

The worker answers one response per request and stays alive through
malformed requests (replying with an error record); it refuses the
handshake and exits nonzero on a protocol-version or field-set mismatch.
"""

from __future__ import annotations

import argparse
import json
import sys

from .models import build_model

PROTOCOL_VERSION = 1


def _emit(stream, record: dict) -> None:
    stream.write(json.dumps(record, ensure_ascii=False) + "\n")
    stream.flush()


def _validate_request(request: dict) -> str | None:
    if not isinstance(request, dict):
        return "request is not an object"
    for key in ("doc_id", "page", "words"):
        if key not in request:
            return f"request is missing {key!r}"
    if not isinstance(request["words"], list):
        return "request 'words' is not an array"
    page = request["page"]
    if not isinstance(page, dict) or "width" not in page or "height" not in page:
        return "request 'page' must carry width and height"
    for w in request["words"]:
        if not isinstance(w, dict) or "text" not in w or "box" not in w:
            return "word must carry text and box"
        if not isinstance(w["box"], list) or len(w["box"]) != 4:
            return "word box must be an array of 4 numbers"
    return None


def serve(model, mode: str, stdin=None, stdout=None) -> int:
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout

    hello_line = stdin.readline()
    if not hello_line:
        return 1
    try:
        hello = json.loads(hello_line)
    except json.JSONDecodeError:
        _emit(stdout, {"doc_id": None, "error": "handshake is not valid JSON"})
        return 1
    if hello.get("protocol_version") != PROTOCOL_VERSION:
        _emit(stdout, {
            "doc_id": None,
            "error": f"unsupported protocol_version {hello.get('protocol_version')!r}; "
                     f"this worker speaks {PROTOCOL_VERSION}",
        })
        return 1
    names = model.config.field_names
    if hello.get("fields") != names:
        _emit(stdout, {
            "doc_id": None,
            "error": f"field set mismatch: model serves {names}",
        })
        return 1
    _emit(stdout, {"protocol_version": PROTOCOL_VERSION, "fields": names, "mode": mode})

    for line in stdin:
        if not line.strip():
            continue
        try:
            request = json.loads(line)
        except json.JSONDecodeError:
            _emit(stdout, {"doc_id": None, "error": "request is not valid JSON"})
            continue
        problem = _validate_request(request)
        if problem is not None:
            doc_id = request.get("doc_id") if isinstance(request, dict) else None
            _emit(stdout, {"doc_id": doc_id, "error": problem})
            continue
        try:
            if mode == "scores":
                response = {"doc_id": request["doc_id"], "scores": model.score(request)}
            else:
                response = {"doc_id": request["doc_id"], "values": model.values(request)}
        except Exception as exc:  # stay alive: report and keep serving
            _emit(stdout, {"doc_id": request.get("doc_id"), "error": f"scoring failed: {exc}"})
            continue
        _emit(stdout, response)
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="fieldworker",
        description="Reference extraction worker for the form-attack harness.",
    )
    parser.add_argument("--mode", choices=("scores", "values"), default="scores")
    parser.add_argument(
        "--model", default="invoice",
        help="invoice | receipt | path to a JSON model config | hf:<checkpoint>[:config]",
    )
    args = parser.parse_args(argv)
    model = build_model(args.model)
    return serve(model, args.mode)


if __name__ == "__main__":
    raise SystemExit(main())
