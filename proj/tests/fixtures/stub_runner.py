#!/usr/bin/env python3
"""Minimal runner for tests: one request on stdin, one response on stdout."""
import io
import json
import os
import signal
import sys
import tempfile
import time


class Timeout(BaseException):
    pass


def _alarm(signum, frame):
    raise Timeout()


def _bad_request(message):
    sys.stdout.write(json.dumps({"error": message}) + "\n")
    sys.exit(2)


def _run(source, ns, timeout_ms):
    signal.setitimer(signal.ITIMER_REAL, timeout_ms / 1000.0)
    try:
        exec(compile(source, "<runner>", "exec"), ns)
    finally:
        signal.setitimer(signal.ITIMER_REAL, 0)


def main():
    try:
        req = json.loads(sys.stdin.read())
    except ValueError as e:
        _bad_request("invalid JSON: %s" % e)
    if not isinstance(req, dict):
        _bad_request("request must be an object")
    code, tests, timeout_ms = req.get("code"), req.get("tests"), req.get("timeout_ms")
    if not isinstance(code, str):
        _bad_request("code must be a string")
    if not isinstance(tests, list) or not all(isinstance(t, str) for t in tests):
        _bad_request("tests must be a list of strings")
    if not isinstance(timeout_ms, int) or isinstance(timeout_ms, bool) or timeout_ms <= 0:
        _bad_request("timeout_ms must be a positive integer")

    # Fresh cwd per request so file I/O in user code stays out of the caller's tree.
    scratch = tempfile.TemporaryDirectory(prefix="runner-")
    os.chdir(scratch.name)
    signal.signal(signal.SIGALRM, _alarm)
    real_stdout = sys.stdout
    sys.stdout = io.StringIO()
    start = time.monotonic()
    ns = {"__name__": "__runner__"}
    setup_error = None
    try:
        _run(code, ns, timeout_ms)
    except Timeout:
        setup_error = "Timeout"
    except BaseException as e:  # noqa: BLE001 - user code may raise anything
        setup_error = type(e).__name__

    results = []
    for test in tests:
        if setup_error is not None:
            results.append({"test": test, "status": "error", "error_class": setup_error})
            continue
        try:
            _run(test, ns, timeout_ms)
            results.append({"test": test, "status": "pass", "error_class": None})
        except AssertionError:
            results.append({"test": test, "status": "fail", "error_class": None})
        except Timeout:
            results.append({"test": test, "status": "error", "error_class": "Timeout"})
        except BaseException as e:  # noqa: BLE001
            results.append({"test": test, "status": "error", "error_class": type(e).__name__})

    sys.stdout = real_stdout
    elapsed = int((time.monotonic() - start) * 1000)
    sys.stdout.write(json.dumps({"results": results, "elapsed_ms": elapsed}) + "\n")
    sys.stdout.flush()
    os.chdir("/")
    scratch.cleanup()


if __name__ == "__main__":
    main()
