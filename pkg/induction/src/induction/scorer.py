"""Client for the program-scoring service (newline-delimited JSON).

The service is the scoring toolkit's `serve` subcommand, reached either as a
spawned child process on stdio (default) or over TCP. Requests are pipelined
with a bounded in-flight window and correlated by id.
"""
from __future__ import annotations

import json
import shlex
import socket
import subprocess


class ServiceUnavailable(Exception):
    pass


class ScorerClient:
    """`spec` is `stdio:<command>` (e.g. `stdio:homeprog serve --mode stdio`)
    or `tcp:<host>:<port>`."""

    def __init__(self, spec: str = "stdio:homeprog serve --mode stdio",
                 max_in_flight: int = 8):
        self.max_in_flight = max_in_flight
        self._proc = None
        self._sock = None
        try:
            if spec.startswith("stdio:"):
                cmd = shlex.split(spec[len("stdio:"):])
                self._proc = subprocess.Popen(
                    cmd, stdin=subprocess.PIPE, stdout=subprocess.PIPE, text=True,
                )
                self._w, self._r = self._proc.stdin, self._proc.stdout
            elif spec.startswith("tcp:"):
                host, port = spec[len("tcp:"):].rsplit(":", 1)
                self._sock = socket.create_connection((host, int(port)), timeout=60)
                f = self._sock.makefile("rw", encoding="utf-8")
                self._w = self._r = f
            else:
                raise ValueError(f"bad scorer spec {spec!r}")
        except (OSError, ValueError) as e:
            raise ServiceUnavailable(str(e)) from e

    def close(self):
        if self._proc is not None:
            self._proc.stdin.close()
            self._proc.wait(timeout=30)
        if self._sock is not None:
            self._sock.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def _send(self, doc: dict):
        try:
            self._w.write(json.dumps(doc) + "\n")
            self._w.flush()
        except (BrokenPipeError, OSError) as e:
            raise ServiceUnavailable(str(e)) from e

    def _recv(self) -> dict:
        line = self._r.readline()
        if not line:
            raise ServiceUnavailable("scoring service closed the stream")
        return json.loads(line)

    def score_batch(self, requests: list[dict]) -> list[dict]:
        """Responses aligned to requests; each request dict needs at least
        `candidate`; ids are assigned here for correlation."""
        tagged = []
        for k, req in enumerate(requests):
            doc = dict(req)
            doc["id"] = f"req-{k}"
            tagged.append(doc)
        responses: dict[str, dict] = {}
        sent = 0
        while len(responses) < len(tagged):
            while sent < len(tagged) and sent - len(responses) < self.max_in_flight:
                self._send(tagged[sent])
                sent += 1
            resp = self._recv()
            responses[resp["id"]] = resp
        return [responses[f"req-{k}"] for k in range(len(tagged))]

    def score(self, candidate: list[str], reference: list[str] | None = None,
              env: str = "demo_home", prep: bool = True, seed: int = 0) -> dict:
        req = {"candidate": candidate, "env": env, "prep": prep, "seed": seed}
        if reference is not None:
            req["reference"] = reference
        return self.score_batch([req])[0]


def reward_from_response(resp: dict, lambda_sim: float) -> float:
    """Recompute the combined reward locally so one server configuration can
    drive both the LCS-only and LCS+Sim policy-gradient objectives."""
    return resp.get("norm_lcs", 0.0) + lambda_sim * (1.0 if resp.get("executable") else 0.0)
