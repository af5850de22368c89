"""Curve tables (CSV, ``s,x1,...,xn``) and JSON synthesis specs."""

from __future__ import annotations

import json
import re
from pathlib import Path

import numpy as np

from .ccr import CcrSpec, k1_from_dict
from .frenet import CurveSamples
from .numkit import ValidationError

SPEC_KEYS = ("dimension", "ratios", "k1", "domain", "initial_point", "initial_frame", "steps")
REQUIRED_KEYS = ("dimension", "ratios", "k1", "domain")
DEFAULT_STEPS = 2000


def format_curve(samples: CurveSamples) -> str:
    n = samples.n
    lines = ["s," + ",".join(f"x{i}" for i in range(1, n + 1))]
    for s, p in zip(samples.s, samples.points):
        lines.append(",".join(f"{v:.17g}" for v in (s, *p)))
    return "\n".join(lines) + "\n"


def write_curve(path, samples: CurveSamples) -> None:
    Path(path).write_text(format_curve(samples))


def parse_curve(text: str, source: str = "<curve>") -> CurveSamples:
    lines = text.splitlines()
    if not lines or not lines[0].strip():
        raise ValidationError(f"{source}:1: missing header")
    header = [h.strip() for h in lines[0].split(",")]
    n = len(header) - 1
    expected = ["s"] + [f"x{i}" for i in range(1, n + 1)]
    if n < 2 or header != expected:
        raise ValidationError(
            f"{source}:1: header must read s,x1,...,xn with n >= 2, got {lines[0]!r}"
        )
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != n + 1:
            raise ValidationError(f"{source}:{lineno}: expected {n + 1} columns, got {len(parts)}")
        try:
            rows.append([float(x) for x in parts])
        except ValueError:
            raise ValidationError(f"{source}:{lineno}: non-numeric entry") from None
    if len(rows) < 2:
        raise ValidationError(f"{source}: need at least two samples")
    data = np.array(rows)
    try:
        return CurveSamples(s=data[:, 0], points=data[:, 1:])
    except ValidationError as exc:
        raise ValidationError(f"{source}: {exc}") from None


def read_curve(path) -> CurveSamples:
    return parse_curve(Path(path).read_text(), str(path))


def _key_line(text: str, key: str) -> int | None:
    m = re.search(r'"%s"\s*:' % re.escape(key), text)
    return text.count("\n", 0, m.start()) + 1 if m else None


def _blame(msg: str) -> str:
    for word, key in (("ratio", "ratios"), ("initial_point", "initial_point"),
                      ("initial_frame", "initial_frame"), ("domain", "domain"),
                      ("dimension", "dimension")):
        if word in msg:
            return key
    return "k1"


def parse_spec(text: str, source: str = "<spec>") -> tuple[CcrSpec, int]:
    """Parse a JSON spec; returns the CcrSpec and the step count.

    Error messages carry the line of the offending key.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{source}:{exc.lineno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise ValidationError(f"{source}:1: top level must be an object")

    def fail(key, msg):
        line = _key_line(text, key)
        where = f"{source}:{line}" if line else source
        raise ValidationError(f"{where}: {key}: {msg}")

    for key in doc:
        if key not in SPEC_KEYS:
            fail(key, "unknown key")
    for key in REQUIRED_KEYS:
        if key not in doc:
            raise ValidationError(f"{source}: missing required key {key!r}")

    steps = doc.get("steps", DEFAULT_STEPS)
    if not isinstance(steps, int) or isinstance(steps, bool) or steps < 2:
        fail("steps", "must be an integer >= 2")
    try:
        k1 = k1_from_dict(doc["k1"])
    except (ValidationError, TypeError, KeyError) as exc:
        fail("k1", str(exc))
    if not isinstance(doc["dimension"], int) or isinstance(doc["dimension"], bool):
        fail("dimension", "must be an integer")
    for key in ("ratios", "domain", "initial_point"):
        if key in doc and not isinstance(doc[key], list):
            fail(key, "must be an array")
    fields = {
        "dimension": doc["dimension"],
        "ratios": doc["ratios"],
        "k1": k1,
        "domain": doc["domain"],
        "initial_point": doc.get("initial_point"),
        "initial_frame": doc.get("initial_frame"),
    }
    try:
        spec = CcrSpec(**fields)
    except (ValidationError, TypeError, ValueError) as exc:
        fail(_blame(str(exc)), str(exc))
    return spec, steps


def read_spec(path) -> tuple[CcrSpec, int]:
    return parse_spec(Path(path).read_text(), str(path))


def spec_document(spec: CcrSpec, steps: int = DEFAULT_STEPS) -> dict:
    doc = {
        "dimension": spec.dimension,
        "ratios": [float(c) for c in spec.ratios],
        "k1": spec.k1.to_dict(),
        "domain": [float(x) for x in spec.domain],
    }
    if spec.initial_point is not None:
        doc["initial_point"] = [float(x) for x in spec.initial_point]
    if spec.initial_frame is not None:
        doc["initial_frame"] = np.asarray(spec.initial_frame, dtype=float).tolist()
    doc["steps"] = steps
    return doc


def format_spec(spec: CcrSpec, steps: int = DEFAULT_STEPS) -> str:
    """JSON with one top-level key per line."""
    doc = spec_document(spec, steps)
    body = ",\n".join(f"  {json.dumps(k)}: {json.dumps(v)}" for k, v in doc.items())
    return "{\n" + body + "\n}\n"


def write_spec(path, spec: CcrSpec, steps: int = DEFAULT_STEPS) -> None:
    Path(path).write_text(format_spec(spec, steps))
