"""Instance files: JSON descriptions of generators, and seeded construction.

An instance is a JSON object with fields

    type: "bdi" | "ci"
    n:    block size (>= 1)
    r:    rectangular width (bdi only, >= 0)
    b, a, c: matrix entries as row-major nested lists (a absent for ci)
    seed: optional integer recorded when the entries were drawn

Seeded entries are drawn uniformly in [-scale, scale] and then symmetrized
or skew-symmetrized, so a (type, n, r, seed, scale) tuple reproduces the
file byte for byte.
"""

from __future__ import annotations

import json

import numpy as np

from .bdi import BdiGenerator
from .ci import CiGenerator
from .errors import ValidationError


def random_bdi(n, r, seed, scale=1.0) -> BdiGenerator:
    """Seeded generator with symmetric b, skew c and (n, r) block a."""
    if n < 1 or r < 0:
        raise ValidationError("need n >= 1 and r >= 0")
    rng = np.random.default_rng(seed)
    b = rng.uniform(-scale, scale, size=(n, n))
    a = rng.uniform(-scale, scale, size=(n, r))
    c = rng.uniform(-scale, scale, size=(n, n))
    return BdiGenerator(0.5 * (b + b.T), a, 0.5 * (c - c.T))


def random_ci(n, seed, scale=1.0) -> CiGenerator:
    """Seeded generator with symmetric b and c."""
    if n < 1:
        raise ValidationError("need n >= 1")
    rng = np.random.default_rng(seed)
    b = rng.uniform(-scale, scale, size=(n, n))
    c = rng.uniform(-scale, scale, size=(n, n))
    return CiGenerator(0.5 * (b + b.T), 0.5 * (c + c.T))


def instance_dict(gen, seed=None) -> dict:
    """JSON-ready description of a generator."""
    if isinstance(gen, BdiGenerator):
        out = {
            "type": "bdi",
            "n": gen.n,
            "r": gen.r,
            "b": gen.b.tolist(),
            "a": gen.a.tolist(),
            "c": gen.c.tolist(),
        }
    elif isinstance(gen, CiGenerator):
        out = {"type": "ci", "n": gen.n, "b": gen.b.tolist(), "c": gen.c.tolist()}
    else:
        raise ValidationError(f"unsupported generator {type(gen).__name__}")
    if seed is not None:
        out["seed"] = int(seed)
    return out


def generator_from_dict(data) -> BdiGenerator | CiGenerator:
    """Validate an instance dictionary and build the generator."""
    if not isinstance(data, dict):
        raise ValidationError("instance must be a JSON object")
    kind = data.get("type")
    try:
        n = int(data["n"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError("instance needs an integer field 'n'") from exc
    if n < 1:
        raise ValidationError("instance needs n >= 1")
    if kind == "bdi":
        try:
            r = int(data["r"])
            b = np.asarray(data["b"], dtype=float)
            a = np.asarray(data["a"], dtype=float)
            c = np.asarray(data["c"], dtype=float)
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"malformed bdi instance: {exc}") from exc
        if r < 0:
            raise ValidationError("instance needs r >= 0")
        a = a.reshape(n, r) if a.size == n * r else a
        if b.shape != (n, n) or a.shape != (n, r) or c.shape != (n, n):
            raise ValidationError("bdi instance matrices have inconsistent shapes")
        return BdiGenerator(b, a, c)
    if kind == "ci":
        try:
            b = np.asarray(data["b"], dtype=float)
            c = np.asarray(data["c"], dtype=float)
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"malformed ci instance: {exc}") from exc
        if b.shape != (n, n) or c.shape != (n, n):
            raise ValidationError("ci instance matrices have inconsistent shapes")
        return CiGenerator(b, c)
    raise ValidationError("instance field 'type' must be 'bdi' or 'ci'")


def dumps_instance(data) -> str:
    """Canonical serialization: sorted keys, two-space indent, trailing newline."""
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def loads_instance(text) -> dict:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"instance is not valid JSON: {exc}") from exc
    generator_from_dict(data)  # shape and symmetry validation
    return data
