"""Flat key-value configuration files for experiments and domains.

The format is one `key = value` pair per line, `#` comments, with exactly
one level of grouping: a value may be a scalar, a tuple `(a, b, ...)`, or a
brace group `{k1 = v1, k2 = v2}`. Repeated keys accumulate, which is how a
domain file lists several halfspaces or balls.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import domains as dom
from .domains import ConvexDomain

BUILTIN_DOMAINS = {
    "half-line": dom.half_line,
    "halfplane": dom.halfplane,
    "orthant2": lambda: dom.orthant(2),
    "orthant3": lambda: dom.orthant(3),
    "unit-disc": dom.unit_disc,
    "strip": dom.strip,
}


def _split_top_level(text: str, sep: str = ",") -> list[str]:
    parts = []
    depth = 0
    current = []
    for ch in text:
        if ch in "({":
            depth += 1
        elif ch in ")}":
            depth -= 1
            if depth < 0:
                raise ValueError(f"unbalanced brackets in {text!r}")
        if ch == sep and depth == 0:
            parts.append("".join(current))
            current = []
        else:
            current.append(ch)
    parts.append("".join(current))
    return parts


def _parse_scalar(text: str):
    text = text.strip()
    low = text.lower()
    if low in ("true", "yes", "on"):
        return True
    if low in ("false", "no", "off"):
        return False
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        pass
    return text


def parse_value(text: str):
    text = text.strip()
    if text.startswith("{"):
        if not text.endswith("}"):
            raise ValueError(f"unterminated group in {text!r}")
        group = {}
        inner = text[1:-1].strip()
        if inner:
            for part in _split_top_level(inner):
                if "=" not in part:
                    raise ValueError(f"expected key = value inside group, got {part!r}")
                k, v = part.split("=", 1)
                group[k.strip()] = parse_value(v)
        return group
    if text.startswith("("):
        if not text.endswith(")"):
            raise ValueError(f"unterminated tuple in {text!r}")
        inner = text[1:-1].strip()
        if not inner:
            return ()
        return tuple(float(p) for p in _split_top_level(inner))
    return _parse_scalar(text)


def parse_kv_text(text: str) -> dict[str, list]:
    """Parse a flat document into key -> list of values (repeats preserved)."""
    out: dict[str, list] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key = value, got {raw!r}")
        key, value = line.split("=", 1)
        key = key.strip()
        if not key:
            raise ValueError(f"line {lineno}: empty key")
        out.setdefault(key, []).append(parse_value(value))
    return out


def parse_kv_file(path) -> dict[str, list]:
    return parse_kv_text(Path(path).read_text())


def domain_from_mapping(doc: dict[str, list]) -> ConvexDomain:
    """Build a domain from a parsed domain document."""
    if "dimension" not in doc:
        raise ValueError("domain file needs a dimension")
    d = int(doc["dimension"][-1])
    normals, offsets, centers, radii = [], [], [], []
    for group in doc.get("halfspace", []):
        if not isinstance(group, dict) or set(group) != {"normal", "offset"}:
            raise ValueError(f"halfspace group needs normal and offset, got {group!r}")
        normals.append(np.atleast_1d(np.asarray(group["normal"], dtype=np.float64)))
        offsets.append(float(group["offset"]))
    for group in doc.get("ball", []):
        if not isinstance(group, dict) or set(group) != {"center", "radius"}:
            raise ValueError(f"ball group needs center and radius, got {group!r}")
        centers.append(np.atleast_1d(np.asarray(group["center"], dtype=np.float64)))
        radii.append(float(group["radius"]))
    if "interior_point" not in doc:
        raise ValueError("domain file needs an interior_point witness")
    witness = np.atleast_1d(np.asarray(doc["interior_point"][-1], dtype=np.float64))
    return ConvexDomain(
        dimension=d,
        normals=np.array(normals).reshape(-1, d),
        offsets=np.array(offsets, dtype=np.float64),
        centers=np.array(centers).reshape(-1, d),
        radii=np.array(radii, dtype=np.float64),
        interior_point=witness,
    )


def load_domain_file(path) -> ConvexDomain:
    return domain_from_mapping(parse_kv_file(path))


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment run: name, seed, sizes, domain, and output location."""

    experiment: str
    seed: int = 0
    n_paths: int = 1000
    horizon: float = 1.0
    n_steps: int = 1000
    domain: str | None = None
    domain_file: str | None = None
    coefficients: str | None = None
    out_dir: str = "results"
    emit_paths: bool = False
    alpha: float = 0.01
    tolerances: dict = field(default_factory=dict)
    options: dict = field(default_factory=dict)

    _KNOWN = {
        "experiment": ("experiment", str),
        "seed": ("seed", int),
        "n_paths": ("n_paths", int),
        "T": ("horizon", float),
        "N": ("n_steps", int),
        "domain": ("domain", str),
        "domain_file": ("domain_file", str),
        "coefficients": ("coefficients", str),
        "out": ("out_dir", str),
        "emit_paths": ("emit_paths", bool),
        "alpha": ("alpha", float),
    }

    @classmethod
    def from_mapping(cls, doc: dict, defaults: dict | None = None) -> "ExperimentConfig":
        """Build from a parsed document (last occurrence wins for scalars)."""
        kwargs: dict = dict(defaults or {})
        tolerances = dict(kwargs.pop("tolerances", {}))
        options = dict(kwargs.pop("options", {}))
        for key, values in doc.items():
            value = values[-1] if isinstance(values, list) else values
            if key in cls._KNOWN:
                attr, conv = cls._KNOWN[key]
                kwargs[attr] = conv(value)
            elif key.startswith("tol_"):
                tolerances[key[4:]] = float(value)
            else:
                options[key] = value
        if "experiment" not in kwargs:
            raise ValueError("config must name an experiment")
        return cls(tolerances=tolerances, options=options, **kwargs)

    @classmethod
    def from_file(cls, path, defaults: dict | None = None) -> "ExperimentConfig":
        return cls.from_mapping(parse_kv_file(path), defaults=defaults)

    def resolve_domain(self) -> ConvexDomain | None:
        """The configured domain, or None when the experiment supplies its own."""
        if self.domain_file is not None:
            if not Path(self.domain_file).is_file():
                raise ValueError(f"domain file not found: {self.domain_file}")
            return load_domain_file(self.domain_file)
        if self.domain is not None:
            if self.domain not in BUILTIN_DOMAINS:
                raise ValueError(
                    f"unknown domain {self.domain!r}; builtins: {sorted(BUILTIN_DOMAINS)}"
                )
            return BUILTIN_DOMAINS[self.domain]()
        return None

    def tolerance(self, name: str, default: float) -> float:
        return float(self.tolerances.get(name, default))

    def option(self, name: str, default):
        return self.options.get(name, default)

    def replace(self, **changes) -> "ExperimentConfig":
        from dataclasses import replace as dc_replace

        return dc_replace(self, **changes)

    def as_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "seed": self.seed,
            "n_paths": self.n_paths,
            "T": self.horizon,
            "N": self.n_steps,
            "domain": self.domain,
            "domain_file": self.domain_file,
            "coefficients": self.coefficients,
            "out": self.out_dir,
            "emit_paths": self.emit_paths,
            "alpha": self.alpha,
            "tolerances": dict(sorted(self.tolerances.items())),
            "options": {k: _plain(v) for k, v in sorted(self.options.items())},
        }


def _plain(value):
    if isinstance(value, tuple):
        return list(value)
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    return value
