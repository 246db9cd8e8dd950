"""Read and write model configurations as INI files.

See ``docs/config.md`` for the schema.  Example::

    [system]
    n_qubits = 2

    [hamiltonian]
    model = ising
    g = 2.5
    pairs = all

    [noise]
    kind = dephasing
    gamma = 1.0

    [reset]
    r = 5.0
    state = +
"""

from __future__ import annotations

import configparser
import io
from pathlib import Path

import numpy as np

from .models import (
    DephasingParams,
    HamiltonianSpec,
    ModelConfig,
    NoiseParams,
    ResetSpec,
    ValidationError,
    heisenberg,
    ising,
    mixed_reset_state,
    reset_state,
    validate,
    xx_coupling,
    xyz_field,
)

HAMILTONIANS = ("ising", "heisenberg", "xyz_field", "xx", "pauli")


def _get(cp: configparser.ConfigParser, section: str, key: str, conv=str, default=None):
    if not cp.has_option(section, key):
        if default is None:
            raise ValidationError(f"{section}.{key}", "missing")
        return default
    raw = cp.get(section, key)
    try:
        return conv(raw)
    except ValueError as exc:
        raise ValidationError(f"{section}.{key}", f"cannot parse {raw!r}: {exc}") from exc


def _pairs(text: str):
    text = text.strip()
    if text == "all":
        return None
    pairs = []
    for item in text.split(","):
        i, j = item.strip().split("-")
        pairs.append((int(i), int(j)))
    return pairs


def _terms(text: str) -> tuple[tuple[float, str], ...]:
    terms = []
    for item in text.split(";"):
        if item.strip():
            coef, word = item.split()
            terms.append((float(coef), word.upper()))
    return tuple(terms)


def _matrix(text: str) -> np.ndarray:
    vals = [complex(v) for v in text.split()]
    if len(vals) != 4:
        raise ValueError("expected 4 entries a00 a01 a10 a11")
    return np.array(vals, dtype=complex).reshape(2, 2)


def _hamiltonian(cp, n: int) -> HamiltonianSpec:
    model = _get(cp, "hamiltonian", "model")
    g = _get(cp, "hamiltonian", "g", float)
    if model not in HAMILTONIANS:
        raise ValidationError("hamiltonian.model", f"unknown model {model!r}; choose from {HAMILTONIANS}")
    if model == "ising":
        try:
            return ising(g, _pairs(cp.get("hamiltonian", "pairs", fallback="all")), n)
        except ValueError as exc:
            raise ValidationError("hamiltonian.pairs", str(exc)) from exc
    if model == "pauli":
        return HamiltonianSpec(n, _get(cp, "hamiltonian", "terms", _terms), g)
    if n != 2:
        raise ValidationError("hamiltonian.model", f"{model} is a two-qubit model, system has {n} qubits")
    return {"heisenberg": heisenberg, "xyz_field": xyz_field, "xx": xx_coupling}[model](g)


def _noise(cp):
    kind = _get(cp, "noise", "kind", str, "dephasing")
    if kind == "dephasing":
        return DephasingParams(_get(cp, "noise", "gamma", float))
    if kind == "general":
        return NoiseParams(
            B=_get(cp, "noise", "B", float), C=_get(cp, "noise", "C", float), s=_get(cp, "noise", "s", float)
        )
    raise ValidationError("noise.kind", f"unknown noise kind {kind!r}; choose dephasing or general")


def _single_state(cp, key_state: str, key_fid: str):
    name = _get(cp, "reset", key_state, str, "+")
    fid = _get(cp, "reset", key_fid, float, 1.0)
    if name not in ("0", "1", "+", "-"):
        raise ValidationError(f"reset.{key_state}", f"unknown state {name!r}; use 0, 1, + or -")
    if not 0 <= fid <= 1:
        raise ValidationError(f"reset.{key_fid}", f"must lie in [0, 1], got {fid}")
    return name if fid == 1 else mixed_reset_state(name, fid)


def _reset(cp) -> ResetSpec:
    r = _get(cp, "reset", "r", float)
    if cp.has_option("reset", "matrix"):
        chi = _get(cp, "reset", "matrix", _matrix)
    else:
        chi = _single_state(cp, "state", "fidelity")
    per_site = None
    if cp.has_option("reset", "per_site"):
        per_site = tuple(s.strip() for s in cp.get("reset", "per_site").split(","))
        for s in per_site:
            try:
                reset_state(s)
            except ValueError as exc:
                raise ValidationError("reset.per_site", str(exc)) from exc
    return ResetSpec(r, chi, per_site)


def parse_config(text: str) -> ModelConfig:
    cp = configparser.ConfigParser()
    cp.optionxform = str  # keep B and C case-sensitive
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ValidationError("config", str(exc)) from exc
    for section in ("system", "hamiltonian", "noise", "reset"):
        if not cp.has_section(section):
            raise ValidationError(section, "section missing")
    n = _get(cp, "system", "n_qubits", int)
    config = ModelConfig(n, _hamiltonian(cp, n), _noise(cp), _reset(cp))
    return validate(config)


def load_config(path) -> ModelConfig:
    return parse_config(Path(path).read_text())


def _fmt_matrix(m: np.ndarray) -> str:
    return " ".join(repr(complex(v)) for v in np.asarray(m).ravel())


def dump_config(config: ModelConfig) -> str:
    """Serialize ``config``; Hamiltonians are written as explicit Pauli terms."""
    cp = configparser.ConfigParser()
    cp.optionxform = str
    h = config.hamiltonian
    cp["system"] = {"n_qubits": str(config.n_qubits)}
    cp["hamiltonian"] = {
        "model": "pauli",
        "g": repr(float(h.g)),
        "terms": "; ".join(f"{coef!r} {word}" for coef, word in h.terms),
    }
    if isinstance(config.noise, DephasingParams):
        cp["noise"] = {"kind": "dephasing", "gamma": repr(float(config.noise.gamma))}
    else:
        n = config.noise
        cp["noise"] = {"kind": "general", "B": repr(float(n.B)), "C": repr(float(n.C)), "s": repr(float(n.s))}
    reset = {"r": repr(float(config.reset.r))}
    if isinstance(config.reset.chi, str):
        reset["state"] = config.reset.chi
    else:
        reset["matrix"] = _fmt_matrix(reset_state(config.reset.chi))
    if config.reset.per_site is not None:
        reset["per_site"] = ", ".join(config.reset.per_site)
    cp["reset"] = reset
    buf = io.StringIO()
    cp.write(buf)
    return buf.getvalue()


def config_summary(config: ModelConfig) -> dict:
    """JSON-friendly echo of a configuration."""
    return {"n_qubits": config.n_qubits, "ini": dump_config(config)}
