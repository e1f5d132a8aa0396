"""JSON formats for states, factors and run records; CLI spec parsing."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .numerics import as_matrix
from .self_inverse import (
    DEFAULT_FOCK_DIM,
    ProductHamiltonian,
    SelfInverseFactor,
    boson_parity,
    make_factor,
    parity,
    pauli_z,
)
from .states import BipartiteState, canonical_phase, ecs, optimal_input, parity_cat, spin_coherent


class SpecError(ValueError):
    """A command-line spec or input file could not be interpreted."""


def fmt(x: float) -> str:
    """Ten significant digits, the precision of every printed number."""
    return f"{x + 0.0:.10g}"


def _split_complex(values) -> dict:
    a = np.asarray(values, dtype=complex).reshape(-1)
    return {"re": a.real.tolist(), "im": a.imag.tolist()}


def _join_complex(obj: dict, shape: tuple[int, ...]) -> np.ndarray:
    re = np.asarray(obj["re"], dtype=float).reshape(-1)
    im = np.asarray(obj.get("im", np.zeros_like(re)), dtype=float).reshape(-1)
    if re.size != im.size or re.size != math.prod(shape):
        raise SpecError(f"expected {math.prod(shape)} entries, got re={re.size}, im={im.size}")
    return (re + 1j * im).reshape(shape)


def state_to_json(state: BipartiteState) -> dict:
    return {"dA": state.dA, "dB": state.dB, **_split_complex(canonical_phase(state.amplitudes))}


def state_from_json(obj: dict) -> BipartiteState:
    try:
        dA, dB = int(obj["dA"]), int(obj["dB"])
        return BipartiteState.from_vector(_join_complex(obj, (dA * dB,)), dA, dB)
    except (KeyError, TypeError) as exc:
        raise SpecError(f"malformed state object: {exc}") from exc


def factor_to_json(x: SelfInverseFactor) -> dict:
    return {"dim": x.dim, **_split_complex(x.matrix)}


def factor_from_json(obj: dict) -> SelfInverseFactor:
    try:
        d = int(obj["dim"])
        return make_factor(_join_complex(obj, (d, d)))
    except (KeyError, TypeError) as exc:
        raise SpecError(f"malformed factor object: {exc}") from exc


def _load(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise SpecError(f"cannot read {path}: {exc}") from exc


def _kwargs(text: str) -> dict[str, str]:
    out = {}
    for part in filter(None, text.split(",")):
        key, sep, val = part.partition("=")
        if not sep:
            raise SpecError(f"expected key=value, got {part!r}")
        out[key.strip()] = val.strip()
    return out


def parse_factor(spec: str) -> SelfInverseFactor:
    """``pauli-z``, ``parity:j=<j>``, ``boson:D=<n>``, ``identity[:d=<n>]`` or ``file:<path>``."""
    kind, _, rest = spec.partition(":")
    if kind == "file" or spec.endswith(".json"):
        return factor_from_json(_load(rest if kind == "file" else spec))
    args = _kwargs(rest)
    try:
        if kind == "pauli-z":
            return pauli_z()
        if kind == "parity":
            return parity(args.get("j", "1/2"))
        if kind == "boson":
            return boson_parity(int(args.get("D", DEFAULT_FOCK_DIM)))
        if kind == "identity":
            return make_factor(np.eye(int(args.get("d", 2))))
    except SpecError:
        raise
    except ValueError as exc:
        raise SpecError(f"invalid factor {spec!r}: {exc}") from exc
    raise SpecError(f"unknown factor spec {spec!r}")


def parse_hamiltonian(spec: str):
    """``ising``, ``parity:j=<j>`` (H1), ``boson:D=<n>`` (both sides oscillators) or ``file:<path>``.

    Returns a :class:`ProductHamiltonian`, or ``(matrix, dA, dB)`` for a file.
    """
    kind, _, rest = spec.partition(":")
    if kind == "ising":
        return ProductHamiltonian(pauli_z(), pauli_z())
    if kind in ("parity", "boson"):
        x = parse_factor(spec)
        return ProductHamiltonian(x, x)
    if kind == "file":
        obj = _load(rest)
        try:
            dA, dB = int(obj["dA"]), int(obj["dB"])
        except (KeyError, TypeError) as exc:
            raise SpecError(f"malformed Hamiltonian file: {exc}") from exc
        m = as_matrix(_join_complex(obj, (dA * dB, dA * dB)))
        return m, dA, dB
    raise SpecError(f"unknown Hamiltonian spec {spec!r}")


_UNITS = {"i": 1j, "+i": 1j, "-i": -1j}


def _complex(text: str) -> complex:
    text = text.strip()
    if text in _UNITS:
        return _UNITS[text]
    return complex(text.replace("i", "j"))


def parse_state(spec: str, h: ProductHamiltonian | None, x0: float) -> BipartiteState:
    """``optimal[:x=..]``, ``eigen-product``, ``ecs[:eta=..,x=..,phase=..]`` or ``file:<path>``."""
    kind, _, rest = spec.partition(":")
    if kind == "file" or spec.endswith(".json"):
        return state_from_json(_load(rest if kind == "file" else spec))
    if h is None:
        raise SpecError(f"builtin state {spec!r} needs a self-inverse product Hamiltonian")
    args = _kwargs(rest)
    try:
        x = float(args.get("x", x0))
        if kind == "optimal":
            return optimal_input(h.factor_a, h.factor_b, x, _complex(args.get("phase", "-i")))
        if kind == "eigen-product":
            return BipartiteState.product(h.factor_a.plus[:, 0], h.factor_b.plus[:, 0])
        if kind == "ecs":
            eta = _complex(args.get("eta", str(math.pi / 4)))
            phase = _complex(args.get("phase", "+i"))
            dA, dB = h.dims
            if dA == dB:
                return ecs(f"{dA - 1}/2", eta, x, phase)
            a = spin_coherent(f"{dA - 1}/2", eta)
            b = spin_coherent(f"{dB - 1}/2", eta)
            return parity_cat(a, b, x, phase)[0]
    except ValueError as exc:
        raise SpecError(f"invalid state {spec!r}: {exc}") from exc
    raise SpecError(f"unknown state spec {spec!r}")


def _rounded(obj):
    if isinstance(obj, float):
        return float(fmt(obj)) if math.isfinite(obj) else str(obj)
    if isinstance(obj, dict):
        return {k: _rounded(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_rounded(v) for v in obj]
    return obj


@dataclass
class Check:
    name: str
    value: float
    reference: float | None
    tolerance: float | None
    passed: bool | None


@dataclass
class RunRecord:
    command: str
    parameters: dict
    outputs: dict = field(default_factory=dict)
    checks: list[Check] = field(default_factory=list)
    curve: str | None = None
    notes: list[str] = field(default_factory=list)
    timestamp: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat(timespec="seconds"))

    def check(self, name: str, value: float, reference: float | None = None, tolerance: float | None = None) -> bool:
        ok = None if reference is None else abs(value - reference) <= tolerance
        self.checks.append(Check(name, value, reference, tolerance, ok))
        self.outputs[name] = value
        return ok is not False

    @property
    def passed(self) -> bool:
        return all(c.passed is not False for c in self.checks)

    def to_json(self) -> str:
        return json.dumps(_rounded(asdict(self)), indent=2, default=str)

    def to_text(self) -> str:
        lines = [f"# {self.command}"]
        for key, val in self.outputs.items():
            chk = next((c for c in self.checks if c.name == key and c.reference is not None), None)
            shown = fmt(val) if isinstance(val, float) else str(val)
            if chk is None:
                lines.append(f"{key:<28} {shown}")
            else:
                verdict = "PASS" if chk.passed else "FAIL"
                lines.append(
                    f"{key:<28} {shown:<18} ref {fmt(chk.reference)} tol {chk.tolerance:g}  {verdict}"
                )
        lines.extend(f"note: {n}" for n in self.notes)
        if self.curve:
            lines.append(f"curve written to {self.curve}")
        return "\n".join(lines)
