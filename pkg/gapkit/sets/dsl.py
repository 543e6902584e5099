"""Set DSL used by the CLI and config files.

Examples:
    lattice:alpha=1
    lattice-minus:alpha=1,residues=0 mod 3
    lattice-minus:alpha=0.5,thin=0.3,seed=0
    explicit:0,0.3,1.0
    file:points.txt
    perturb:base=[lattice:alpha=1],delta=0.2,mode=snap,alpha=0.05
    modify:base=[lattice:alpha=1],remove=0;1;2
    complement:base=[lattice-minus:alpha=1,residues=0 mod 3],alpha=1

Nested specs go in square brackets; for ``perturb`` an unbracketed base runs
up to the first ``,delta=`` / ``,mode=`` / ``,alpha=`` / ``,seed=``.
"""

import logging
import math
from pathlib import Path
from typing import Dict, List, Tuple, Union

from gapkit.errors import SetSpecError
from gapkit.sets.discrete_set import DiscreteSet
from gapkit.sets.generators import (
    ComplementGenerator,
    ExplicitGenerator,
    Generator,
    LatticeGenerator,
    LatticeMinusGenerator,
    ModifiedGenerator,
    PerturbedGenerator,
)

logger = logging.getLogger(__name__)

_KINDS = ("lattice", "lattice-minus", "explicit", "file", "perturb", "modify", "complement")
_KEYS = {
    "lattice": {"alpha"},
    "lattice-minus": {"alpha", "residues", "indices", "thin", "seed", "complement"},
    "perturb": {"base", "delta", "mode", "alpha", "seed"},
    "modify": {"base", "add", "remove"},
    "complement": {"base", "alpha"},
}
_MODES = {"snap": "snap", "snap-random": "snap_random", "positive": "positive", "symmetric": "symmetric"}


def read_point_file(path: Union[str, Path]) -> List[float]:
    """One decimal real per line, ``#`` comments allowed."""
    values = []
    try:
        with open(path, "r", encoding="utf-8") as f:
            lines = f.readlines()
    except OSError as e:
        raise SetSpecError(f"Cannot read point file {path}: {e}", 0, "a readable file") from e
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            values.append(float(line))
        except ValueError as e:
            raise SetSpecError(f"{path}:{lineno}: malformed number {line!r}", 0, "a decimal real") from e
    return sorted(values)


def _number(text: str, pos: int, what: str = "a number") -> float:
    try:
        value = float(text)
    except ValueError:
        raise SetSpecError(f"Malformed number {text!r}", pos, what) from None
    if not math.isfinite(value):
        raise SetSpecError(f"Non-finite number {text!r}", pos, what)
    return value


def _integer(text: str, pos: int) -> int:
    try:
        return int(text.strip())
    except ValueError:
        raise SetSpecError(f"Malformed integer {text!r}", pos, "an integer") from None


def _int_list(text: str, pos: int) -> Tuple[int, ...]:
    return tuple(_integer(p, pos) for p in text.split(";") if p.strip())


def _float_list(text: str, pos: int) -> Tuple[float, ...]:
    return tuple(_number(p.strip(), pos) for p in text.split(";") if p.strip())


def _split_items(body: str, offset: int) -> List[Tuple[str, int]]:
    """Split at commas outside square brackets, keeping absolute positions."""
    items, depth, start = [], 0, 0
    for i, ch in enumerate(body):
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
            if depth < 0:
                raise SetSpecError("Unbalanced ']'", offset + i, "'['")
        elif ch == "," and depth == 0:
            items.append((body[start:i], offset + start))
            start = i + 1
    if depth != 0:
        raise SetSpecError("Unbalanced '['", offset + len(body), "']'")
    if body[start:] or items:
        items.append((body[start:], offset + start))
    return items


def _bracket_perturb_base(body: str) -> str:
    if not body.startswith("base=") or body.startswith("base=["):
        return body
    ends = [body.find(f",{key}=") for key in ("delta", "mode", "alpha", "seed")]
    ends = [e for e in ends if e > 0]
    end = min(ends) if ends else len(body)
    return f"base=[{body[5:end]}]{body[end:]}"


def _key_values(kind: str, body: str, offset: int) -> Dict[str, Tuple[str, int]]:
    values: Dict[str, Tuple[str, int]] = {}
    for item, pos in _split_items(body, offset):
        if "=" not in item:
            raise SetSpecError(f"Expected key=value, got {item!r}", pos, "key=value")
        key, value = item.split("=", 1)
        key = key.strip()
        if key not in _KEYS[kind]:
            raise SetSpecError(f"Unknown key {key!r} for {kind}", pos, " or ".join(sorted(_KEYS[kind])))
        values[key] = (value.strip(), pos + len(key) + 1)
    return values


def _nested(value: str, pos: int) -> Generator:
    if not (value.startswith("[") and value.endswith("]")):
        raise SetSpecError(f"Nested set spec must be bracketed, got {value!r}", pos, "'[spec]'")
    return _parse(value[1:-1], pos + 1)


def _positive_alpha(values: Dict[str, Tuple[str, int]], required: bool = True) -> float:
    if "alpha" not in values:
        if required:
            raise SetSpecError("Missing alpha", 0, "alpha=<positive number>")
        return None
    text, pos = values["alpha"]
    alpha = _number(text, pos)
    if alpha <= 0:
        raise SetSpecError(f"alpha must be positive, got {alpha}", pos, "a positive number")
    return alpha


def _parse_residues(text: str, pos: int) -> Tuple[int, Tuple[int, ...]]:
    parts = text.split("mod")
    if len(parts) != 2:
        raise SetSpecError(f"Invalid residue spec {text!r}", pos, "'r1;r2 mod m'")
    modulus = _integer(parts[1], pos)
    if modulus < 1:
        raise SetSpecError(f"Residue modulus must be at least 1, got {modulus}", pos, "a positive modulus")
    residues = _int_list(parts[0], pos)
    if not residues or any(r < 0 or r >= modulus for r in residues):
        raise SetSpecError(f"Residues {residues} must lie in [0, {modulus})", pos, "residues below the modulus")
    return modulus, residues


def _parse(text: str, offset: int) -> Generator:
    if ":" not in text:
        raise SetSpecError(f"Missing ':' in set spec {text!r}", offset + len(text), "kind:body")
    kind, body = text.split(":", 1)
    kind = kind.strip()
    body_offset = offset + len(kind) + 1
    if kind not in _KINDS:
        raise SetSpecError(f"Unknown set kind {kind!r}", offset, " | ".join(_KINDS))

    if kind == "explicit":
        values, finite, radius = [], True, None
        for item, pos in _split_items(body, body_offset):
            item = item.strip()
            if item.startswith("finite="):
                finite = item.split("=", 1)[1].strip().lower() == "true"
            elif item.startswith("radius="):
                radius = _number(item.split("=", 1)[1], pos)
            elif item:
                values.append(_number(item, pos))
        return ExplicitGenerator(values=tuple(sorted(values)), finite=finite, radius=None if finite else radius)

    if kind == "file":
        path = body.strip()
        if not path:
            raise SetSpecError("Missing file path", body_offset, "file:PATH")
        values = read_point_file(path)
        radius = max((abs(v) for v in values), default=0.0)
        return ExplicitGenerator(values=tuple(values), finite=False, radius=radius)

    if kind == "perturb":
        body = _bracket_perturb_base(body)
    values = _key_values(kind, body, body_offset)

    if kind == "lattice":
        return LatticeGenerator(alpha=_positive_alpha(values))

    if kind == "lattice-minus":
        alpha = _positive_alpha(values)
        modulus, residues = 1, ()
        if "residues" in values:
            modulus, residues = _parse_residues(*values["residues"])
        indices = _int_list(*values["indices"]) if "indices" in values else ()
        thin = _number(*values["thin"]) if "thin" in values else 0.0
        if not 0.0 <= thin < 1.0:
            raise SetSpecError(f"thin must lie in [0, 1), got {thin}", values["thin"][1], "a fraction")
        seed = _integer(*values["seed"]) if "seed" in values else 0
        complement = values.get("complement", ("false", 0))[0].lower() == "true"
        return LatticeMinusGenerator(
            alpha=alpha, modulus=modulus, residues=residues, indices=indices, thin=thin, seed=seed, complement=complement
        )

    if "base" not in values:
        raise SetSpecError(f"Missing base for {kind}", body_offset, "base=[spec]")
    base = _nested(*values["base"])

    if kind == "perturb":
        if "delta" not in values:
            raise SetSpecError("Missing delta", body_offset, "delta=<number>")
        delta = _number(*values["delta"])
        if delta < 0:
            raise SetSpecError(f"delta must be nonnegative, got {delta}", values["delta"][1], "delta >= 0")
        mode_text, mode_pos = values.get("mode", ("snap", body_offset))
        if mode_text not in _MODES:
            raise SetSpecError(f"Unknown mode {mode_text!r}", mode_pos, " | ".join(_MODES))
        seed = _integer(*values["seed"]) if "seed" in values else 0
        return PerturbedGenerator(
            base=base, delta=delta, mode=_MODES[mode_text], alpha=_positive_alpha(values, required=False), seed=seed
        )

    if kind == "modify":
        added = _float_list(*values["add"]) if "add" in values else ()
        removed = _float_list(*values["remove"]) if "remove" in values else ()
        return ModifiedGenerator(base=base, added=added, removed=removed)

    return ComplementGenerator(base=base, alpha=_positive_alpha(values))


def parse_set_dsl(text: str) -> Generator:
    """Parse a set spec into its generator law.

    Raises:
        SetSpecError: With the failing position and the expected token
    """
    if text is None or not text.strip():
        raise SetSpecError("Empty set spec", 0, "kind:body")
    return _parse(text.strip(), 0)


def load_set(text: str, radius: float = 1000.0) -> DiscreteSet:
    """Parse a spec and truncate it to [-radius, radius] (finite sets are kept whole)."""
    generator = parse_set_dsl(text)
    if generator.is_finite():
        pts = generator.points(math.inf)
        cover = max([abs(p) for p in pts], default=0.0)
        return DiscreteSet(pts, generator, max(radius, cover) or 1.0)
    return DiscreteSet.from_generator(generator, min(radius, generator.max_radius()))


def _num(value: float) -> str:
    return repr(float(value))


def format_set_spec(generator: Generator) -> str:
    """Inverse of ``parse_set_dsl``."""
    if isinstance(generator, ExplicitGenerator):
        items = [_num(v) for v in generator.values]
        if not generator.finite:
            items.append("finite=false")
            if generator.radius is not None:
                items.append(f"radius={_num(generator.radius)}")
        return "explicit:" + ",".join(items)
    if isinstance(generator, LatticeGenerator):
        return f"lattice:alpha={_num(generator.alpha)}"
    if isinstance(generator, LatticeMinusGenerator):
        items = [f"alpha={_num(generator.alpha)}"]
        if generator.residues:
            items.append(f"residues={';'.join(str(r) for r in generator.residues)} mod {generator.modulus}")
        if generator.indices:
            items.append(f"indices={';'.join(str(i) for i in generator.indices)}")
        if generator.thin:
            items.append(f"thin={_num(generator.thin)}")
        if generator.seed:
            items.append(f"seed={generator.seed}")
        if generator.complement:
            items.append("complement=true")
        return "lattice-minus:" + ",".join(items)
    if isinstance(generator, PerturbedGenerator):
        mode = {v: k for k, v in _MODES.items()}[generator.mode]
        items = [f"base=[{format_set_spec(generator.base)}]", f"delta={_num(generator.delta)}", f"mode={mode}"]
        if generator.alpha is not None:
            items.append(f"alpha={_num(generator.alpha)}")
        if generator.seed:
            items.append(f"seed={generator.seed}")
        return "perturb:" + ",".join(items)
    if isinstance(generator, ModifiedGenerator):
        items = [f"base=[{format_set_spec(generator.base)}]"]
        if generator.added:
            items.append("add=" + ";".join(_num(v) for v in generator.added))
        if generator.removed:
            items.append("remove=" + ";".join(_num(v) for v in generator.removed))
        return "modify:" + ",".join(items)
    return f"complement:base=[{format_set_spec(generator.base)}],alpha={_num(generator.alpha)}"
