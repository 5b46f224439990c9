"""Exact arithmetic in finitely generated Abelian groups Z^r x Z/m_1 x ... x Z/m_k."""

import math
import random
import re
from collections.abc import Iterator
from functools import reduce
from itertools import product

from balanced.errors import GroupSpecError, InfiniteGroupError, ShapeError
from balanced.schemas import GroupElement, GroupSpec, InvolutionSubgroup

SAMPLE_BOUND = 100

_TERM = re.compile(r"\s*Z\s*(?:\^\s*(?P<exp>[+-]?\d+)|/\s*(?P<mod>[+-]?\d+))?\s*")
_SEPARATOR = re.compile(r"x\s*")


def parse_group_spec(text: str) -> GroupSpec:
    """Parse `term ("x" term)*` with terms `Z`, `Z^k`, `Z/m`; `0` denotes the trivial group."""
    if text.strip() == "0":
        return GroupSpec()

    free_rank = 0
    torsion: list[int] = []
    position = 0
    while True:
        match = _TERM.match(text, position)
        if match is None:
            raise GroupSpecError("expected a term Z, Z^k or Z/m", position)
        if match.group("exp") is not None:
            exponent = int(match.group("exp"))
            if exponent < 1:
                raise GroupSpecError(f"exponent {exponent} must be at least 1", match.start("exp"))
            free_rank += exponent
        elif match.group("mod") is not None:
            modulus = int(match.group("mod"))
            if modulus < 2:
                raise GroupSpecError(f"torsion factor Z/{modulus} is below 2", match.start("mod"))
            torsion.append(modulus)
        else:
            free_rank += 1
        position = match.end()
        if position == len(text):
            break
        separator = _SEPARATOR.match(text, position)
        if separator is None:
            raise GroupSpecError(f"unexpected character {text[position]!r}", position)
        position = separator.end()

    return GroupSpec(free_rank=free_rank, torsion=tuple(torsion))


def parse_element(text: str, spec: GroupSpec) -> GroupElement:
    """Read the `2,0,1` text form and reduce torsion slots into canonical range."""
    stripped = text.strip()
    try:
        raw = tuple(int(part) for part in stripped.split(",")) if stripped else ()
    except ValueError as exc:
        raise ShapeError(f"element {text!r} is not a comma-separated integer list.") from exc
    if len(raw) != spec.rank:
        raise ShapeError(f"element {text!r} has {len(raw)} coordinates, group {spec} has {spec.rank}.")
    return reduce_element(raw, spec)


def format_element(element: GroupElement) -> str:
    return ",".join(str(value) for value in element)


def format_group_spec(spec: GroupSpec) -> str:
    """Inverse of `parse_group_spec`: free factors first, then torsion in order; `0` when trivial."""
    return str(spec)


def reduce_element(coords: tuple[int, ...], spec: GroupSpec) -> GroupElement:
    return tuple(value % modulus if modulus else value for value, modulus in zip(coords, spec.moduli))


def _require_shape(spec: GroupSpec, *elements: GroupElement) -> None:
    for element in elements:
        if len(element) != spec.rank:
            raise ShapeError(f"element {element} has {len(element)} coordinates, group {spec} has {spec.rank}.")


def add(a: GroupElement, b: GroupElement, spec: GroupSpec) -> GroupElement:
    _require_shape(spec, a, b)
    return tuple(
        (x + y) % modulus if modulus else x + y for x, y, modulus in zip(a, b, spec.moduli)
    )


def negate(a: GroupElement, spec: GroupSpec) -> GroupElement:
    _require_shape(spec, a)
    return tuple((-x) % modulus if modulus else -x for x, modulus in zip(a, spec.moduli))


def subtract(a: GroupElement, b: GroupElement, spec: GroupSpec) -> GroupElement:
    return add(a, negate(b, spec), spec)


def multiply(a: GroupElement, k: int, spec: GroupSpec) -> GroupElement:
    """The integer multiple k*a (k may be negative)."""
    _require_shape(spec, a)
    return tuple((k * x) % modulus if modulus else k * x for x, modulus in zip(a, spec.moduli))


def total(elements: list[GroupElement], spec: GroupSpec) -> GroupElement:
    return reduce(lambda left, right: add(left, right, spec), elements, spec.zero)


def is_zero(a: GroupElement) -> bool:
    return not any(a)


def order(a: GroupElement, spec: GroupSpec) -> int | float:
    """Order of `a`; `math.inf` when a free coordinate is nonzero."""
    _require_shape(spec, a)
    if any(a[: spec.free_rank]):
        return math.inf
    slot_orders = (
        modulus // math.gcd(modulus, value)
        for value, modulus in zip(a[spec.free_rank :], spec.torsion)
    )
    return math.lcm(1, *slot_orders)


def involution_subgroup(spec: GroupSpec) -> InvolutionSubgroup:
    """A_2 as the kernel of doubling: one Z/2 generator per even torsion factor."""
    embedding: list[GroupElement] = []
    for slot, modulus in enumerate(spec.torsion):
        if modulus % 2:
            continue
        coords = [0] * spec.rank
        coords[spec.free_rank + slot] = modulus // 2
        embedding.append(tuple(coords))
    return InvolutionSubgroup(
        spec=GroupSpec(torsion=(2,) * len(embedding)),
        embedding=tuple(embedding),
    )


def involution_elements(subgroup: InvolutionSubgroup, spec: GroupSpec) -> list[GroupElement]:
    """All 2^q elements of A_2 embedded in A, in lexicographic order of their A_2 coordinates."""
    elements: list[GroupElement] = []
    for bits in product((0, 1), repeat=len(subgroup.embedding)):
        chosen = [generator for bit, generator in zip(bits, subgroup.embedding) if bit]
        elements.append(total(chosen, spec))
    return elements


def is_involution(a: GroupElement, spec: GroupSpec) -> bool:
    return is_zero(add(a, a, spec))


def enumerate_elements(spec: GroupSpec) -> Iterator[GroupElement]:
    if not spec.is_finite:
        raise InfiniteGroupError(f"group {spec} is infinite and cannot be enumerated.")
    return product(*(range(modulus) for modulus in spec.torsion))


def sample_element(spec: GroupSpec, seed: int | random.Random, bound: int = SAMPLE_BOUND) -> GroupElement:
    """Deterministic draw: uniform on torsion slots, uniform on [-bound, bound] for free slots."""
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    return tuple(
        rng.randrange(modulus) if modulus else rng.randint(-bound, bound) for modulus in spec.moduli
    )
