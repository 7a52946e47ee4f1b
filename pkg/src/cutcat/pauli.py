"""Binary-symplectic Pauli arithmetic and CSS code handling.

Errors are stored as packed bit masks with qubit id = bit index, so that
composing two errors is a single integer XOR and support tests are
bitwise AND.  All types are immutable and safe to share across workers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator


def popcount(mask: int) -> int:
    return mask.bit_count()


def bits_of(mask: int) -> Iterator[int]:
    """Yield the set bit positions of ``mask`` in ascending order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def mask_of(indices: Iterable[int]) -> int:
    out = 0
    for i in indices:
        out |= 1 << i
    return out


def parity(mask: int) -> int:
    return mask.bit_count() & 1


class CodeFormatError(ValueError):
    """Raised when a CSS code file is malformed or fails validation."""


@dataclass(frozen=True)
class PauliFrame:
    """An n-qubit Pauli error, split into X and Z bit masks.

    A Y on qubit q is represented as bit q set in both masks.  Frames
    compose by XOR per component, so compose(a, a) is the identity.
    """

    n: int
    x: int = 0
    z: int = 0

    def __post_init__(self) -> None:
        if self.x >> self.n or self.z >> self.n:
            raise ValueError("mask exceeds qubit count")

    @classmethod
    def identity(cls, n: int) -> "PauliFrame":
        return cls(n)

    @classmethod
    def single(cls, n: int, qubit: int, pauli: str) -> "PauliFrame":
        if not 0 <= qubit < n:
            raise ValueError(f"qubit {qubit} out of range")
        bit = 1 << qubit
        if pauli == "X":
            return cls(n, bit, 0)
        if pauli == "Z":
            return cls(n, 0, bit)
        if pauli == "Y":
            return cls(n, bit, bit)
        raise ValueError(f"unknown Pauli {pauli!r}")

    def compose(self, other: "PauliFrame") -> "PauliFrame":
        if other.n != self.n:
            raise ValueError("dimension mismatch")
        return PauliFrame(self.n, self.x ^ other.x, self.z ^ other.z)

    @property
    def weight(self) -> int:
        return popcount(self.x | self.z)

    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0


@dataclass(frozen=True)
class Syndrome:
    """One bit per stabilizer generator, packed into an int."""

    bits: int
    n_bits: int

    def __post_init__(self) -> None:
        if self.bits >> self.n_bits:
            raise ValueError("syndrome bits exceed generator count")

    def __xor__(self, other: "Syndrome") -> "Syndrome":
        if other.n_bits != self.n_bits:
            raise ValueError("dimension mismatch")
        return Syndrome(self.bits ^ other.bits, self.n_bits)

    def as_tuple(self) -> tuple[int, ...]:
        return tuple((self.bits >> i) & 1 for i in range(self.n_bits))


def gf2_rank(rows: Iterable[int]) -> int:
    """Rank of a set of F2 row vectors given as bit masks."""
    pivots: list[int] = []
    for row in rows:
        for p in pivots:
            row = min(row, row ^ p)
        if row:
            pivots.append(row)
    return len(pivots)


@dataclass(frozen=True)
class CssCode:
    """A CSS stabilizer code: X-type and Z-type generator supports.

    ``hx`` rows anticommute with Z errors, ``hz`` rows with X errors.
    ``lx``/``lz`` optionally hold logical operator supports, needed only
    for logical-failure detection in block simulations.
    """

    n: int
    k: int
    d: int
    hx: tuple[int, ...]
    hz: tuple[int, ...]
    lx: tuple[int, ...] = ()
    lz: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.n <= 0 or self.k < 0 or self.d < 1:
            raise CodeFormatError("bad code parameters")
        for row in (*self.hx, *self.hz, *self.lx, *self.lz):
            if row >> self.n:
                raise CodeFormatError("row length exceeds n")
        for i, rx in enumerate(self.hx):
            for j, rz in enumerate(self.hz):
                if parity(rx & rz):
                    raise CodeFormatError(
                        f"X row {i} anticommutes with Z row {j}"
                    )
        if len(self.hx) + len(self.hz) != self.n - self.k:
            raise CodeFormatError(
                f"expected n-k = {self.n - self.k} generators, "
                f"got {len(self.hx)}+{len(self.hz)}"
            )
        if gf2_rank(self.hx) + gf2_rank(self.hz) != self.n - self.k:
            raise CodeFormatError("generator rows are not independent")

    @property
    def gen_weights(self) -> tuple[int, ...]:
        """Support sizes of all generators, X rows first."""
        return tuple(popcount(r) for r in (*self.hx, *self.hz))

    @property
    def t(self) -> int:
        return (self.d - 1) // 2


def code_syndrome(code: CssCode, err: PauliFrame) -> Syndrome:
    """Syndrome of ``err``: X-generator bits first, then Z-generator bits.

    An X-type generator fires on the Z component of the error and vice
    versa; errors equal to a generator support are invisible.
    """
    if err.n != code.n:
        raise ValueError("dimension mismatch")
    bits = 0
    pos = 0
    for row in code.hx:
        bits |= parity(row & err.z) << pos
        pos += 1
    for row in code.hz:
        bits |= parity(row & err.x) << pos
        pos += 1
    return Syndrome(bits, pos)


def residual_weight_mod_generator(err_on_support: int, gamma: int) -> int:
    """Coset weight of an error restricted to a measured generator's support.

    The measured generator acts as the all-ones flip on its own support,
    so the error and its complement are equivalent; the metric is the
    smaller of the two weights.
    """
    w = popcount(err_on_support & ((1 << gamma) - 1))
    return min(w, gamma - w)


def _parse_binary_row(token: str, n: int, lineno: int) -> int:
    if len(token) != n or set(token) - {"0", "1"}:
        raise CodeFormatError(f"line {lineno}: expected {n} binary digits")
    # leftmost character is qubit 0
    mask = 0
    for i, ch in enumerate(token):
        if ch == "1":
            mask |= 1 << i
    return mask


def _format_binary_row(mask: int, n: int) -> str:
    return "".join("1" if (mask >> i) & 1 else "0" for i in range(n))


def parse_css_code(text: str) -> CssCode:
    """Parse a CSS code from its text form.

    Format: first line ``n k d``; then ``X r`` followed by r binary rows
    of length n; then ``Z s`` and s rows; optionally ``LX u`` / ``LZ v``
    blocks for logical operator supports.  ``#`` starts a comment line.
    """
    lines: list[tuple[int, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        lines.append((lineno, stripped))
    if not lines:
        raise CodeFormatError("empty code file")

    cursor = 0

    def next_line() -> tuple[int, str]:
        nonlocal cursor
        if cursor >= len(lines):
            raise CodeFormatError("unexpected end of file")
        item = lines[cursor]
        cursor += 1
        return item

    lineno, header = next_line()
    parts = header.split()
    if len(parts) != 3:
        raise CodeFormatError(f"line {lineno}: expected 'n k d'")
    try:
        n, k, d = (int(p) for p in parts)
    except ValueError as exc:
        raise CodeFormatError(f"line {lineno}: non-integer header") from exc

    blocks: dict[str, list[int]] = {}
    expected = ["X", "Z"]
    optional = ["LX", "LZ"]
    while cursor < len(lines):
        lineno, head = next_line()
        parts = head.split()
        if len(parts) != 2 or parts[0] not in expected + optional:
            raise CodeFormatError(f"line {lineno}: expected block header")
        name = parts[0]
        if name in blocks:
            raise CodeFormatError(f"line {lineno}: duplicate {name} block")
        try:
            count = int(parts[1])
        except ValueError as exc:
            raise CodeFormatError(f"line {lineno}: bad row count") from exc
        rows = []
        for _ in range(count):
            row_lineno, row = next_line()
            rows.append(_parse_binary_row(row, n, row_lineno))
        blocks[name] = rows

    if "X" not in blocks or "Z" not in blocks:
        raise CodeFormatError("missing X or Z block")
    return CssCode(
        n=n,
        k=k,
        d=d,
        hx=tuple(blocks["X"]),
        hz=tuple(blocks["Z"]),
        lx=tuple(blocks.get("LX", ())),
        lz=tuple(blocks.get("LZ", ())),
    )


def serialize_css_code(code: CssCode) -> str:
    """Inverse of :func:`parse_css_code`; round-trips exactly."""
    out = [f"{code.n} {code.k} {code.d}"]
    for name, rows in (("X", code.hx), ("Z", code.hz),
                       ("LX", code.lx), ("LZ", code.lz)):
        if name in ("X", "Z") or rows:
            out.append(f"{name} {len(rows)}")
            out.extend(_format_binary_row(r, code.n) for r in rows)
    return "\n".join(out) + "\n"


STEANE_TEXT = """\
# [[7,1,3]] self-dual CSS code
7 1 3
X 3
0001111
0110011
1010101
Z 3
0001111
0110011
1010101
LX 1
1110000
LZ 1
1110000
"""


def steane_code() -> CssCode:
    return parse_css_code(STEANE_TEXT)
