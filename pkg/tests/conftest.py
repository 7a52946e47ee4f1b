import pytest

from cutcat.pauli import STEANE_TEXT, parse_css_code


def rm15_text() -> str:
    """[[15,1,3]] punctured Reed-Muller code.

    Four weight-8 X generators (one per address bit over qubits 1..15),
    Z generators the same four rows plus the six pairwise intersections,
    logical Z of weight three.  The weight-8 rows exercise the
    ring-checked gadget path in block simulation.
    """
    def row_mask(pred):
        mask = 0
        for x in range(1, 16):
            if pred(x):
                mask |= 1 << (x - 1)
        return mask

    def row_str(mask):
        return "".join("1" if (mask >> i) & 1 else "0" for i in range(15))

    xrows = [row_mask(lambda x, i=i: (x >> i) & 1) for i in range(4)]
    zrows = list(xrows)
    for i in range(4):
        for j in range(i + 1, 4):
            zrows.append(row_mask(lambda x, i=i, j=j: ((x >> i) & 1) and ((x >> j) & 1)))
    lines = ["15 1 3", "X 4"]
    lines += [row_str(r) for r in xrows]
    lines.append("Z 10")
    lines += [row_str(r) for r in zrows]
    lines.append("LX 1")
    lines.append(row_str((1 << 15) - 1))
    lines.append("LZ 1")
    lines.append(row_str(0b111))
    return "\n".join(lines) + "\n"


@pytest.fixture(scope="session")
def steane():
    return parse_css_code(STEANE_TEXT)


@pytest.fixture(scope="session")
def rm15():
    return parse_css_code(rm15_text())
