import math

INV_PHI = (math.sqrt(5) - 1) / 2  # 1 / phi


def golden_section(f, a, b, width):
    """Minimize ``f`` on ``[a, b]`` by golden-section search.

    Shrinks the bracket until it is narrower than ``width`` and returns the
    best ``(x, f(x))`` evaluated along the way. No unimodality check is made;
    for a multimodal ``f`` the result is a local minimum.
    """
    if a > b:
        a, b = b, a
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    best = (c, fc) if fc <= fd else (d, fd)
    while b - a > width:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
            if fc < best[1]:
                best = (c, fc)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
            if fd < best[1]:
                best = (d, fd)
    return best
