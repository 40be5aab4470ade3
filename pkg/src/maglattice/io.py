"""File formats: ASCII PBM (P1) occupancy grids and CSV field maps.

Numbers in CSV output carry 9 significant digits with '.' as the decimal
separator, independent of locale.
"""

import numpy as np


def load_pbm(path) -> np.ndarray:
    """Read an ASCII portable bitmap (P1) into an occupancy grid.

    PBM stores rows of the image top to bottom; the returned array is
    indexed [ix, iy] so that axis 0 runs along a1 and axis 1 along a2.
    """
    with open(path, "r") as fh:
        text = fh.read()
    tokens = []
    for line in text.splitlines():
        line = line.split("#", 1)[0]
        tokens.extend(line.split())
    if not tokens or tokens[0] != "P1":
        raise ValueError(f"{path}: not an ASCII PBM (P1) file")
    if len(tokens) < 3:
        raise ValueError(f"{path}: truncated PBM header")
    try:
        width, height = int(tokens[1]), int(tokens[2])
    except ValueError as exc:
        raise ValueError(f"{path}: malformed PBM dimensions") from exc
    bits = tokens[3:]
    if len(bits) != width * height:
        raise ValueError(
            f"{path}: expected {width * height} pixels, found {len(bits)}"
        )
    try:
        arr = np.array([int(b) for b in bits], dtype=int).reshape(height, width)
    except ValueError as exc:
        raise ValueError(f"{path}: non-binary pixel value") from exc
    if not np.all((arr == 0) | (arr == 1)):
        raise ValueError(f"{path}: PBM pixels must be 0 or 1")
    return arr.T[:, ::-1]  # image rows top-to-bottom -> grid [ix, iy]


def save_pbm(path, occupancy: np.ndarray):
    occ = np.asarray(occupancy, dtype=int)
    img = occ[:, ::-1].T
    with open(path, "w") as fh:
        fh.write("P1\n")
        fh.write(f"{img.shape[1]} {img.shape[0]}\n")
        for row in img:
            fh.write(" ".join(str(int(v)) for v in row) + "\n")


def fmt9(x: float) -> str:
    """Fixed 9-significant-digit decimal representation."""
    return f"{x:.9g}"


def write_field_map_csv(path, points_m: np.ndarray, B_T: np.ndarray):
    """CSV columns x_nm, y_nm, z_nm, Bx_mT, By_mT, Bz_mT, Bmag_mT."""
    pts = np.asarray(points_m, dtype=float)
    B = np.asarray(B_T, dtype=float)
    mag = np.linalg.norm(B, axis=1)
    with open(path, "w", newline="") as fh:
        fh.write("x_nm,y_nm,z_nm,Bx_mT,By_mT,Bz_mT,Bmag_mT\n")
        for p, b, m in zip(pts, B, mag):
            cols = [p[0] * 1e9, p[1] * 1e9, p[2] * 1e9, b[0] * 1e3, b[1] * 1e3, b[2] * 1e3, m * 1e3]
            fh.write(",".join(fmt9(c) for c in cols) + "\n")


def write_fano_csv(path, curve):
    with open(path, "w", newline="") as fh:
        fh.write("eta,meanN,F,stderr\n")
        for p in curve.points:
            fh.write(
                ",".join(fmt9(v) for v in (p.eta, p.mean_N, p.F, p.stderr_F)) + "\n"
            )
