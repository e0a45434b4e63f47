"""Reference Green-function probes on lattice boxes (Dirichlet outside the box).

Independent of the C++ stencil code: operators are built as Kronecker sums of
1D second-difference matrices and solved with SciPy (SuperLU in 2D, CG in 3D).

Run: python3 tests/oracles/lattice_oracle.py
"""
import itertools
import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as sla


def kron_laplacian(d, k, a=1.0, c=0.0):
    m = 2 * k + 1
    eye = sp.identity(m, format="csr")
    t = sp.diags([-a * np.ones(m - 1), 2 * a * np.ones(m), -a * np.ones(m - 1)], [-1, 0, 1])
    total = None
    for axis in range(d):
        mats = [eye] * d
        mats[axis] = t
        term = mats[0]
        for mat in mats[1:]:
            term = sp.kron(term, mat, format="csr")
        total = term if total is None else total + term
    return (total + c * sp.identity(m ** d)).tocsc()


def index(d, k, coord):
    m = 2 * k + 1
    idx = 0
    for c in coord:
        idx = idx * m + (c + k)
    return idx


def solve(mat, rhs, d):
    if d <= 2:
        return sla.spsolve(mat, rhs)
    x, info = sla.cg(mat, rhs, rtol=1e-14, maxiter=20000)
    assert info == 0
    return x


def probe(d, k, a=1.0, c=0.0):
    """G(x0, y0) with x0 = origin, y0 = origin + e_1."""
    mat = kron_laplacian(d, k, a, c)
    rhs = np.zeros(mat.shape[0])
    y0 = tuple([1] + [0] * (d - 1))
    rhs[index(d, k, y0)] = 1.0
    g = solve(mat, rhs, d)
    return g[index(d, k, (0,) * d)]


def main():
    print("d=2, a=1: G(0,0) k=4 vs k=8")
    for k in (4, 8):
        mat = kron_laplacian(2, k)
        rhs = np.zeros(mat.shape[0]); rhs[index(2, k, (0, 0))] = 1
        print("  k", k, repr(sla.spsolve(mat, rhs)[index(2, k, (0, 0))]))

    radii = [8, 16, 32, 64]
    g = [probe(2, k, a=0.25) for k in radii]
    print("d=2, a=1/4 (random-walk normalization), G(x0,y0):", [repr(v) for v in g])
    lk = np.log(radii)
    slope, icpt = np.polyfit(lk, g, 1)
    pred = slope * lk + icpt
    r2 = 1 - np.sum((g - pred) ** 2) / np.sum((g - np.mean(g)) ** 2)
    print("  ln-k slope", repr(slope), " 2/pi", repr(2 / np.pi), " R^2", repr(r2))

    radii3 = [8, 16, 24]
    g3 = [probe(3, k) for k in radii3]
    print("d=3, a=1, G(x0,y0):", [repr(v) for v in g3])
    print("  difference ratio", repr((g3[2] - g3[1]) / (g3[1] - g3[0])))


if __name__ == "__main__":
    main()
