"""Tail functionals for V = indicator of a box, c constant, a = 1, W = nu = 1.

S(k) = sup over tail pairs of sum_{z in tail} G(x,z)|V(z)|G(z,y) / G(x,y) on the
ambient box, with x = origin (semismall) or x over the tail (small).
Written against plain SciPy, without the C++ stencil code.

Run: python3 tests/oracles/perturbation_oracle.py
"""
import itertools
import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as sla


def operator(d, K, c):
    m = 2 * K + 1
    eye = sp.identity(m, format="csr")
    t = sp.diags([-np.ones(m - 1), 2 * np.ones(m), -np.ones(m - 1)], [-1, 0, 1])
    total = None
    for axis in range(d):
        mats = [eye] * d
        mats[axis] = t
        term = mats[0]
        for mat in mats[1:]:
            term = sp.kron(term, mat, format="csr")
        total = term if total is None else total + term
    return (total + c * sp.identity(m ** d)).tocsc()


def nodes(d, K):
    return np.array(list(itertools.product(range(-K, K + 1), repeat=d)))


def semismall(d, K, c, R, radii):
    M = operator(d, K, c)
    X = nodes(d, K)
    sup = np.abs(X).max(axis=1)
    V = (sup <= R).astype(float)
    x0 = np.where((X == 0).all(axis=1))[0][0]
    e = np.zeros(len(X)); e[x0] = 1
    solve = (lambda b: sla.spsolve(M, b)) if d <= 2 or len(X) < 20000 else (
        lambda b: sla.cg(M, b, rtol=1e-14, maxiter=20000)[0])
    r = solve(e)
    out = []
    for k in radii:
        tail = sup > k
        h = np.where(tail, r * V, 0.0)
        s = solve(h)
        out.append(float(np.max(s[tail] / r[tail])) if h.any() else 0.0)
    return out


def small_dense(d, K, c, R, radii):
    M = operator(d, K, c).toarray()
    G = np.linalg.inv(M)
    X = nodes(d, K)
    sup = np.abs(X).max(axis=1)
    V = (sup <= R).astype(float)
    out = []
    for k in radii:
        t = np.where(sup > k)[0]
        A = G[np.ix_(t, t)]
        H = A @ np.diag(V[t]) @ A
        out.append(float(np.max(H / A)))
    return out


def main():
    print("d=3, K=24, c=0.2, V=box:18  semismall S(4,8,16):",
          [repr(v) for v in semismall(3, 24, 0.2, 18, [4, 8, 16])])
    print("d=2, K=6, c=0.5, V=box:4  semismall S(1,2,3):", [repr(v) for v in semismall(2, 6, 0.5, 4, [1, 2, 3])])
    print("d=2, K=6, c=0.5, V=box:4  small S(1,2,3):", [repr(v) for v in small_dense(2, 6, 0.5, 4, [1, 2, 3])])


if __name__ == "__main__":
    main()
