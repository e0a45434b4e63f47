"""Dense reference values for the 3-node path (d=1, box radius 1, a=1, nu=1, W=1).

Run: python3 tests/oracles/path3_oracle.py
The printed values are frozen into tests/test_green.cpp and tests/acceptance.cpp.
"""
import numpy as np

L = np.array([[2.0, -1, 0], [-1, 2, -1], [0, -1, 2]])
G0 = np.linalg.inv(L)
G2 = np.linalg.inv(L + 2 * np.eye(3))
w, v = np.linalg.eigh(L)
phi = v[:, 0] / v[1, 0]
print("G(lambda=0) =", repr(G0 * 4), "/ 4")
print("G(lambda=-2) =", repr(G2))
print("lambda0 =", repr(w[0]), " 2-sqrt2 =", repr(2 - np.sqrt(2)))
print("phi =", repr(phi))
K = np.linalg.inv(L + np.eye(3))  # weighted Green operator at lambda=-1, W=nu=1
eta = np.linalg.eigvals(K)
print("eta_max =", repr(max(abs(eta))), " 1/(3-sqrt2) =", repr(1 / (3 - np.sqrt(2))))
h = np.array([1.0, 2.0, 1.0])
Lh = np.diag(1 / h) @ L @ np.diag(h)
print("Doob L^h =", repr(Lh), " row sums =", repr(Lh.sum(1)), " (Lh)/h =", repr(L @ h / h))
