"""Dense Hermitian eigensolver: Householder tridiagonalization + implicit QL.

Self-contained (numpy arrays only, no LAPACK entry points) so the spectral
results do not depend on platform BLAS behaviour.  A cyclic complex Jacobi
routine is kept alongside as an independent cross-check for small matrices.
"""

from __future__ import annotations

import math

import numpy as np

_EPS = np.finfo(np.float64).eps


class ConvergenceError(RuntimeError):
    """QL iteration exceeded its sweep cap; the matrix is ill-conditioned."""


def _tridiagonalize(H: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Unitary reduction Q* H Q = T with T real symmetric tridiagonal.

    Returns (diagonal of T, subdiagonal of T, Q).  Complex Householder
    reflections zero out each column below the first subdiagonal; a final
    diagonal phase similarity makes the subdiagonal real nonnegative.
    """
    A = np.array(H, dtype=np.complex128)
    n = A.shape[0]
    Q = np.eye(n, dtype=np.complex128)
    for k in range(n - 2):
        x = A[k + 1 :, k].copy()
        xnorm = np.linalg.norm(x)
        if xnorm <= _EPS * max(1.0, np.linalg.norm(A[k:, k])):
            A[k + 1 :, k] = 0.0
            A[k, k + 1 :] = 0.0
            continue
        alpha = x[0]
        phase = alpha / abs(alpha) if abs(alpha) > 0.0 else 1.0
        beta = -phase * xnorm
        v = x
        v[0] -= beta
        vnorm = np.linalg.norm(v)
        if vnorm == 0.0:
            continue
        v /= vnorm
        # two-sided update of the trailing block: B <- (I-2vv*) B (I-2vv*)
        B = A[k + 1 :, k + 1 :]
        w = B @ v
        c = float(np.real(np.vdot(v, w)))  # v*Bv is real for Hermitian B
        w2 = w - c * v
        B -= 2.0 * np.outer(v, w2.conj())
        B -= 2.0 * np.outer(w2, v.conj())
        A[k + 1 :, k] = 0.0
        A[k, k + 1 :] = 0.0
        A[k + 1, k] = beta
        A[k, k + 1] = np.conj(beta)
        Q[:, k + 1 :] -= 2.0 * np.outer(Q[:, k + 1 :] @ v, v.conj())

    d = np.real(np.diag(A)).copy()
    e_c = np.array([A[i + 1, i] for i in range(n - 1)], dtype=np.complex128)
    # phase out the subdiagonal: S* T S is real when S accumulates the phases
    S = np.ones(n, dtype=np.complex128)
    e = np.empty(n - 1)
    for i in range(n - 1):
        a = abs(e_c[i])
        S[i + 1] = S[i] * (e_c[i] / a if a > 0.0 else 1.0)
        e[i] = a
    Q *= S[np.newaxis, :]
    return d, e, Q


def _ql_implicit(d: np.ndarray, e: np.ndarray, Z: np.ndarray, max_sweeps: int) -> np.ndarray:
    """Implicit-shift QL on a real symmetric tridiagonal, rotations folded into Z."""
    n = len(d)
    if n == 1:
        return d
    e = np.append(e, 0.0)
    for l in range(n):
        iterations = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= _EPS * dd:
                    break
                m += 1
            if m == l:
                break
            iterations += 1
            if iterations > max_sweeps:
                raise ConvergenceError(
                    f"eigenvalue {l} failed to converge in {max_sweeps} sweeps"
                )
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            underflow = False
            for i in range(m - 1, l - 1, -1):
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                col = Z[:, i + 1].copy()
                Z[:, i + 1] = s * Z[:, i] + c * col
                Z[:, i] = c * Z[:, i] - s * col
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return d


def hermitian_eigh(H: np.ndarray, max_sweeps: int = 64) -> tuple[np.ndarray, np.ndarray]:
    """Full eigendecomposition of a Hermitian matrix.

    Returns eigenvalues ascending and an orthonormal eigenvector matrix
    (columns).  Deterministic: identical input gives identical output.
    """
    H = np.asarray(H)
    n = H.shape[0]
    if H.shape != (n, n):
        raise ValueError("matrix must be square")
    herm_defect = np.max(np.abs(H - H.conj().T)) if n else 0.0
    if herm_defect > 1e-10 * max(1.0, np.max(np.abs(H))):
        raise ValueError(f"matrix is not Hermitian (defect {herm_defect:.3e})")
    if n == 1:
        return np.array([float(np.real(H[0, 0]))]), np.ones((1, 1), dtype=np.complex128)
    d, e, Z = _tridiagonalize(H)
    d = _ql_implicit(d, e, Z, max_sweeps)
    order = np.argsort(d, kind="stable")
    return d[order], Z[:, order]


def jacobi_eigh(
    H: np.ndarray, tol: float = 1e-13, max_sweeps: int = 100
) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic complex Jacobi diagonalization; independent cross-check solver.

    Intended for small matrices (N <= ~64) where its O(N^3) per sweep cost
    is irrelevant and its unconditional stability is welcome.
    """
    A = np.array(H, dtype=np.complex128)
    n = A.shape[0]
    V = np.eye(n, dtype=np.complex128)
    scale = max(1.0, float(np.max(np.abs(A)))) if n else 1.0
    for _ in range(max_sweeps):
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                z = A[p, q]
                az = abs(z)
                off = max(off, az)
                if az <= tol * scale:
                    continue
                phi = z / az
                app = float(np.real(A[p, p]))
                aqq = float(np.real(A[q, q]))
                # small-angle root of the annihilation quadratic keeps |theta| <= pi/4;
                # rationalized form avoids cancellation for |tau| >> 1
                tau = (app - aqq) / (2.0 * az)
                t = -math.copysign(1.0, tau) / (abs(tau) + math.hypot(tau, 1.0))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                # unitary U = diag(1, conj(phi)) . Givens(c, s); apply A <- U* A U
                rp = c * A[p, :] - s * phi * A[q, :]
                rq = s * A[p, :] + c * phi * A[q, :]
                A[p, :], A[q, :] = rp, rq
                cp = c * A[:, p] - s * np.conj(phi) * A[:, q]
                cq = s * A[:, p] + c * np.conj(phi) * A[:, q]
                A[:, p], A[:, q] = cp, cq
                vp = c * V[:, p] - s * np.conj(phi) * V[:, q]
                vq = s * V[:, p] + c * np.conj(phi) * V[:, q]
                V[:, p], V[:, q] = vp, vq
        if off <= tol * scale:
            break
    else:
        raise ConvergenceError(f"Jacobi failed to converge in {max_sweeps} sweeps")
    w = np.real(np.diag(A)).copy()
    order = np.argsort(w, kind="stable")
    return w[order], V[:, order]
