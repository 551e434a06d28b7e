"""Smoke test for the hilucsi extension module.

Build and install first, e.g. `pip install --no-build-isolation ./crates/python`.
"""

import math
import os
import tempfile

import hilucsi


def norm(v):
    return math.sqrt(sum(x * x for x in v))


def residual(a, x, b):
    ax = a.matvec(x)
    return norm([p - q for p, q in zip(b, ax)]) / norm(b)


def main():
    a = hilucsi.laplacian_2d(20)
    assert a.shape == (400, 400)
    b = a.matvec([1.0] * 400)

    m = hilucsi.Preconditioner(a, dense_cutoff=40, symmetric=True)
    assert m.n == 400 and m.nnz_ratio > 0
    assert len(m.levels) >= 1
    x, stats = hilucsi.fgmres(a, b, m)
    assert stats.converged, stats
    assert residual(a, x, b) <= 1e-6

    _, plain = hilucsi.fgmres(a, b)
    assert plain.iterations > stats.iterations

    s = hilucsi.stokes_taylor_hood(6)
    m = hilucsi.Preconditioner(s, tau=1e-2, alpha=3.0, kappa=5.0, dense_cutoff=20, symmetric=True)
    assert m.levels[0].static_deferrals > 0
    bs = s.matvec([1.0] * s.shape[0])
    x, stats = hilucsi.fgmres(s, bs, m)
    assert stats.converged and residual(s, x, bs) <= 1e-6

    small = hilucsi.SparseMatrix.from_triplets(3, 3, [0, 1, 2, 0], [0, 1, 2, 2], [2.0, 3.0, 4.0, 1.0])
    assert small.nnz == 4 and small.get(0, 2) == 1.0
    indptr, indices, data = small.to_csr()
    again = hilucsi.SparseMatrix.from_csr(3, 3, indptr, indices, data)
    assert again.to_dense() == small.to_dense()
    assert small.transpose().get(2, 0) == 1.0

    with tempfile.TemporaryDirectory() as d:
        path = os.path.join(d, "small.mtx")
        small.write_matrix_market(path)
        back, symmetric = hilucsi.SparseMatrix.read_matrix_market(path)
        assert not symmetric and back.to_dense() == small.to_dense()
        try:
            hilucsi.SparseMatrix.read_matrix_market(os.path.join(d, "missing.mtx"))
        except OSError:
            pass
        else:
            raise AssertionError("missing file accepted")

    assert hilucsi.next_level_params(10.0, 1e-4, 3.0, 1) == (20.0, 1e-5, 2.0)
    try:
        hilucsi.Preconditioner(hilucsi.SparseMatrix.from_triplets(2, 3, [0], [0], [1.0]))
    except ValueError:
        pass
    else:
        raise AssertionError("rectangular matrix accepted")

    print("ok:", m, stats)


if __name__ == "__main__":
    main()
