"""Smoke test for the quadalg_py extension; exits nonzero on failure."""

from fractions import Fraction

import quadalg_py as q


def main():
    m = [[1, 2], [3, 4]]
    assert q.determinant(m) == -2
    assert q.determinant(m, crt=True) == -2
    assert q.rank([[1, 2], [2, 4]]) == 1
    k = q.kernel([[1, 2], [2, 4]])
    assert len(k) == 1 and k[0][0] + 2 * k[0][1] == 0

    a, s, pivots, d = q.adjoint(m)
    assert q.multiply(a, m) == s
    assert len(pivots) == 2 and abs(d) == 2

    inv = q.inverse(m)
    assert inv == [[Fraction(-2), Fraction(1)], [Fraction(3, 2), Fraction(-1, 2)]]
    h, h_inv = q.cholesky([[4, 2], [2, 2]])
    assert h == [[2, 0], [1, 1]]
    assert h_inv == [[Fraction(1, 2), 0], [Fraction(-1, 2), 1]]
    assert q.triangular_inverse(h) == h_inv

    g = q.generate(20, density=0.5, seed=7)
    assert g == q.generate(20, density=0.5, seed=7)
    assert q.determinant(g, workers=4) == q.determinant(g, crt=True)

    try:
        q.inverse([[1, 2], [2, 4]])
    except q.QuadalgError as e:
        assert str(e).startswith("SingularMatrix")
    else:
        raise AssertionError("singular inverse did not raise")
    try:
        q.cholesky([[1, 2], [2, 1]])
    except q.QuadalgError as e:
        assert str(e).startswith("NotPositiveDefinite")
    else:
        raise AssertionError("indefinite Cholesky did not raise")
    print("smoke test passed")


if __name__ == "__main__":
    main()
