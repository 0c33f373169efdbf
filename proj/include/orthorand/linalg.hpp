#pragma once

// Dense eigenvalue kernels used by the quadrature and root-finding layers.
// Both are templated on the scalar so tests can run them in extended
// precision against double.

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <vector>

#include "orthorand/errors.hpp"

namespace orthorand::linalg {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
struct TridiagonalEigen {
    Vector<Scalar> values;       ///< ascending
    Vector<Scalar> first_comps;  ///< first component of each unit eigenvector
};

/// Eigenvalues of the symmetric tridiagonal matrix (diag, offdiag) by implicit
/// QL with Wilkinson shifts. Only the first row of the eigenvector matrix is
/// carried through the rotations, which is all Golub-Welsch needs.
template <typename Scalar>
TridiagonalEigen<Scalar> symmetric_tridiagonal_ql(Vector<Scalar> d, const Vector<Scalar>& offdiag,
                                                  int max_iter_per_value = 30) {
    using std::abs;
    using std::hypot;
    const Eigen::Index n = d.size();
    Vector<Scalar> e = Vector<Scalar>::Zero(n);
    for (Eigen::Index i = 0; i + 1 < n; ++i) e[i] = offdiag[i];
    Vector<Scalar> z = Vector<Scalar>::Zero(n);
    if (n > 0) z[0] = Scalar(1);
    const Scalar eps = std::numeric_limits<Scalar>::epsilon();

    for (Eigen::Index l = 0; l < n; ++l) {
        int iter = 0;
        Eigen::Index m;
        do {
            for (m = l; m + 1 < n; ++m) {
                const Scalar dd = abs(d[m]) + abs(d[m + 1]);
                if (abs(e[m]) <= eps * dd) break;
            }
            if (m != l) {
                if (iter++ == max_iter_per_value)
                    throw NumericError("tridiagonal QL did not converge");
                Scalar g = (d[l + 1] - d[l]) / (Scalar(2) * e[l]);
                Scalar r = hypot(g, Scalar(1));
                g = d[m] - d[l] + e[l] / (g + (g >= 0 ? abs(r) : -abs(r)));
                Scalar s(1), c(1), p(0);
                Eigen::Index i;
                bool underflow = false;
                for (i = m - 1; i >= l; --i) {
                    Scalar f = s * e[i];
                    const Scalar b = c * e[i];
                    r = hypot(f, g);
                    e[i + 1] = r;
                    if (r == Scalar(0)) {
                        d[i + 1] -= p;
                        e[m] = Scalar(0);
                        underflow = true;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + Scalar(2) * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    f = z[i + 1];
                    z[i + 1] = s * z[i] + c * f;
                    z[i] = c * z[i] - s * f;
                }
                if (underflow) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = Scalar(0);
            }
        } while (m != l);
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return d[a] < d[b]; });
    TridiagonalEigen<Scalar> out{Vector<Scalar>(n), Vector<Scalar>(n)};
    for (Eigen::Index i = 0; i < n; ++i) {
        out.values[i] = d[order[static_cast<std::size_t>(i)]];
        out.first_comps[i] = z[order[static_cast<std::size_t>(i)]];
    }
    return out;
}

/// Parlett-Reinsch balancing by powers of two (no permutations), so a
/// Hessenberg input stays Hessenberg. Eigenvalues are unchanged.
template <typename Scalar>
void balance(Matrix<Scalar>& a) {
    using std::abs;
    const Eigen::Index n = a.rows();
    constexpr Scalar radix(2);
    const Scalar sqrdx = radix * radix;
    bool done = false;
    while (!done) {
        done = true;
        for (Eigen::Index i = 0; i < n; ++i) {
            Scalar r(0), c(0);
            for (Eigen::Index j = 0; j < n; ++j) {
                if (j == i) continue;
                c += abs(a(j, i));
                r += abs(a(i, j));
            }
            if (c == Scalar(0) || r == Scalar(0)) continue;
            Scalar g = r / radix, f(1);
            const Scalar s = c + r;
            while (c < g) {
                f *= radix;
                c *= sqrdx;
            }
            g = r * radix;
            while (c > g) {
                f /= radix;
                c /= sqrdx;
            }
            if ((c + r) / f < Scalar(0.95) * s) {
                done = false;
                a.row(i) /= f;
                a.col(i) *= f;
            }
        }
    }
}

/// All eigenvalues of an upper Hessenberg matrix by the Francis implicit
/// double-shift QR iteration (eigenvalues only, active block updates).
/// Throws NumericError once the total sweep count exceeds 30*n.
template <typename Scalar>
std::vector<std::complex<Scalar>> hessenberg_eigenvalues(Matrix<Scalar> a) {
    using std::abs;
    using std::sqrt;
    const int n = static_cast<int>(a.rows());
    std::vector<std::complex<Scalar>> out(static_cast<std::size_t>(n));
    if (n == 0) return out;
    const Scalar eps = std::numeric_limits<Scalar>::epsilon();
    auto sign = [](Scalar mag, Scalar ref) { return ref >= Scalar(0) ? abs(mag) : -abs(mag); };

    Scalar anorm(0);
    for (int i = 0; i < n; ++i)
        for (int j = std::max(i - 1, 0); j < n; ++j) anorm += abs(a(i, j));

    long total_iterations = 0;
    const long max_total = 30L * n;
    int nn = n - 1;
    Scalar t(0);
    while (nn >= 0) {
        int its = 0;
        int l;
        do {
            for (l = nn; l >= 1; --l) {
                Scalar s = abs(a(l - 1, l - 1)) + abs(a(l, l));
                if (s == Scalar(0)) s = anorm;
                if (abs(a(l, l - 1)) <= eps * s) {
                    a(l, l - 1) = Scalar(0);
                    break;
                }
            }
            Scalar x = a(nn, nn);
            if (l == nn) {
                out[static_cast<std::size_t>(nn)] = {x + t, Scalar(0)};
                --nn;
            } else {
                Scalar y = a(nn - 1, nn - 1);
                Scalar w = a(nn, nn - 1) * a(nn - 1, nn);
                if (l == nn - 1) {
                    const Scalar p = Scalar(0.5) * (y - x);
                    const Scalar q = p * p + w;
                    Scalar z = sqrt(abs(q));
                    x += t;
                    if (q >= Scalar(0)) {
                        z = p + sign(z, p);
                        const Scalar r1 = x + z;
                        const Scalar r2 = z != Scalar(0) ? x - w / z : r1;
                        out[static_cast<std::size_t>(nn - 1)] = {r1, Scalar(0)};
                        out[static_cast<std::size_t>(nn)] = {r2, Scalar(0)};
                    } else {
                        out[static_cast<std::size_t>(nn - 1)] = {x + p, -z};
                        out[static_cast<std::size_t>(nn)] = {x + p, z};
                    }
                    nn -= 2;
                } else {
                    if (++total_iterations > max_total)
                        throw NumericError("Francis QR did not converge within 30n iterations");
                    if (its > 0 && its % 10 == 0) {
                        // exceptional shift
                        t += x;
                        for (int i = 0; i <= nn; ++i) a(i, i) -= x;
                        const Scalar s = abs(a(nn, nn - 1)) + abs(a(nn - 1, nn - 2));
                        x = y = Scalar(0.75) * s;
                        w = Scalar(-0.4375) * s * s;
                    }
                    ++its;
                    int m;
                    Scalar p(0), q(0), r(0), z(0);
                    for (m = nn - 2; m >= l; --m) {
                        z = a(m, m);
                        r = x - z;
                        Scalar s = y - z;
                        p = (r * s - w) / a(m + 1, m) + a(m, m + 1);
                        q = a(m + 1, m + 1) - z - r - s;
                        r = a(m + 2, m + 1);
                        s = abs(p) + abs(q) + abs(r);
                        p /= s;
                        q /= s;
                        r /= s;
                        if (m == l) break;
                        const Scalar u = abs(a(m, m - 1)) * (abs(q) + abs(r));
                        const Scalar v = abs(p) * (abs(a(m - 1, m - 1)) + abs(z) + abs(a(m + 1, m + 1)));
                        if (u <= eps * v) break;
                    }
                    for (int i = m + 2; i <= nn; ++i) {
                        a(i, i - 2) = Scalar(0);
                        if (i != m + 2) a(i, i - 3) = Scalar(0);
                    }
                    for (int k = m; k <= nn - 1; ++k) {
                        if (k != m) {
                            p = a(k, k - 1);
                            q = a(k + 1, k - 1);
                            r = Scalar(0);
                            if (k != nn - 1) r = a(k + 2, k - 1);
                            x = abs(p) + abs(q) + abs(r);
                            if (x != Scalar(0)) {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        const Scalar s = sign(sqrt(p * p + q * q + r * r), p);
                        if (s != Scalar(0)) {
                            if (k == m) {
                                if (l != m) a(k, k - 1) = -a(k, k - 1);
                            } else {
                                a(k, k - 1) = -s * x;
                            }
                            p += s;
                            x = p / s;
                            y = q / s;
                            z = r / s;
                            q /= p;
                            r /= p;
                            for (int j = k; j <= nn; ++j) {
                                p = a(k, j) + q * a(k + 1, j);
                                if (k != nn - 1) {
                                    p += r * a(k + 2, j);
                                    a(k + 2, j) -= p * z;
                                }
                                a(k + 1, j) -= p * y;
                                a(k, j) -= p * x;
                            }
                            const int mmin = nn < k + 3 ? nn : k + 3;
                            for (int i = l; i <= mmin; ++i) {
                                p = x * a(i, k) + y * a(i, k + 1);
                                if (k != nn - 1) {
                                    p += z * a(i, k + 2);
                                    a(i, k + 2) -= p * r;
                                }
                                a(i, k + 1) -= p * q;
                                a(i, k) -= p;
                            }
                        }
                    }
                }
            }
        } while (l < nn - 1);
    }
    return out;
}

}  // namespace orthorand::linalg
