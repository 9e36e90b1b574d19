#pragma once

#include <cmath>
#include <complex>

#include "tsvf/qcore.hpp"
#include "tsvf/rng.hpp"

// Shared test utilities: deterministic random states/operators driven by the
// library's own DrawSource, and an independent matrix exponential used as an
// oracle against the eigendecomposition-based propagator.

namespace testutil {

inline tsvf::complex_t random_unit_complex(tsvf::DrawSource& d) {
    double re = 2.0 * d.uniform01() - 1.0;
    double im = 2.0 * d.uniform01() - 1.0;
    return {re, im};
}

inline tsvf::Vector random_state_vector(tsvf::DrawSource& d, tsvf::Index n) {
    tsvf::Vector v(n);
    for (tsvf::Index i = 0; i < n; ++i) v[i] = random_unit_complex(d);
    double nn = v.norm();
    if (nn < 1e-6) {  // absurdly unlikely; keep the helper total
        v.setZero();
        v[0] = 1.0;
        return v;
    }
    return v / nn;
}

// Random amplitude pair (a, b) with |a|^2 + |b|^2 = 1, kept away from the
// degenerate all-in-one-branch corners.
inline std::pair<tsvf::complex_t, tsvf::complex_t> random_amplitude_pair(tsvf::DrawSource& d,
                                                                         double margin = 0.05) {
    for (;;) {
        tsvf::Vector v = random_state_vector(d, 2);
        if (std::abs(v[0]) > margin && std::abs(v[1]) > margin) return {v[0], v[1]};
    }
}

inline tsvf::Matrix random_matrix(tsvf::DrawSource& d, tsvf::Index n) {
    tsvf::Matrix m(n, n);
    for (tsvf::Index r = 0; r < n; ++r)
        for (tsvf::Index c = 0; c < n; ++c) m(r, c) = random_unit_complex(d);
    return m;
}

inline tsvf::Matrix random_hermitian(tsvf::DrawSource& d, tsvf::Index n) {
    tsvf::Matrix m = random_matrix(d, n);
    return m + m.adjoint();
}

// Matrix exponential by scaling-and-squaring with a plain Taylor series.
// Deliberately shares nothing with evolution_operator (which diagonalizes):
// after scaling the argument below 1/4 in infinity norm, thirty Taylor terms
// leave a remainder far under 1e-30, and each squaring at most doubles the
// error, so the result is good to ~1e-14 for the operator norms used here.
inline tsvf::Matrix expm_taylor(const tsvf::Matrix& m) {
    using tsvf::Index;
    using tsvf::Matrix;
    double norm = 0.0;
    for (Index r = 0; r < m.rows(); ++r) norm = std::max(norm, m.cwiseAbs().row(r).sum());
    int squarings = 0;
    while (norm > 0.25 && squarings < 60) {
        norm /= 2.0;
        ++squarings;
    }
    Matrix x = m / std::pow(2.0, squarings);
    Matrix term = Matrix::Identity(m.rows(), m.cols());
    Matrix sum = term;
    for (int k = 1; k <= 30; ++k) {
        term = term * x / static_cast<double>(k);
        sum += term;
        if (term.cwiseAbs().maxCoeff() < 1e-30) break;
    }
    for (int i = 0; i < squarings; ++i) sum = sum * sum;
    return sum;
}

template <typename A, typename B>
double max_abs_diff(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
    return (a.derived() - b.derived()).cwiseAbs().maxCoeff();
}

}  // namespace testutil
