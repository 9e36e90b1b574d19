#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace tsvf {

namespace detail {
inline std::string fmt_g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}
}  // namespace detail

// History and destiny boundary vectors (or a pre/post selection pair) are too
// close to orthogonal for the normalized two-state to exist.
struct NearOrthogonalBoundaries : std::runtime_error {
    double overlap_magnitude;
    explicit NearOrthogonalBoundaries(double mag)
        : std::runtime_error("near-orthogonal boundaries: |overlap| = " + detail::fmt_g(mag)),
          overlap_magnitude(mag) {}
};

// as_density_matrix called on a two-state whose destiny is not the evolved
// history (up to global phase).
struct NotDensityLike : std::runtime_error {
    double deviation;
    explicit NotDensityLike(double dev)
        : std::runtime_error("two-state is not density-like: ray deviation = " + detail::fmt_g(dev)),
          deviation(dev) {}
};

// A dense-statevector routine was asked for more qubits than the configured cap.
struct DenseLimitExceeded : std::runtime_error {
    int required_qubits;
    int limit;
    DenseLimitExceeded(int required, int lim)
        : std::runtime_error("dense backend limit exceeded: need " + std::to_string(required) +
                             " qubits, limit is " + std::to_string(lim)),
          required_qubits(required), limit(lim) {}
};

// The conditional-probability denominator vanished: no intermediate outcome is
// compatible with the given initial/final pair.
struct ImpossibleBoundaryPair : std::runtime_error {
    double denominator;
    explicit ImpossibleBoundaryPair(double den)
        : std::runtime_error("impossible boundary pair: probability denominator = " + detail::fmt_g(den)),
          denominator(den) {}
};

// A quantity that must be normalized is not; `field` names the offender.
struct NormalizationError : std::runtime_error {
    std::string field;
    double norm;
    NormalizationError(std::string f, double n)
        : std::runtime_error("normalization error: " + f + " has norm " + detail::fmt_g(n)),
          field(std::move(f)), norm(n) {}
};

// The sampling grid handed to the pointer-density oracle does not cover the
// distribution (probability mass outside the window).
struct GridTooNarrow : std::runtime_error {
    explicit GridTooNarrow(const std::string& what_detail)
        : std::runtime_error("grid too narrow: " + what_detail) {}
};

}  // namespace tsvf
