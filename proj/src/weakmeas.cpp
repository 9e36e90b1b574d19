#include "tsvf/weakmeas.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace tsvf {

namespace {

void check_sigma(double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma))
        throw std::invalid_argument("pointer width sigma must be positive and finite");
}

}  // namespace

GaussianPointer::GaussianPointer(Vector coefficients_in, RealVector centers_in, double sigma_in)
    : coefficients(std::move(coefficients_in)), centers(std::move(centers_in)), sigma(sigma_in) {
    if (coefficients.size() != centers.size() || coefficients.size() < 1)
        throw std::invalid_argument("pointer needs matching, nonempty coefficient/center arrays");
    for (Index j = 0; j < centers.size(); ++j)
        if (!std::isfinite(centers[j]))
            throw std::invalid_argument("pointer centers must be finite");
    check_sigma(sigma);
}

double gaussian_overlap(double mu1, double mu2, double sigma) {
    check_sigma(sigma);
    const double d = mu1 - mu2;
    return std::exp(-d * d / (8.0 * sigma * sigma));
}

complex_t pointer_inner(const GaussianPointer& p, const GaussianPointer& q) {
    if (p.sigma != q.sigma)
        throw std::invalid_argument("pointer inner product requires equal widths");
    complex_t acc = 0.0;
    for (Index j = 0; j < p.centers.size(); ++j)
        for (Index k = 0; k < q.centers.size(); ++k)
            acc += std::conj(p.coefficients[j]) * q.coefficients[k] *
                   gaussian_overlap(p.centers[j], q.centers[k], p.sigma);
    return acc;
}

double pointer_norm(const GaussianPointer& p) {
    return std::sqrt(std::max(0.0, pointer_inner(p, p).real()));
}

double pointer_mean(const GaussianPointer& p) {
    // <G_a| q |G_b> = (a+b)/2 * <G_a|G_b> for equal widths.
    double weighted = 0.0;
    double total = 0.0;
    for (Index j = 0; j < p.centers.size(); ++j)
        for (Index k = 0; k < p.centers.size(); ++k) {
            const double w =
                (std::conj(p.coefficients[j]) * p.coefficients[k]).real() *
                gaussian_overlap(p.centers[j], p.centers[k], p.sigma);
            total += w;
            weighted += 0.5 * (p.centers[j] + p.centers[k]) * w;
        }
    if (total < 1e-300) throw NearOrthogonalBoundaries(std::sqrt(std::max(0.0, total)));
    return weighted / total;
}

GaussianPointer normalize_pointer(const GaussianPointer& p) {
    const double n = pointer_norm(p);
    if (n < 1e-150) throw NearOrthogonalBoundaries(n);
    return {p.coefficients / n, p.centers, p.sigma};
}

WeakScenario::WeakScenario(RealVector eigenvalues_in, Vector c_in, Vector c_prime_in,
                           double sigma_in)
    : eigenvalues(std::move(eigenvalues_in)),
      c(std::move(c_in)),
      c_prime(std::move(c_prime_in)),
      sigma(sigma_in) {
    const Index n = eigenvalues.size();
    if (n < 1 || c.size() != n || c_prime.size() != n)
        throw std::invalid_argument("weak scenario needs matching eigenvalue/component arrays");
    for (Index k = 0; k < n; ++k)
        if (!std::isfinite(eigenvalues[k]))
            throw std::invalid_argument("eigenvalues must be finite");
    check_sigma(sigma);
    if (std::abs(c.norm() - 1.0) > 1e-10) throw NormalizationError("WeakScenario.c", c.norm());
    if (std::abs(c_prime.norm() - 1.0) > 1e-10)
        throw NormalizationError("WeakScenario.c_prime", c_prime.norm());
    const double overlap = std::abs(c_prime.dot(c));  // <phi2|phi1>
    if (overlap <= kOrthogonalityEps) throw NearOrthogonalBoundaries(overlap);
}

complex_t weak_value(const WeakScenario& scn) {
    complex_t num = 0.0, den = 0.0;
    for (Index k = 0; k < scn.eigenvalues.size(); ++k) {
        const complex_t w = scn.c[k] * std::conj(scn.c_prime[k]);
        num += w * scn.eigenvalues[k];
        den += w;
    }
    if (std::abs(den) <= kOrthogonalityEps) throw NearOrthogonalBoundaries(std::abs(den));
    return num / den;
}

CoupledPointerState couple_pointer(const WeakScenario& scn) {
    return {scn.c, scn.eigenvalues, scn.sigma};
}

GaussianPointer post_select_pointer(const CoupledPointerState& joint, const WeakScenario& scn) {
    if (joint.system_coefficients.size() != scn.c_prime.size())
        throw std::invalid_argument("coupled state does not match the scenario dimension");
    Vector weights(joint.system_coefficients.size());
    for (Index k = 0; k < weights.size(); ++k)
        weights[k] = std::conj(scn.c_prime[k]) * joint.system_coefficients[k];
    return normalize_pointer({std::move(weights), joint.centers, joint.sigma});
}

double weakness_residual(const WeakScenario& scn) {
    const GaussianPointer actual = post_select_pointer(couple_pointer(scn), scn);
    Vector one = Vector::Ones(1);
    RealVector at(1);
    at << weak_value(scn).real();
    const GaussianPointer ideal(std::move(one), std::move(at), scn.sigma);
    return 1.0 - std::abs(pointer_inner(ideal, actual));
}

GridDensity grid_oracle(const GaussianPointer& p, const GridSpec& grid) {
    if (!(grid.q_max > grid.q_min))
        throw std::invalid_argument("grid needs q_max > q_min");
    if (grid.n_points < 1024)
        throw std::invalid_argument("grid needs at least 1024 points");
    for (Index j = 0; j < p.centers.size(); ++j) {
        const double lo = p.centers[j] - 6.0 * p.sigma;
        const double hi = p.centers[j] + 6.0 * p.sigma;
        if (grid.q_min > lo || grid.q_max < hi)
            throw GridTooNarrow("grid [" + detail::fmt_g(grid.q_min) + ", " +
                                detail::fmt_g(grid.q_max) + "] does not cover center " +
                                detail::fmt_g(p.centers[j]) + " +- 6 sigma");
    }

    const Index n = grid.n_points;
    const double h = (grid.q_max - grid.q_min) / static_cast<double>(n - 1);
    const double amp = std::pow(2.0 * std::numbers::pi * p.sigma * p.sigma, -0.25);
    RealVector q(n), density(n);
    for (Index i = 0; i < n; ++i) {
        const double x = grid.q_min + h * static_cast<double>(i);
        complex_t psi = 0.0;
        for (Index j = 0; j < p.centers.size(); ++j) {
            const double d = x - p.centers[j];
            psi += p.coefficients[j] * amp * std::exp(-d * d / (4.0 * p.sigma * p.sigma));
        }
        q[i] = x;
        density[i] = std::norm(psi);
    }

    double mass = 0.0, first_moment = 0.0;
    for (Index i = 0; i + 1 < n; ++i) {
        mass += 0.5 * h * (density[i] + density[i + 1]);
        first_moment += 0.5 * h * (q[i] * density[i] + q[i + 1] * density[i + 1]);
    }
    const double closed_mass = pointer_inner(p, p).real();
    if (closed_mass > 0.0 && (closed_mass - mass) / closed_mass > 1e-8)
        throw GridTooNarrow("grid misses " + detail::fmt_g(closed_mass - mass) +
                            " of the pointer mass");
    GridDensity out{std::move(q), std::move(density), std::sqrt(std::max(0.0, mass)), 0.0};
    out.mean = first_moment / mass;
    return out;
}

}  // namespace tsvf
