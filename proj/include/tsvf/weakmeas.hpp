#pragma once

#include "tsvf/qcore.hpp"

// Weak measurement with pre- and post-selection.  A Gaussian pointer is
// coupled impulsively to an observable, the system is post-selected, and the
// leftover pointer concentrates (to leading order in the coupling-to-width
// ratio) at the weak value
//
//   A_w = sum_k c_k conj(c'_k) a_k / sum_k c_k conj(c'_k),
//
// which is generally complex and can lie far outside the eigenvalue range.
//
// Pointer conventions: G_mu(q) = (2 pi sigma^2)^{-1/4} exp(-(q-mu)^2/(4 sigma^2)),
// so |G_mu|^2 has standard deviation sigma and
// <G_mu1|G_mu2> = exp(-(mu1-mu2)^2/(8 sigma^2)).

namespace tsvf {

// Finite superposition sum_j c_j G_{mu_j} of equal-width Gaussians.
struct GaussianPointer {
    Vector coefficients;
    RealVector centers;
    double sigma;

    GaussianPointer(Vector coefficients, RealVector centers, double sigma);
};

double gaussian_overlap(double mu1, double mu2, double sigma);

// <p|q> via the pairwise closed form; requires equal widths.
complex_t pointer_inner(const GaussianPointer& p, const GaussianPointer& q);
double pointer_norm(const GaussianPointer& p);
// Position mean of the normalized density |psi(q)|^2, closed form.
double pointer_mean(const GaussianPointer& p);
GaussianPointer normalize_pointer(const GaussianPointer& p);

// Boundary data in the observable's eigenbasis: past components c, future
// components c', eigenvalues a_k, pointer width sigma.  Both component
// vectors are unit within 1e-10 and their overlap must clear eps_orth.
struct WeakScenario {
    RealVector eigenvalues;
    Vector c;
    Vector c_prime;
    double sigma;

    WeakScenario(RealVector eigenvalues, Vector c, Vector c_prime, double sigma);
};

complex_t weak_value(const WeakScenario& scn);

// After the impulsive coupling the joint state is sum_k c_k |a_k> G_{a_k}:
// one pointer branch per eigenstate, shifted by its eigenvalue.
struct CoupledPointerState {
    Vector system_coefficients;
    RealVector centers;
    double sigma;
};

CoupledPointerState couple_pointer(const WeakScenario& scn);

// Project the system onto the future boundary state; the pointer collapses to
// the normalized mixture sum_k c_k conj(c'_k) G_{a_k}.
GaussianPointer post_select_pointer(const CoupledPointerState& joint, const WeakScenario& scn);

// 1 - |<ideal|actual>| between the post-selected pointer and a single unit
// Gaussian at Re(A_w); tends to zero as sigma grows (the weak limit).
double weakness_residual(const WeakScenario& scn);

// Brute-force quadrature check of the closed forms: sample the pointer wave
// function on a uniform grid and integrate the density by the trapezoid rule.
struct GridSpec {
    double q_min;
    double q_max;
    Index n_points;  // >= 1024
};

struct GridDensity {
    RealVector q;
    RealVector density;
    double norm;  // sqrt of the integrated density
    double mean;  // integral of q * density, normalized
};

// Requires the grid to span every center +- 6 sigma and at least 1024 points;
// throws GridTooNarrow if the span precondition fails or the integrated mass
// falls short of the closed-form norm by more than 1e-8 relative.
GridDensity grid_oracle(const GaussianPointer& p, const GridSpec& grid);

}  // namespace tsvf
