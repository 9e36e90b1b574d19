#pragma once

#include <optional>

#include "tsvf/qcore.hpp"

// The two-level premeasurement toy model with an N-particle two-level
// environment.
//
//   H_sa = -g sigma_z(s) (x) sigma_y(a)        over t1 = pi/(4g)
//   H_ae = -sigma_z(a) (x) sum_k g_k sigma_z(e_k)
//
// The apparatus starts in |R> = (|U>+|D>)/sqrt(2); after t1 the pointer is
// correlated: a|uU> + b|dD>.  Coupling the environment for a further time t'
// dresses the branches with product states eps_U(t'), eps_D(t') whose k-th
// factors carry phases e^{+-i g_k t'}.
//
// The correlation amplitude is defined so that
//   z(t') = prod_k [ cos(2 g_k t') + i (|alpha_k|^2 - |beta_k|^2) sin(2 g_k t') ],
// which is the branch overlap taken with the D-branch environment state in the
// bra: z = sum_i conj(eps_D[i]) eps_U[i].  With this sign convention the
// reduced system-apparatus matrix carries z ab* on |uU><dD|.

namespace tsvf {

inline constexpr int kDenseQubitLimit = 20;  // total qubits a dense statevector may use

inline const std::string kSystemLabel = "s";
inline const std::string kPointerLabel = "a";

std::string environment_label(int k);  // "e1", "e2", ...

struct EnvironmentSpec {
    RealVector couplings;  // g_k, finite and nonzero
    Vector alphas, betas;  // per-particle up/down amplitudes, |a_k|^2+|b_k|^2 = 1

    EnvironmentSpec(RealVector couplings, Vector alphas, Vector betas);

    int size() const { return static_cast<int>(couplings.size()); }

    // Default incommensurate environment: g_k = sqrt(k-th prime), balanced
    // per-particle amplitudes 1/sqrt(2).
    static EnvironmentSpec prime_root(int n);
};

struct ToyModelConfig {
    complex_t a, b;  // system amplitudes, |a|^2+|b|^2 = 1
    double g;        // system-apparatus coupling, > 0
    EnvironmentSpec env;

    ToyModelConfig(complex_t a, complex_t b, double g, EnvironmentSpec env);

    double t1() const;  // pi/(4g), the premeasurement duration
};

// H_sa = -g sigma_z(s) (x) sigma_y(a) on layout {s, a}.
Operator system_pointer_hamiltonian(double g);

// Dense evolution of (a|u>+b|d>) (x) |R> under H_sa for t1; returns the
// correlated state a|uU> + b|dD> at time t1 on layout {s, a}.
StateVector premeasure(const ToyModelConfig& cfg);

// The unentangled environment product state (x)_k (alpha_k|u_k> + beta_k|d_k>).
StateVector environment_start(const EnvironmentSpec& env, double time);

// Full dense pipeline step: tensor the environment onto psi_sa and evolve
// under H_ae for dt (H_ae is diagonal in the computational basis, so the
// evolution is an exact per-amplitude phase).  Requires N+2 qubits within the
// dense limit.
StateVector couple_environment_dense(const StateVector& psi_sa, const EnvironmentSpec& env,
                                     double dt, int dense_limit = kDenseQubitLimit);

enum class Backend { dense, product };

// z(dt) per the product closed form (O(N)) or extracted from the full dense
// statevector; the two agree to 1e-10 and |z| <= 1.
complex_t correlation_amplitude(const EnvironmentSpec& env, double dt, Backend backend,
                                int dense_limit = kDenseQubitLimit);

// Closed form for the long-time mean of |z(t)|^2: 2^-N prod_k (1 + Delta_k^2)
// with Delta_k = |alpha_k|^2 - |beta_k|^2.  Lives in [2^-N, 1].
double time_averaged_overlap(const EnvironmentSpec& env);

// Uniform grid scan for the first recurrence of |z|: samples t = dt, 2dt, ...
// up to t_max, skips the initial plateau (samples before |z| has first dropped
// below the threshold), and returns the first sample at or above the threshold
// after that drop.  If |z| never drops below the threshold the correlation
// never decays and the first sample beyond dt is returned.  No root polishing.
std::optional<double> recurrence_search(const EnvironmentSpec& env, double threshold,
                                        double t_max, double dt);

}  // namespace tsvf
