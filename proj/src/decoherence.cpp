#include "tsvf/decoherence.hpp"

#include <bit>
#include <cmath>
#include <numbers>

namespace tsvf {

std::string environment_label(int k) { return "e" + std::to_string(k); }

EnvironmentSpec::EnvironmentSpec(RealVector couplings_in, Vector alphas_in, Vector betas_in)
    : couplings(std::move(couplings_in)), alphas(std::move(alphas_in)), betas(std::move(betas_in)) {
    const auto n = couplings.size();
    if (n < 1) throw std::invalid_argument("environment needs at least one particle");
    if (alphas.size() != n || betas.size() != n)
        throw std::invalid_argument("environment amplitude arrays must match coupling count");
    for (Index k = 0; k < n; ++k) {
        if (!std::isfinite(couplings[k]) || couplings[k] == 0.0)
            throw std::invalid_argument("environment coupling " + std::to_string(k + 1) +
                                        " must be finite and nonzero");
        const double nrm = std::norm(alphas[k]) + std::norm(betas[k]);
        if (std::abs(nrm - 1.0) > 1e-12)
            throw NormalizationError("environment particle " + std::to_string(k + 1),
                                     std::sqrt(nrm));
    }
}

namespace {
std::vector<long> first_primes(int n) {
    std::vector<long> primes;
    primes.reserve(n);
    for (long c = 2; static_cast<int>(primes.size()) < n; ++c) {
        bool ok = true;
        for (long p : primes) {
            if (p * p > c) break;
            if (c % p == 0) { ok = false; break; }
        }
        if (ok) primes.push_back(c);
    }
    return primes;
}
}  // namespace

EnvironmentSpec EnvironmentSpec::prime_root(int n) {
    if (n < 1) throw std::invalid_argument("environment needs at least one particle");
    auto primes = first_primes(n);
    RealVector g(n);
    for (int k = 0; k < n; ++k) g[k] = std::sqrt(static_cast<double>(primes[k]));
    const double r = 1.0 / std::numbers::sqrt2;
    Vector al = Vector::Constant(n, r), be = Vector::Constant(n, r);
    return {std::move(g), std::move(al), std::move(be)};
}

ToyModelConfig::ToyModelConfig(complex_t a_in, complex_t b_in, double g_in, EnvironmentSpec env_in)
    : a(a_in), b(b_in), g(g_in), env(std::move(env_in)) {
    const double nrm = std::norm(a) + std::norm(b);
    if (std::abs(nrm - 1.0) > 1e-12)
        throw NormalizationError("system amplitudes (a, b)", std::sqrt(nrm));
    if (!(g > 0.0) || !std::isfinite(g))
        throw std::invalid_argument("system-apparatus coupling g must be positive");
}

double ToyModelConfig::t1() const { return std::numbers::pi / (4.0 * g); }

Operator system_pointer_hamiltonian(double g) {
    SubsystemLayout layout = SubsystemLayout::qubits({kSystemLabel, kPointerLabel});
    return Operator::hermitian(std::move(layout), -g * kron(sigma_z(), sigma_y()));
}

StateVector premeasure(const ToyModelConfig& cfg) {
    SubsystemLayout layout = SubsystemLayout::qubits({kSystemLabel, kPointerLabel});
    Operator h_sa = system_pointer_hamiltonian(cfg.g);
    const double r = 1.0 / std::numbers::sqrt2;
    Vector amps(4);
    amps << cfg.a * r, cfg.a * r, cfg.b * r, cfg.b * r;  // (a|u> + b|d>) (x) |R>
    StateVector start(std::move(layout), std::move(amps), 0.0, true);
    return evolve(start, h_sa, cfg.t1());
}

StateVector environment_start(const EnvironmentSpec& env, double time) {
    const int n = env.size();
    Vector amps = Vector::Ones(1);
    for (int k = 0; k < n; ++k) {
        Vector next(amps.size() * 2);
        for (Index i = 0; i < amps.size(); ++i) {
            next[2 * i] = amps[i] * env.alphas[k];
            next[2 * i + 1] = amps[i] * env.betas[k];
        }
        amps = std::move(next);
    }
    std::vector<std::string> labels;
    labels.reserve(n);
    for (int k = 1; k <= n; ++k) labels.push_back(environment_label(k));
    return {SubsystemLayout::qubits(labels), std::move(amps), time, true};
}

StateVector couple_environment_dense(const StateVector& psi_sa, const EnvironmentSpec& env,
                                     double dt, int dense_limit) {
    if (psi_sa.layout() != SubsystemLayout::qubits({kSystemLabel, kPointerLabel}))
        throw std::invalid_argument("expected a system-apparatus state on layout s(2) x a(2), got " +
                                    psi_sa.layout().describe());
    const int n = env.size();
    if (n + 2 > dense_limit) throw DenseLimitExceeded(n + 2, dense_limit);

    StateVector full = tensor_product(psi_sa, environment_start(env, psi_sa.time()));

    // H_ae is diagonal: basis energy -s_a * sum_k g_k s_k with s = +1 for an
    // "up" bit.  Evolution multiplies each amplitude by exp(-i E dt).
    const Index env_dim = Index(1) << n;
    RealVector branch_sum(env_dim);  // sum_k g_k s_k per environment index
    branch_sum[0] = env.couplings.sum();
    for (Index e = 1; e < env_dim; ++e) {
        const int low = std::countr_zero(static_cast<unsigned long long>(e));
        // bit position `low` counts from the rightmost (fastest) environment qubit
        branch_sum[e] = branch_sum[e & (e - 1)] - 2.0 * env.couplings[n - 1 - low];
    }
    Vector phase_up(env_dim);  // apparatus U: E = -sum, phase exp(+i sum dt)
    for (Index e = 0; e < env_dim; ++e) phase_up[e] = std::polar(1.0, branch_sum[e] * dt);

    Vector amps = full.amplitudes();
    for (Index sa = 0; sa < 4; ++sa) {
        const bool pointer_down = (sa & 1) != 0;  // layout is s, a, e1..eN
        for (Index e = 0; e < env_dim; ++e) {
            const complex_t ph = pointer_down ? std::conj(phase_up[e]) : phase_up[e];
            amps[sa * env_dim + e] *= ph;
        }
    }
    return {full.layout(), std::move(amps), psi_sa.time() + dt, full.normalized()};
}

complex_t correlation_amplitude(const EnvironmentSpec& env, double dt, Backend backend,
                                int dense_limit) {
    if (backend == Backend::product) {
        complex_t z = 1.0;
        for (Index k = 0; k < env.couplings.size(); ++k) {
            const double delta = std::norm(env.alphas[k]) - std::norm(env.betas[k]);
            const double c = 2.0 * env.couplings[k] * dt;
            z *= complex_t(std::cos(c), delta * std::sin(c));
        }
        return z;
    }

    // Dense route: run the actual pipeline and contract the branch environment
    // states out of the full statevector.
    const int n = env.size();
    if (n + 2 > dense_limit) throw DenseLimitExceeded(n + 2, dense_limit);
    const double r = 1.0 / std::numbers::sqrt2;
    ToyModelConfig cfg(r, r, 1.0, env);
    StateVector coupled = couple_environment_dense(premeasure(cfg), env, dt, dense_limit);

    const Index env_dim = Index(1) << n;
    const auto& amps = coupled.amplitudes();
    // Branch blocks: (s,a) = (u,U) at offset 0, (d,D) at offset 3*env_dim.
    Vector eps_u = amps.segment(0, env_dim) / cfg.a;
    Vector eps_d = amps.segment(3 * env_dim, env_dim) / cfg.b;
    return eps_d.dot(eps_u);  // D branch in the bra
}

double time_averaged_overlap(const EnvironmentSpec& env) {
    double avg = 1.0;
    for (Index k = 0; k < env.couplings.size(); ++k) {
        const double delta = std::norm(env.alphas[k]) - std::norm(env.betas[k]);
        avg *= 0.5 * (1.0 + delta * delta);
    }
    return avg;
}

std::optional<double> recurrence_search(const EnvironmentSpec& env, double threshold,
                                        double t_max, double dt) {
    if (!(threshold > 0.0 && threshold < 1.0))
        throw std::invalid_argument("recurrence threshold must lie in (0, 1)");
    if (!(dt > 0.0)) throw std::invalid_argument("recurrence scan step must be positive");
    bool decayed = false;
    double first_beyond_dt = -1.0;
    for (long i = 1; i * dt <= t_max; ++i) {
        const double t = i * dt;
        const double mag = std::abs(correlation_amplitude(env, t, Backend::product));
        if (first_beyond_dt < 0.0 && i >= 2) first_beyond_dt = t;
        if (!decayed) {
            if (mag < threshold) decayed = true;
        } else if (mag >= threshold) {
            return t;
        }
    }
    // |z| never left the threshold band: every sample recurs trivially, so the
    // smallest sampled t beyond the first step qualifies.
    if (!decayed && first_beyond_dt > 0.0) return first_beyond_dt;
    return std::nullopt;
}

}  // namespace tsvf
