#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tsvf/decoherence.hpp"
#include "tsvf/weakmeas.hpp"

// Declarative scenario configs: a JSON document names one scenario kind plus
// its parameters, and parsing either yields a fully validated config or the
// complete list of problems (never just the first).  Complex amplitudes are
// written as [re, im] pairs; pair fields like (a, b) must be normalized
// within 1e-8 and are renormalized exactly before use.

namespace tsvf {

inline constexpr double kInvSqrt2 = 0.70710678118654752440;

enum class ScenarioKind {
    toy_decoherence,
    two_time_reduction,
    teleo_ensemble,
    abl_table,
    weak_sweep,
    signaling_demo,
    benchmark,
};

enum class BackendMode { dense, product, both };

std::string to_string(ScenarioKind kind);
std::string to_string(BackendMode backend);

// Correlation-amplitude series z(t) for t = 0, dt, ..., t_max.
struct ToyDecoherenceParams {
    complex_t a = kInvSqrt2;
    complex_t b = kInvSqrt2;
    double g = 1.0;
    double t_max = 20.0;
    double dt = 0.05;
    EnvironmentSpec env;
};

// Pointer off-diagonal decay after an assigned future boundary, scanned over
// the environment coupling time tau.
struct TwoTimeReductionParams {
    complex_t a = kInvSqrt2;
    complex_t b = kInvSqrt2;
    double g = 1.0;
    complex_t c = kInvSqrt2;  // future system state phi = c|up> + d|down>
    complex_t d = kInvSqrt2;
    bool sampled = false;
    int fixed_state = 0;
    double tau_max = 10.0;
    double dt = 0.05;
    double threshold = 0.05;
    EnvironmentSpec env;
};

// Repeated sampled boundary assignments; frequencies against |a|^2.
struct TeleoEnsembleParams {
    complex_t a = kInvSqrt2;
    complex_t b = kInvSqrt2;
    int64_t trials = 10000;
};

// Conditional vs forward-only outcome table for one observable.
struct AblTableParams {
    Vector psi_i;
    Vector psi_f;
    char pauli_axis = 'z';
    bool explicit_obs = false;
    RealVector eigenvalues;
    Matrix eigenvectors;
};

// Weak-value pointer readout over a ladder of widths.
struct WeakSweepParams {
    RealVector eigenvalues;
    Vector c;
    Vector c_prime;
    RealVector sigmas;
    Index grid_points = 4096;
};

struct SignalingParams {
    bool flip_left = false;
};

// Product- vs dense-backend timing; the one scenario whose numbers are not
// reproducible byte-for-byte.
struct BenchmarkParams {
    int n_min = 1000;
    int n_max = 10000;
};

using ScenarioParams =
    std::variant<ToyDecoherenceParams, TwoTimeReductionParams, TeleoEnsembleParams, AblTableParams,
                 WeakSweepParams, SignalingParams, BenchmarkParams>;

struct ScenarioConfig {
    ScenarioKind kind;
    uint64_t seed = 0;
    BackendMode backend = BackendMode::product;
    ScenarioParams params;
};

struct ParseResult {
    std::optional<ScenarioConfig> config;
    std::vector<std::string> errors;

    bool ok() const { return config.has_value() && errors.empty(); }
};

ParseResult parse_scenario(const std::string& text);

}  // namespace tsvf
