#include "tsvf/scenario.hpp"

#include <cmath>
#include <set>

#include "json.hpp"

namespace tsvf {

using nlohmann::json;

std::string to_string(ScenarioKind kind) {
    switch (kind) {
        case ScenarioKind::toy_decoherence: return "toy_decoherence";
        case ScenarioKind::two_time_reduction: return "two_time_reduction";
        case ScenarioKind::teleo_ensemble: return "teleo_ensemble";
        case ScenarioKind::abl_table: return "abl_table";
        case ScenarioKind::weak_sweep: return "weak_sweep";
        case ScenarioKind::signaling_demo: return "signaling_demo";
        case ScenarioKind::benchmark: return "benchmark";
    }
    return "?";
}

std::string to_string(BackendMode backend) {
    switch (backend) {
        case BackendMode::dense: return "dense";
        case BackendMode::product: return "product";
        case BackendMode::both: return "both";
    }
    return "?";
}

namespace {

const std::vector<std::pair<std::string, ScenarioKind>> kKinds = {
    {"toy_decoherence", ScenarioKind::toy_decoherence},
    {"two_time_reduction", ScenarioKind::two_time_reduction},
    {"teleo_ensemble", ScenarioKind::teleo_ensemble},
    {"abl_table", ScenarioKind::abl_table},
    {"weak_sweep", ScenarioKind::weak_sweep},
    {"signaling_demo", ScenarioKind::signaling_demo},
    {"benchmark", ScenarioKind::benchmark},
};

// Reads typed parameter values out of one JSON object, recording every
// problem (prefixed with "parameters.<key>") and every key it consumed so the
// leftover-key sweep can flag typos.
class Reader {
public:
    Reader(const json& obj, std::vector<std::string>& errors) : obj_(obj), errors_(errors) {}

    bool has(const std::string& key) {
        if (obj_.contains(key)) {
            used_.insert(key);
            return true;
        }
        return false;
    }

    void fail(const std::string& key, const std::string& what) {
        errors_.push_back("parameters." + key + ": " + what);
    }

    void opt_positive(const std::string& key, double& dst) {
        if (!has(key)) return;
        const json& v = obj_.at(key);
        if (!v.is_number()) return fail(key, "expected a number");
        const double d = v.get<double>();
        if (!std::isfinite(d) || d <= 0.0) return fail(key, "expected a positive finite number");
        dst = d;
    }

    void opt_int(const std::string& key, int64_t& dst, int64_t lo, int64_t hi) {
        if (!has(key)) return;
        const json& v = obj_.at(key);
        if (!v.is_number_integer()) return fail(key, "expected an integer");
        const int64_t i = v.get<int64_t>();
        if (i < lo || i > hi)
            return fail(key, "expected an integer in [" + std::to_string(lo) + ", " +
                                 std::to_string(hi) + "], got " + std::to_string(i));
        dst = i;
    }

    void opt_bool(const std::string& key, bool& dst) {
        if (!has(key)) return;
        const json& v = obj_.at(key);
        if (!v.is_boolean()) return fail(key, "expected true or false");
        dst = v.get<bool>();
    }

    std::optional<complex_t> complex_value(const std::string& key, const json& v) {
        if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
            fail(key, "expected a complex amplitude as a [re, im] pair");
            return {};
        }
        const complex_t z(v[0].get<double>(), v[1].get<double>());
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
            fail(key, "amplitude components must be finite");
            return {};
        }
        return z;
    }

    void opt_complex(const std::string& key, complex_t& dst) {
        if (!has(key)) return;
        if (auto z = complex_value(key, obj_.at(key))) dst = *z;
    }

    // Reads an amplitude pair (each key optional, defaults kept), then
    // requires the merged pair to be unit within 1e-8 and renormalizes it.
    void amplitude_pair(const std::string& key_a, const std::string& key_b, complex_t& a,
                        complex_t& b, const std::string& what) {
        const size_t before = errors_.size();
        opt_complex(key_a, a);
        opt_complex(key_b, b);
        if (errors_.size() != before) return;
        const double n = std::sqrt(std::norm(a) + std::norm(b));
        if (std::abs(n - 1.0) > 1e-8) {
            errors_.push_back("parameters." + key_a + ", parameters." + key_b + ": " + what +
                              " have norm " + detail::fmt_g(n) + ", expected 1 within 1e-8");
            return;
        }
        a /= n;
        b /= n;
    }

    std::optional<Vector> complex_vector(const std::string& key, bool required) {
        if (!has(key)) {
            if (required) fail(key, "required");
            return {};
        }
        const json& v = obj_.at(key);
        if (!v.is_array() || v.empty()) {
            fail(key, "expected a nonempty array of [re, im] pairs");
            return {};
        }
        Vector out(static_cast<Index>(v.size()));
        for (size_t i = 0; i < v.size(); ++i) {
            auto z = complex_value(key + "[" + std::to_string(i) + "]", v[i]);
            if (!z) return {};
            out[static_cast<Index>(i)] = *z;
        }
        return out;
    }

    std::optional<RealVector> real_vector(const std::string& key, bool required) {
        if (!has(key)) {
            if (required) fail(key, "required");
            return {};
        }
        const json& v = obj_.at(key);
        if (!v.is_array() || v.empty()) {
            fail(key, "expected a nonempty array of numbers");
            return {};
        }
        RealVector out(static_cast<Index>(v.size()));
        for (size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number() || !std::isfinite(v[i].get<double>())) {
                fail(key + "[" + std::to_string(i) + "]", "expected a finite number");
                return {};
            }
            out[static_cast<Index>(i)] = v[i].get<double>();
        }
        return out;
    }

    // Unit-norm check at 1e-8 followed by exact renormalization.
    void require_unit(const std::string& key, Vector& v) {
        const double n = v.norm();
        if (std::abs(n - 1.0) > 1e-8) {
            fail(key, "state has norm " + detail::fmt_g(n) + ", expected 1 within 1e-8");
            return;
        }
        v /= n;
    }

    // Environment: the string shorthand "primes:N" or an explicit object with
    // couplings/alphas/betas.  Per-particle amplitude pairs are unit within
    // 1e-8 and renormalized.
    std::optional<EnvironmentSpec> environment(const std::string& key) {
        if (!has(key)) {
            fail(key, "required (either \"primes:N\" or an explicit object)");
            return {};
        }
        const json& v = obj_.at(key);
        if (v.is_string()) {
            const std::string s = v.get<std::string>();
            const std::string tag = "primes:";
            if (s.rfind(tag, 0) != 0) {
                fail(key, "unknown environment shorthand '" + s + "' (expected \"primes:N\")");
                return {};
            }
            int n = 0;
            try {
                size_t eaten = 0;
                n = std::stoi(s.substr(tag.size()), &eaten);
                if (eaten != s.size() - tag.size()) throw std::invalid_argument("");
            } catch (const std::exception&) {
                fail(key, "malformed particle count in '" + s + "'");
                return {};
            }
            if (n < 1 || n > 100000) {
                fail(key, "particle count must lie in [1, 100000]");
                return {};
            }
            return EnvironmentSpec::prime_root(n);
        }
        if (!v.is_object()) {
            fail(key, "expected \"primes:N\" or an object with couplings/alphas/betas");
            return {};
        }

        std::vector<std::string> sub_errors;
        Reader env_reader(v, sub_errors);
        auto couplings = env_reader.real_vector("couplings", true);
        auto alphas = env_reader.complex_vector("alphas", true);
        auto betas = env_reader.complex_vector("betas", true);
        env_reader.sweep_unknown_keys("environment object");
        for (const auto& e : sub_errors) errors_.push_back("parameters." + key + "." + e);
        if (!couplings || !alphas || !betas || !sub_errors.empty()) return {};

        const Index n = couplings->size();
        if (alphas->size() != n || betas->size() != n) {
            fail(key, "couplings, alphas and betas must have the same length");
            return {};
        }
        bool ok = true;
        for (Index k = 0; k < n; ++k) {
            if (!std::isfinite((*couplings)[k]) || (*couplings)[k] == 0.0) {
                fail(key + ".couplings[" + std::to_string(k) + "]",
                     "couplings must be finite and nonzero");
                ok = false;
            }
            const double nk = std::sqrt(std::norm((*alphas)[k]) + std::norm((*betas)[k]));
            if (std::abs(nk - 1.0) > 1e-8) {
                fail(key + ".alphas/betas[" + std::to_string(k) + "]",
                     "particle amplitudes have norm " + detail::fmt_g(nk) +
                         ", expected 1 within 1e-8");
                ok = false;
                continue;
            }
            (*alphas)[k] /= nk;
            (*betas)[k] /= nk;
        }
        if (!ok) return {};
        return EnvironmentSpec(std::move(*couplings), std::move(*alphas), std::move(*betas));
    }

    void sweep_unknown_keys(const std::string& where) {
        for (const auto& item : obj_.items())
            if (!used_.count(item.key()))
                errors_.push_back("unknown key '" + item.key() + "' in " + where);
    }

    const json& raw(const std::string& key) { return obj_.at(key); }
    std::vector<std::string>& errors() { return errors_; }

private:
    const json& obj_;
    std::vector<std::string>& errors_;
    std::set<std::string> used_;
};

std::optional<ScenarioParams> parse_toy_decoherence(const json& obj,
                                                    std::vector<std::string>& errors) {
    Reader r(obj, errors);
    complex_t a = kInvSqrt2, b = kInvSqrt2;
    double g = 1.0, t_max = 20.0, dt = 0.05;
    r.amplitude_pair("a", "b", a, b, "system amplitudes");
    r.opt_positive("g", g);
    r.opt_positive("t_max", t_max);
    r.opt_positive("dt", dt);
    if (dt > t_max) r.fail("dt", "scan step must not exceed t_max");
    auto env = r.environment("env");
    r.sweep_unknown_keys("toy_decoherence parameters");
    if (!env) return {};
    return ToyDecoherenceParams{a, b, g, t_max, dt, std::move(*env)};
}

std::optional<ScenarioParams> parse_two_time_reduction(const json& obj,
                                                       std::vector<std::string>& errors) {
    Reader r(obj, errors);
    complex_t a = kInvSqrt2, b = kInvSqrt2, c = kInvSqrt2, d = kInvSqrt2;
    double g = 1.0, tau_max = 10.0, dt = 0.05, threshold = 0.05;
    bool sampled = false;
    int64_t fixed_state = 0;
    r.amplitude_pair("a", "b", a, b, "system amplitudes");
    r.amplitude_pair("c", "d", c, d, "future system state components");
    r.opt_positive("g", g);
    r.opt_bool("sampled", sampled);
    r.opt_int("fixed_state", fixed_state, 0, 1);
    r.opt_positive("tau_max", tau_max);
    r.opt_positive("dt", dt);
    if (dt > tau_max) r.fail("dt", "scan step must not exceed tau_max");
    r.opt_positive("threshold", threshold);
    if (threshold >= 1.0) r.fail("threshold", "reduction threshold must lie in (0, 1)");
    auto env = r.environment("env");
    r.sweep_unknown_keys("two_time_reduction parameters");
    if (!env) return {};
    return TwoTimeReductionParams{a,  b,  g,         c,  static_cast<complex_t>(d), sampled,
                                  static_cast<int>(fixed_state), tau_max, dt, threshold,
                                  std::move(*env)};
}

std::optional<ScenarioParams> parse_teleo_ensemble(const json& obj,
                                                   std::vector<std::string>& errors) {
    Reader r(obj, errors);
    TeleoEnsembleParams p;
    r.amplitude_pair("a", "b", p.a, p.b, "branch amplitudes");
    r.opt_int("trials", p.trials, 1, 10000000);
    r.sweep_unknown_keys("teleo_ensemble parameters");
    return p;
}

std::optional<ScenarioParams> parse_abl_table(const json& obj, std::vector<std::string>& errors) {
    Reader r(obj, errors);
    auto psi_i = r.complex_vector("psi_i", true);
    auto psi_f = r.complex_vector("psi_f", true);

    char axis = 'z';
    bool explicit_obs = false;
    RealVector eigenvalues;
    Matrix eigenvectors;
    if (r.has("observable")) {
        const json& v = r.raw("observable");
        if (v.is_string()) {
            const std::string s = v.get<std::string>();
            if (s == "sigma_x") axis = 'x';
            else if (s == "sigma_y") axis = 'y';
            else if (s == "sigma_z") axis = 'z';
            else r.fail("observable", "unknown observable '" + s +
                                          "' (sigma_x, sigma_y, sigma_z, or an explicit object)");
        } else if (v.is_object()) {
            explicit_obs = true;
            std::vector<std::string> sub;
            Reader ob(v, sub);
            auto values = ob.real_vector("eigenvalues", true);
            std::optional<Matrix> vectors;
            if (ob.has("eigenvectors")) {
                const json& w = ob.raw("eigenvectors");
                if (!w.is_array() || w.empty()) {
                    ob.fail("eigenvectors", "expected an array of eigenvectors");
                } else {
                    Matrix m(static_cast<Index>(w.size()), static_cast<Index>(w.size()));
                    bool ok = true;
                    for (size_t k = 0; k < w.size() && ok; ++k) {
                        std::string kk = "eigenvectors[" + std::to_string(k) + "]";
                        if (!w[k].is_array() || w[k].size() != w.size()) {
                            ob.fail(kk, "each eigenvector must have the full dimension " +
                                            std::to_string(w.size()));
                            ok = false;
                            break;
                        }
                        for (size_t i = 0; i < w[k].size(); ++i) {
                            auto z = ob.complex_value(kk + "[" + std::to_string(i) + "]", w[k][i]);
                            if (!z) { ok = false; break; }
                            m(static_cast<Index>(i), static_cast<Index>(k)) = *z;  // column k
                        }
                    }
                    if (ok) vectors = std::move(m);
                }
            } else {
                ob.fail("eigenvectors", "required");
            }
            ob.sweep_unknown_keys("observable object");
            for (const auto& e : sub) errors.push_back("parameters.observable." + e);
            if (values && vectors && sub.empty()) {
                if (values->size() != vectors->cols()) {
                    r.fail("observable", "eigenvalue count must match the eigenvector count");
                } else {
                    const Index n = vectors->cols();
                    const double defect = (vectors->adjoint() * *vectors -
                                           Matrix::Identity(n, n)).cwiseAbs().maxCoeff();
                    if (defect > 1e-10)
                        r.fail("observable.eigenvectors", "not orthonormal (defect " +
                                                              detail::fmt_g(defect) + ")");
                    eigenvalues = std::move(*values);
                    eigenvectors = std::move(*vectors);
                }
            }
        } else {
            r.fail("observable", "expected a string name or an explicit eigensystem object");
        }
    }
    r.sweep_unknown_keys("abl_table parameters");
    if (!psi_i || !psi_f) return {};

    AblTableParams p;
    if (psi_i->size() != psi_f->size()) {
        errors.push_back("parameters.psi_i, parameters.psi_f: boundary states must have the "
                         "same dimension");
        return {};
    }
    if (psi_i->size() < 2) {
        errors.push_back("parameters.psi_i: boundary states need dimension >= 2");
        return {};
    }
    if (!explicit_obs && psi_i->size() != 2) {
        errors.push_back("parameters.observable: named Pauli observables need dimension 2");
        return {};
    }
    if (explicit_obs && eigenvalues.size() != 0 && eigenvalues.size() != psi_i->size()) {
        errors.push_back("parameters.observable: eigensystem dimension must match the states");
        return {};
    }
    p.psi_i = std::move(*psi_i);
    p.psi_f = std::move(*psi_f);
    r.require_unit("psi_i", p.psi_i);
    r.require_unit("psi_f", p.psi_f);
    p.pauli_axis = axis;
    p.explicit_obs = explicit_obs;
    p.eigenvalues = std::move(eigenvalues);
    p.eigenvectors = std::move(eigenvectors);
    return p;
}

std::optional<ScenarioParams> parse_weak_sweep(const json& obj, std::vector<std::string>& errors) {
    Reader r(obj, errors);
    auto eigenvalues = r.real_vector("eigenvalues", true);
    auto c = r.complex_vector("c", true);
    auto c_prime = r.complex_vector("c_prime", true);
    auto sigmas = r.real_vector("sigmas", true);
    int64_t grid_points = 4096;
    r.opt_int("grid_points", grid_points, 1024, 10000000);
    r.sweep_unknown_keys("weak_sweep parameters");
    if (!eigenvalues || !c || !c_prime || !sigmas) return {};

    WeakSweepParams p;
    if (c->size() != eigenvalues->size() || c_prime->size() != eigenvalues->size()) {
        errors.push_back(
            "parameters.c, parameters.c_prime: component counts must match the eigenvalues");
        return {};
    }
    for (Index i = 0; i < sigmas->size(); ++i)
        if (!((*sigmas)[i] > 0.0)) {
            errors.push_back("parameters.sigmas[" + std::to_string(i) + "]: widths must be positive");
            return {};
        }
    p.eigenvalues = std::move(*eigenvalues);
    p.c = std::move(*c);
    p.c_prime = std::move(*c_prime);
    r.require_unit("c", p.c);
    r.require_unit("c_prime", p.c_prime);
    p.sigmas = std::move(*sigmas);
    p.grid_points = static_cast<Index>(grid_points);
    return p;
}

std::optional<ScenarioParams> parse_signaling(const json& obj, std::vector<std::string>& errors) {
    Reader r(obj, errors);
    SignalingParams p;
    r.opt_bool("flip_left", p.flip_left);
    r.sweep_unknown_keys("signaling_demo parameters");
    return p;
}

std::optional<ScenarioParams> parse_benchmark(const json& obj, std::vector<std::string>& errors) {
    Reader r(obj, errors);
    BenchmarkParams p;
    int64_t n_min = p.n_min, n_max = p.n_max;
    r.opt_int("n_min", n_min, 1, 100000);
    r.opt_int("n_max", n_max, 1, 100000);
    if (n_max < n_min) r.fail("n_max", "must be >= n_min");
    r.sweep_unknown_keys("benchmark parameters");
    p.n_min = static_cast<int>(n_min);
    p.n_max = static_cast<int>(n_max);
    return p;
}

}  // namespace

ParseResult parse_scenario(const std::string& text) {
    ParseResult out;
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        std::string msg = e.what();
        const auto pos = msg.find("parse error");
        out.errors.push_back(pos == std::string::npos ? msg : msg.substr(pos));
        return out;
    }
    if (!doc.is_object()) {
        out.errors.push_back("top level must be a JSON object");
        return out;
    }

    static const std::set<std::string> kTopKeys = {"kind", "seed", "backend", "parameters"};
    for (const auto& item : doc.items())
        if (!kTopKeys.count(item.key()))
            out.errors.push_back("unknown key '" + item.key() + "' at top level");

    std::optional<ScenarioKind> kind;
    if (!doc.contains("kind")) {
        out.errors.push_back("missing required key 'kind'");
    } else if (!doc["kind"].is_string()) {
        out.errors.push_back("kind: expected a string");
    } else {
        const std::string name = doc["kind"].get<std::string>();
        for (const auto& [label, value] : kKinds)
            if (label == name) kind = value;
        if (!kind) {
            std::string valid;
            for (const auto& [label, value] : kKinds) {
                if (!valid.empty()) valid += ", ";
                valid += label;
            }
            out.errors.push_back("kind: unknown scenario kind '" + name + "' (valid: " + valid +
                                 ")");
        }
    }

    uint64_t seed = 0;
    if (doc.contains("seed")) {
        const json& s = doc["seed"];
        if (s.is_number_unsigned()) seed = s.get<uint64_t>();
        else if (s.is_number_integer()) out.errors.push_back("seed: must be non-negative");
        else out.errors.push_back("seed: expected an unsigned integer");
    }

    BackendMode backend = BackendMode::product;
    if (doc.contains("backend")) {
        if (!doc["backend"].is_string()) {
            out.errors.push_back("backend: expected \"dense\", \"product\" or \"both\"");
        } else {
            const std::string b = doc["backend"].get<std::string>();
            if (b == "dense") backend = BackendMode::dense;
            else if (b == "product") backend = BackendMode::product;
            else if (b == "both") backend = BackendMode::both;
            else out.errors.push_back("backend: unknown backend '" + b +
                                      "' (valid: dense, product, both)");
        }
    }

    json params = json::object();
    if (doc.contains("parameters")) {
        if (!doc["parameters"].is_object())
            out.errors.push_back("parameters: expected an object");
        else
            params = doc["parameters"];
    }

    if (!kind) return out;

    std::optional<ScenarioParams> parsed;
    switch (*kind) {
        case ScenarioKind::toy_decoherence: parsed = parse_toy_decoherence(params, out.errors); break;
        case ScenarioKind::two_time_reduction:
            parsed = parse_two_time_reduction(params, out.errors);
            break;
        case ScenarioKind::teleo_ensemble: parsed = parse_teleo_ensemble(params, out.errors); break;
        case ScenarioKind::abl_table: parsed = parse_abl_table(params, out.errors); break;
        case ScenarioKind::weak_sweep: parsed = parse_weak_sweep(params, out.errors); break;
        case ScenarioKind::signaling_demo: parsed = parse_signaling(params, out.errors); break;
        case ScenarioKind::benchmark: parsed = parse_benchmark(params, out.errors); break;
    }

    if (!out.errors.empty() || !parsed) return out;
    out.config = ScenarioConfig{*kind, seed, backend, std::move(*parsed)};
    return out;
}

}  // namespace tsvf
