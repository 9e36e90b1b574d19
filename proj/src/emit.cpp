#include "tsvf/emit.hpp"

#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>

namespace tsvf {

namespace {

std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (const char ch : s) {
        switch (ch) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(ch) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x",
                                  static_cast<unsigned>(static_cast<unsigned char>(ch)));
                    out += buf;
                } else {
                    out += ch;
                }
        }
    }
    return out;
}

std::string jstr(const std::string& s) { return "\"" + json_escape(s) + "\""; }

std::string jcomplex(complex_t z) {
    return "[" + format_double(z.real()) + ", " + format_double(z.imag()) + "]";
}

std::string jcvec(const Vector& v) {
    std::string out = "[";
    for (Index i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        out += jcomplex(v[i]);
    }
    return out + "]";
}

std::string jrvec(const RealVector& v) {
    std::string out = "[";
    for (Index i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        out += format_double(v[i]);
    }
    return out + "]";
}

// Ordered key/value pairs of pre-rendered JSON fragments.
using Fields = std::vector<std::pair<std::string, std::string>>;

std::string jobject(const Fields& fields, const std::string& indent) {
    std::string out = "{\n";
    const std::string inner = indent + "  ";
    for (size_t i = 0; i < fields.size(); ++i) {
        out += inner + jstr(fields[i].first) + ": " + fields[i].second;
        if (i + 1 < fields.size()) out += ",";
        out += "\n";
    }
    return out + indent + "}";
}

std::string render_environment(const EnvironmentSpec& env) {
    Vector alphas = env.alphas, betas = env.betas;
    return "{\"couplings\": " + jrvec(env.couplings) + ", \"alphas\": " + jcvec(alphas) +
           ", \"betas\": " + jcvec(betas) + "}";
}

std::string render_params(const ScenarioParams& params) {
    Fields f;
    if (const auto* p = std::get_if<ToyDecoherenceParams>(&params)) {
        f = {{"a", jcomplex(p->a)},       {"b", jcomplex(p->b)},
             {"g", format_double(p->g)},  {"t_max", format_double(p->t_max)},
             {"dt", format_double(p->dt)}, {"env", render_environment(p->env)}};
    } else if (const auto* p = std::get_if<TwoTimeReductionParams>(&params)) {
        f = {{"a", jcomplex(p->a)},
             {"b", jcomplex(p->b)},
             {"g", format_double(p->g)},
             {"c", jcomplex(p->c)},
             {"d", jcomplex(p->d)},
             {"sampled", p->sampled ? "true" : "false"},
             {"fixed_state", std::to_string(p->fixed_state)},
             {"tau_max", format_double(p->tau_max)},
             {"dt", format_double(p->dt)},
             {"threshold", format_double(p->threshold)},
             {"env", render_environment(p->env)}};
    } else if (const auto* p = std::get_if<TeleoEnsembleParams>(&params)) {
        f = {{"a", jcomplex(p->a)},
             {"b", jcomplex(p->b)},
             {"trials", std::to_string(p->trials)}};
    } else if (const auto* p = std::get_if<AblTableParams>(&params)) {
        f = {{"psi_i", jcvec(p->psi_i)}, {"psi_f", jcvec(p->psi_f)}};
        if (p->explicit_obs) {
            std::string vectors = "[";
            for (Index k = 0; k < p->eigenvectors.cols(); ++k) {
                if (k) vectors += ", ";
                vectors += jcvec(p->eigenvectors.col(k));
            }
            vectors += "]";
            f.emplace_back("observable", "{\"eigenvalues\": " + jrvec(p->eigenvalues) +
                                             ", \"eigenvectors\": " + vectors + "}");
        } else {
            f.emplace_back("observable", jstr(std::string("sigma_") + p->pauli_axis));
        }
    } else if (const auto* p = std::get_if<WeakSweepParams>(&params)) {
        f = {{"eigenvalues", jrvec(p->eigenvalues)},
             {"c", jcvec(p->c)},
             {"c_prime", jcvec(p->c_prime)},
             {"sigmas", jrvec(p->sigmas)},
             {"grid_points", std::to_string(p->grid_points)}};
    } else if (const auto* p = std::get_if<SignalingParams>(&params)) {
        f = {{"flip_left", p->flip_left ? "true" : "false"}};
    } else if (const auto* p = std::get_if<BenchmarkParams>(&params)) {
        f = {{"n_min", std::to_string(p->n_min)}, {"n_max", std::to_string(p->n_max)}};
    }
    return jobject(f, "    ");
}

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (const char ch : s) {
        out += ch;
        if (ch == '"') out += '"';
    }
    return out + "\"";
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << content;
    if (!out) throw std::runtime_error("failed writing " + path);
}

std::string render_provenance(const Provenance& prov, const std::string& indent) {
    return jobject({{"seed", std::to_string(prov.seed)},
                    {"backend", jstr(prov.backend)},
                    {"version", jstr(prov.version)},
                    {"timestamp", jstr(prov.timestamp)}},
                   indent);
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string render_cell(const Cell& cell) {
    if (const auto* i = std::get_if<int64_t>(&cell)) return std::to_string(*i);
    if (const auto* u = std::get_if<uint64_t>(&cell)) return std::to_string(*u);
    if (const auto* d = std::get_if<double>(&cell)) return format_double(*d);
    return std::get<std::string>(cell);
}

Provenance make_provenance(const ScenarioConfig& cfg) {
    Provenance prov;
    prov.seed = cfg.seed;
    prov.backend = to_string(cfg.backend);
    prov.version = kVersion;
    const std::time_t now = std::time(nullptr);
    std::tm utc{};
    gmtime_r(&now, &utc);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &utc);
    prov.timestamp = buf;
    return prov;
}

std::string render_csv(const Table& table) {
    std::string out;
    for (size_t i = 0; i < table.columns.size(); ++i) {
        if (i) out += ",";
        out += csv_quote(table.columns[i]);
    }
    out += "\n";
    for (const auto& row : table.rows) {
        for (size_t i = 0; i < row.size(); ++i) {
            if (i) out += ",";
            const std::string cell = render_cell(row[i]);
            out += std::holds_alternative<std::string>(row[i]) ? csv_quote(cell) : cell;
        }
        out += "\n";
    }
    return out;
}

std::string render_json(const ResultSet& rs, const Provenance& prov) {
    std::string out = "{\n  \"scenario\": ";
    out += jobject({{"kind", jstr(to_string(rs.config.kind))},
                    {"seed", std::to_string(rs.config.seed)},
                    {"backend", jstr(to_string(rs.config.backend))},
                    {"parameters", render_params(rs.config.params)}},
                   "  ");
    out += ",\n  \"tables\": [\n";
    for (size_t t = 0; t < rs.tables.size(); ++t) {
        const Table& table = rs.tables[t];
        out += "    {\n      \"name\": " + jstr(table.name) + ",\n      \"columns\": [";
        for (size_t i = 0; i < table.columns.size(); ++i) {
            if (i) out += ", ";
            out += jstr(table.columns[i]);
        }
        out += "],\n      \"rows\": [\n";
        for (size_t r = 0; r < table.rows.size(); ++r) {
            out += "        [";
            const auto& row = table.rows[r];
            for (size_t i = 0; i < row.size(); ++i) {
                if (i) out += ", ";
                out += std::holds_alternative<std::string>(row[i]) ? jstr(render_cell(row[i]))
                                                                   : render_cell(row[i]);
            }
            out += "]";
            if (r + 1 < table.rows.size()) out += ",";
            out += "\n";
        }
        out += "      ]\n    }";
        if (t + 1 < rs.tables.size()) out += ",";
        out += "\n";
    }
    out += "  ],\n  \"summary\": ";
    Fields summary;
    summary.reserve(rs.summary.size());
    for (const auto& [key, cell] : rs.summary)
        summary.emplace_back(key, std::holds_alternative<std::string>(cell)
                                      ? jstr(render_cell(cell))
                                      : render_cell(cell));
    out += jobject(summary, "  ");
    out += ",\n  \"provenance\": " + render_provenance(prov, "  ");
    out += "\n}\n";
    return out;
}

std::vector<std::string> emit(const ResultSet& rs, EmitFormat format, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    const Provenance prov = make_provenance(rs.config);
    std::vector<std::string> written;

    if (format == EmitFormat::json) {
        const std::string path = (fs::path(out_dir) / "results.json").string();
        write_file(path, render_json(rs, prov));
        written.push_back(path);
        return written;
    }

    for (const Table& table : rs.tables) {
        const std::string path = (fs::path(out_dir) / (table.name + ".csv")).string();
        write_file(path, render_csv(table));
        written.push_back(path);
    }
    Table summary{"summary", {"key", "value"}, {}};
    for (const auto& [key, cell] : rs.summary) summary.rows.push_back({key, render_cell(cell)});
    const std::string summary_path = (fs::path(out_dir) / "summary.csv").string();
    write_file(summary_path, render_csv(summary));
    written.push_back(summary_path);

    const std::string prov_path = (fs::path(out_dir) / "provenance.json").string();
    write_file(prov_path, render_provenance(prov, "") + "\n");
    written.push_back(prov_path);
    return written;
}

}  // namespace tsvf
