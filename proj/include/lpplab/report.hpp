#pragma once

// Experiment bookkeeping: key=value configs with strict key validation,
// verdicts with signed margins, long-format point records, and JSON/CSV
// persistence with configurable collision handling.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace lpplab {

inline constexpr std::uint64_t default_master_seed = 1;

// A single pass/fail gate.  margin is the raw slack in the gate's native
// units: margin >= 0 is exactly "pass", and its size says how comfortably.
struct verdict {
    std::string id;
    bool pass = false;
    bool skipped = false;
    double margin = 0.0;
    std::string detail;
};

// One row of the long-format output table.
struct point_record {
    std::string experiment;
    double n = 0.0; // grid size or sample length, 0 when not applicable
    std::string param;
    std::string statistic;
    double value = 0.0;
    double lo = 0.0, hi = 0.0; // confidence bounds, value +- when not bootstrapped
    std::uint64_t replicas = 0;
    std::uint64_t seed = 0;
};

struct experiment_result {
    std::string name;
    std::map<std::string, std::string> config_used; // defaults filled in
    std::vector<verdict> verdicts;
    std::vector<point_record> points;
    std::vector<std::pair<std::string, double>> scalars;
    double wall_seconds = 0.0;
    std::uint64_t total_replicas = 0;

    void gate(const std::string& id, double margin, const std::string& detail) {
        verdicts.push_back({id, margin >= 0.0, false, margin, detail});
    }

    void skip(const std::string& id, const std::string& reason) {
        verdicts.push_back({id, false, true, 0.0, "skipped: " + reason});
    }

    void scalar(const std::string& key, double value) { scalars.emplace_back(key, value); }

    bool all_pass() const {
        for (const verdict& v : verdicts)
            if (!v.skipped && !v.pass) return false;
        return true;
    }

    const verdict& find(const std::string& id) const {
        for (const verdict& v : verdicts)
            if (v.id == id) return v;
        throw std::out_of_range("experiment_result: no verdict named " + id);
    }
};

// ----- key=value configuration --------------------------------------------

// Flat string config.  Every key an experiment may read is declared up
// front; unknown keys are an error rather than silently ignored, so typos
// in config files or --override flags cannot skew a run.
struct kv_config {
    std::string name;
    std::map<std::string, std::string> kv;

    bool has(const std::string& key) const { return kv.count(key) != 0; }

    std::string get_str(const std::string& key, const std::string& def) const {
        auto it = kv.find(key);
        return it == kv.end() ? def : it->second;
    }

    double get_double(const std::string& key, double def) const {
        auto it = kv.find(key);
        if (it == kv.end()) return def;
        try {
            std::size_t used = 0;
            const double v = std::stod(it->second, &used);
            if (used != it->second.size()) throw std::invalid_argument("trailing junk");
            return v;
        } catch (const std::exception&) {
            throw std::invalid_argument("config: key '" + key + "' is not a number: " + it->second);
        }
    }

    std::int64_t get_int(const std::string& key, std::int64_t def) const {
        auto it = kv.find(key);
        if (it == kv.end()) return def;
        try {
            std::size_t used = 0;
            const std::int64_t v = std::stoll(it->second, &used);
            if (used != it->second.size()) throw std::invalid_argument("trailing junk");
            return v;
        } catch (const std::exception&) {
            throw std::invalid_argument("config: key '" + key + "' is not an integer: " + it->second);
        }
    }

    std::uint64_t get_u64(const std::string& key, std::uint64_t def) const {
        auto it = kv.find(key);
        if (it == kv.end()) return def;
        try {
            std::size_t used = 0;
            const std::uint64_t v = std::stoull(it->second, &used);
            if (used != it->second.size()) throw std::invalid_argument("trailing junk");
            return v;
        } catch (const std::exception&) {
            throw std::invalid_argument("config: key '" + key + "' is not an unsigned integer: " +
                                        it->second);
        }
    }

    bool get_bool(const std::string& key, bool def) const {
        auto it = kv.find(key);
        if (it == kv.end()) return def;
        if (it->second == "true" || it->second == "1") return true;
        if (it->second == "false" || it->second == "0") return false;
        throw std::invalid_argument("config: key '" + key + "' is not a bool: " + it->second);
    }

    std::vector<double> get_dlist(const std::string& key, std::vector<double> def) const {
        auto it = kv.find(key);
        if (it == kv.end()) return def;
        std::vector<double> out;
        std::stringstream ss(it->second);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            try {
                out.push_back(std::stod(tok));
            } catch (const std::exception&) {
                throw std::invalid_argument("config: key '" + key + "' has a bad list entry: " + tok);
            }
        }
        if (out.empty()) throw std::invalid_argument("config: key '" + key + "' is an empty list");
        return out;
    }

    std::vector<std::uint64_t> get_ulist(const std::string& key, std::vector<std::uint64_t> def) const {
        auto it = kv.find(key);
        if (it == kv.end()) return def;
        std::vector<std::uint64_t> out;
        std::stringstream ss(it->second);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            try {
                out.push_back(std::stoull(tok));
            } catch (const std::exception&) {
                throw std::invalid_argument("config: key '" + key + "' has a bad list entry: " + tok);
            }
        }
        if (out.empty()) throw std::invalid_argument("config: key '" + key + "' is an empty list");
        return out;
    }

    void require_keys_in(const std::set<std::string>& allowed) const {
        for (const auto& [k, v] : kv)
            if (!allowed.count(k))
                throw std::invalid_argument("config: unknown key '" + k + "' for experiment '" +
                                            name + "'");
    }
};

// `key = value` lines, '#' comments, blank lines ignored.  A `name` key sets
// the experiment name.
inline kv_config parse_kv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path);
    kv_config cfg;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto strip = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            if (a == std::string::npos) return std::string();
            const auto b = s.find_last_not_of(" \t\r");
            return s.substr(a, b - a + 1);
        };
        const std::string body = strip(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                        " is not key = value");
        const std::string key = strip(body.substr(0, eq));
        const std::string value = strip(body.substr(eq + 1));
        if (key.empty()) throw std::invalid_argument("config: empty key on line " + std::to_string(lineno));
        if (key == "name")
            cfg.name = value;
        else
            cfg.kv[key] = value;
    }
    return cfg;
}

inline void apply_override(kv_config& cfg, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw std::invalid_argument("override must be key=value: " + assignment);
    const std::string key = assignment.substr(0, eq);
    const std::string value = assignment.substr(eq + 1);
    if (key == "name")
        cfg.name = value;
    else
        cfg.kv[key] = value;
}

// ----- persistence ---------------------------------------------------------

enum class on_existing { error, overwrite, verify };

inline on_existing parse_on_existing(const std::string& s) {
    if (s == "error") return on_existing::error;
    if (s == "overwrite") return on_existing::overwrite;
    if (s == "verify") return on_existing::verify;
    throw std::invalid_argument("on_existing must be error, overwrite, or verify: " + s);
}

inline nlohmann::json result_to_json(const experiment_result& r) {
    nlohmann::json j;
    j["schema"] = 1;
    j["experiment"] = r.name;
    j["config"] = r.config_used;
    j["wall_seconds"] = r.wall_seconds;
    j["total_replicas"] = r.total_replicas;
    j["all_pass"] = r.all_pass();
    auto& vs = j["verdicts"] = nlohmann::json::array();
    for (const verdict& v : r.verdicts)
        vs.push_back({{"id", v.id},
                      {"pass", v.pass},
                      {"skipped", v.skipped},
                      {"margin", v.margin},
                      {"detail", v.detail}});
    auto& sc = j["scalars"] = nlohmann::json::object();
    for (const auto& [k, v] : r.scalars) sc[k] = v;
    auto& ps = j["points"] = nlohmann::json::array();
    for (const point_record& p : r.points)
        ps.push_back({{"experiment", p.experiment},
                      {"N", p.n},
                      {"param", p.param},
                      {"statistic", p.statistic},
                      {"value", p.value},
                      {"lo", p.lo},
                      {"hi", p.hi},
                      {"replicas", p.replicas},
                      {"seed", p.seed}});
    return j;
}

inline std::string result_to_csv(const experiment_result& r) {
    std::ostringstream os;
    os.precision(12);
    os << "experiment,N,param,statistic,value,lo,hi,replicas,seed\n";
    for (const point_record& p : r.points)
        os << p.experiment << ',' << p.n << ',' << p.param << ',' << p.statistic << ',' << p.value
           << ',' << p.lo << ',' << p.hi << ',' << p.replicas << ',' << p.seed << '\n';
    return os.str();
}

// Writes content honoring the collision policy.  Returns true when the file
// was written, false when `verify` found an existing byte-identical copy.
inline bool write_text_file(const std::string& path, const std::string& content, on_existing mode) {
    namespace fs = std::filesystem;
    if (fs::exists(path)) {
        if (mode == on_existing::error)
            throw std::runtime_error("output exists (set on_existing=overwrite or verify): " + path);
        if (mode == on_existing::verify) {
            std::ifstream in(path, std::ios::binary);
            std::ostringstream buf;
            buf << in.rdbuf();
            if (buf.str() != content)
                throw std::runtime_error("output exists and differs from this run: " + path);
            return false;
        }
    }
    if (const fs::path dir = fs::path(path).parent_path(); !dir.empty()) fs::create_directories(dir);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
    return true;
}

// Debug dump of a value grid as (i, j, G) rows.
template <class Grid>
std::string grid_to_csv(const Grid& g) {
    std::ostringstream os;
    os.precision(12);
    os << "i,j,G\n";
    for (std::int64_t j = g.j0; j <= g.n; ++j)
        for (std::int64_t i = g.i0; i <= g.m; ++i)
            os << i << ',' << j << ',' << g.values[g.index({i, j})] << '\n';
    return os.str();
}

} // namespace lpplab
