// Command-line front end: dispatches catalog experiments, prints the
// catalog, runs the fast invariant suite, and converts result files to
// plot-ready CSV.  Exit status: 0 all verdicts passed, 1 some verdict
// failed, 2 usage or configuration error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "lpplab/checks.hpp"
#include "lpplab/experiments.hpp"

namespace {

namespace fs = std::filesystem;

void print_verdict(const lpplab::verdict& v) {
    if (v.skipped)
        std::cout << "CRITERION " << v.id << " SKIP (" << v.detail << ")\n";
    else
        std::cout << "CRITERION " << v.id << (v.pass ? " PASS" : " FAIL")
                  << " margin=" << v.margin << "\n";
}

std::string default_out_dir() {
    const char* env = std::getenv("LPPLAB_OUT");
    return (env != nullptr && *env != '\0') ? std::string(env) : std::string("results");
}

struct run_args {
    std::string name;
    std::string config_path;
    std::string out_dir;
    std::vector<std::string> overrides;
    std::uint64_t seed = 0;
    bool seed_given = false;
    long long workers = 0;
    bool workers_given = false;
};

int do_run(const run_args& a) {
    lpplab::kv_config cfg;
    if (!a.config_path.empty()) cfg = lpplab::parse_kv_file(a.config_path);
    if (cfg.name.empty())
        cfg.name = a.name;
    else if (cfg.name != a.name)
        throw std::invalid_argument("config file names experiment '" + cfg.name +
                                    "' but the command line says '" + a.name + "'");
    for (const std::string& ov : a.overrides) lpplab::apply_override(cfg, ov);
    if (a.seed_given) cfg.kv["seed"] = std::to_string(a.seed);
    if (a.workers_given) cfg.kv["workers"] = std::to_string(a.workers);

    lpplab::on_existing mode = lpplab::on_existing::error;
    if (const auto it = cfg.kv.find("on_existing"); it != cfg.kv.end()) {
        mode = lpplab::parse_on_existing(it->second);
        cfg.kv.erase(it);
    }

    const lpplab::experiment_result res = lpplab::run_experiment(cfg);

    const fs::path dir = a.out_dir.empty() ? default_out_dir() : a.out_dir;
    const fs::path jpath = dir / (res.name + ".json");
    const fs::path cpath = dir / (res.name + ".csv");
    nlohmann::json fresh = lpplab::result_to_json(res);
    bool jwrote = true;
    if (mode == lpplab::on_existing::verify && fs::exists(jpath)) {
        // Wall-clock timing can never reproduce; every other field must.
        std::ifstream in(jpath);
        nlohmann::json old = nlohmann::json::parse(in);
        old.erase("wall_seconds");
        nlohmann::json trimmed = fresh;
        trimmed.erase("wall_seconds");
        if (old != trimmed)
            throw std::runtime_error("output exists and differs from this run: " + jpath.string());
        jwrote = false;
    } else {
        jwrote = lpplab::write_text_file(jpath.string(), fresh.dump(2) + "\n", mode);
    }
    lpplab::write_text_file(cpath.string(), lpplab::result_to_csv(res), mode);

    for (const auto& v : res.verdicts) print_verdict(v);
    std::cout << (jwrote ? "wrote " : "verified byte-identical ") << jpath.string() << " and "
              << cpath.string() << " (" << res.wall_seconds << " s, " << res.total_replicas
              << " replicas)\n";
    return res.all_pass() ? 0 : 1;
}

int do_list() {
    for (const auto& e : lpplab::catalog()) {
        std::cout << e.name << "\n    " << e.blurb << "\n    keys:";
        for (const auto& k : e.keys) std::cout << ' ' << k;
        std::cout << "\n";
    }
    return 0;
}

int do_verify() {
    const auto all = lpplab::run_all_checks();
    bool ok = true;
    for (const auto& v : all) {
        print_verdict(v);
        if (!v.pass && !v.skipped) ok = false;
    }
    return ok ? 0 : 1;
}

int do_export(const std::string& input, const std::string& out_dir) {
    std::ifstream in(input);
    if (!in) throw std::invalid_argument("cannot open " + input);
    const nlohmann::json j = nlohmann::json::parse(in);
    if (!j.contains("schema") || j["schema"].get<int>() != 1)
        throw std::invalid_argument(input + ": unsupported or missing schema tag");

    lpplab::experiment_result res;
    res.name = j.at("experiment").get<std::string>();
    for (const auto& p : j.at("points")) {
        lpplab::point_record rec;
        rec.experiment = p.at("experiment").get<std::string>();
        rec.n = p.at("N").get<double>();
        rec.param = p.at("param").get<std::string>();
        rec.statistic = p.at("statistic").get<std::string>();
        rec.value = p.at("value").get<double>();
        rec.lo = p.at("lo").get<double>();
        rec.hi = p.at("hi").get<double>();
        rec.replicas = p.at("replicas").get<std::uint64_t>();
        rec.seed = p.at("seed").get<std::uint64_t>();
        res.points.push_back(rec);
    }

    const fs::path dir = out_dir.empty() ? fs::path(input).parent_path() : fs::path(out_dir);
    const fs::path cpath =
        (dir.empty() ? fs::path(".") : dir) / (res.name + ".csv");
    lpplab::write_text_file(cpath.string(), lpplab::result_to_csv(res),
                            lpplab::on_existing::overwrite);
    std::cout << "wrote " << cpath.string() << " (" << res.points.size() << " rows)\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"last-passage percolation laboratory"};
    app.require_subcommand(1);

    run_args ra;
    auto* run = app.add_subcommand("run", "run a catalog experiment");
    run->add_option("name", ra.name, "experiment name")->required();
    run->add_option("--config", ra.config_path, "key = value parameter file");
    run->add_option("--out", ra.out_dir, "output directory (default $LPPLAB_OUT or ./results)");
    auto* seed_opt = run->add_option("--seed", ra.seed, "master seed");
    auto* workers_opt = run->add_option("--workers", ra.workers, "worker thread count");
    run->add_option("--override", ra.overrides, "key=value parameter overrides")
        ->take_all()
        ->allow_extra_args();

    app.add_subcommand("list", "print the experiment catalog");
    app.add_subcommand("verify", "run the fast invariant suite");

    std::string export_input, export_out;
    auto* exp = app.add_subcommand("export", "convert a result JSON to long-format CSV");
    exp->add_option("input", export_input, "result JSON file")->required();
    exp->add_option("--out", export_out, "output directory (default: alongside the input)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        ra.seed_given = seed_opt->count() > 0;
        ra.workers_given = workers_opt->count() > 0;
        if (app.got_subcommand("run")) return do_run(ra);
        if (app.got_subcommand("list")) return do_list();
        if (app.got_subcommand("verify")) return do_verify();
        return do_export(export_input, export_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
