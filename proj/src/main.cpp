// Command-line driver: simulate (sample paths + event logs), verify (named
// experiment suite with verdict streams), limit (diffusion and map solvers),
// sweep (one family across a list of scales).
#include "qsim/config.hpp"
#include "qsim/diffusion.hpp"
#include "qsim/harness.hpp"
#include "qsim/maps.hpp"
#include "qsim/model.hpp"
#include "qsim/scaling.hpp"
#include "qsim/stats.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

// exit-code contract: 0 all pass, 1 verdict failure, 2 reserved for
// inconclusive verdicts, 64 usage/config error; internal faults use 70
constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 64;
constexpr int kExitInternal = 70;

using nlohmann::json;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot create output file: " + path);
    return os;
}

std::vector<double> uniform_grid(double T, double dt) {
    if (!(dt > 0.0) || !(T > 0.0))
        throw std::invalid_argument("grid requires T > 0 and dt > 0");
    std::vector<double> g;
    auto steps = static_cast<std::size_t>(std::llround(T / dt));
    if (steps < 1) steps = 1;
    g.reserve(steps + 1);
    for (std::size_t k = 0; k < steps; ++k) g.push_back(static_cast<double>(k) * dt);
    g.push_back(T);
    return g;
}

std::vector<std::string> split_csv_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else if (!std::isspace(static_cast<unsigned char>(ch))) {
            cur.push_back(ch);
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

struct SeedFlag {
    bool set = false;
    std::uint64_t value = 0;
};

int cmd_simulate(const std::string& config_path, const SeedFlag& seed_flag,
                 unsigned workers, const std::string& out_root) {
    qsim::RunConfig cfg = qsim::parse_run_config(read_file(config_path));
    if (seed_flag.set) {
        cfg.has_seed = true;
        cfg.seed = seed_flag.value;
    }
    if (!cfg.has_seed)
        throw std::invalid_argument("a master seed is required (config \"seed\" or --seed)");

    const std::string dir = qsim::make_run_dir(out_root, cfg);
    open_out(dir + "/resolved_config.json") << qsim::resolved_config_json(cfg);
    std::filesystem::create_directories(dir + "/paths");

    const qsim::ModelSpec model = cfg.model;
    const qsim::Construction construction = cfg.construction;
    const std::uint64_t seed = cfg.seed;
    const std::vector<double> grid = cfg.t_grid;
    qsim::EnsembleStats stats = qsim::run_ensemble(
        grid, cfg.replications, workers, [&](std::uint32_t rep) {
            qsim::QueueRealization r = qsim::simulate(model, construction, seed, rep);
            double flow = r.Q.initial() + r.A.final_value() - r.U.final_value() -
                          r.D.final_value() - r.L.final_value();
            if (flow != r.Q.final_value())
                throw std::runtime_error("flow conservation violated at replication " +
                                         std::to_string(rep));
            char name[64];
            std::snprintf(name, sizeof name, "/paths/rep%05u.csv", rep);
            std::ofstream os = open_out(dir + name);
            qsim::write_event_csv(r, os);
            std::vector<double> v;
            v.reserve(grid.size());
            for (double t : grid) v.push_back(r.Q.eval(t));
            return v;
        });

    std::ofstream os = open_out(dir + "/summary.csv");
    stats.write_summary_csv(os);
    std::cout << "run directory: " << dir << "\n"
              << cfg.replications << " replications, "
              << qsim::construction_name(construction) << " construction, seed "
              << seed << "\n";
    return kExitPass;
}

int cmd_verify(const std::string& config_path, const SeedFlag& seed_flag,
               unsigned workers, const std::string& out_root,
               const std::string& experiments_csv, bool run_all) {
    std::vector<std::string> experiments;
    SeedFlag seed = seed_flag;
    if (!config_path.empty()) {
        json j;
        try {
            j = json::parse(read_file(config_path));
        } catch (const json::parse_error& e) {
            throw std::invalid_argument(std::string("config is not valid JSON: ") +
                                        e.what());
        }
        if (!j.is_object())
            throw std::invalid_argument("config must be a JSON object");
        for (auto it = j.begin(); it != j.end(); ++it)
            if (it.key() != "command" && it.key() != "experiments" && it.key() != "seed")
                throw std::invalid_argument("config field '" + it.key() +
                                            "': unknown key for verify");
        if (j.contains("experiments")) {
            if (!j.at("experiments").is_array())
                throw std::invalid_argument("config field 'experiments': expected an array");
            for (const auto& e : j.at("experiments"))
                experiments.push_back(e.get<std::string>());
        }
        if (!seed.set && j.contains("seed")) {
            seed.set = true;
            seed.value = j.at("seed").get<std::uint64_t>();
        }
    }
    if (run_all) {
        if (!experiments_csv.empty())
            throw std::invalid_argument("give --experiments or --all, not both");
        experiments = qsim::experiment_names();
    } else if (!experiments_csv.empty()) {
        experiments = split_csv_list(experiments_csv);
    }
    if (experiments.empty())
        throw std::invalid_argument(
            "no experiments selected; use --all or --experiments name1,name2");
    for (const std::string& e : experiments)
        if (!qsim::is_experiment(e))
            throw std::invalid_argument("unknown experiment '" + e + "'");
    if (!seed.set)
        throw std::invalid_argument("verify requires a seed (config \"seed\" or --seed)");

    json resolved;
    resolved["command"] = "verify";
    resolved["experiments"] = experiments;
    const std::string dir =
        qsim::make_run_dir(out_root, qsim::run_dir_name(resolved.dump(), seed.value));
    resolved["seed"] = seed.value;
    open_out(dir + "/resolved_config.json") << resolved.dump(2) << "\n";

    std::ofstream verdicts = open_out(dir + "/verdicts.jsonl");
    std::ofstream diagnostics = open_out(dir + "/diagnostics.jsonl");
    std::ofstream summary = open_out(dir + "/summary.csv");
    summary << "experiment,theorem,check,statistic,threshold,pass,seed,runtime_s\n";

    std::size_t failures = 0, total = 0;
    for (const std::string& name : experiments) {
        qsim::ExperimentResult result = qsim::run_experiment(name, seed.value, workers);
        for (const qsim::Verdict& v : result.verdicts) {
            std::string line = qsim::verdict_jsonl_line(v);
            verdicts << line << "\n";
            std::cout << line << "\n";
            char row[256];
            std::snprintf(row, sizeof row, "%s,%s,%s,%.17g,%.17g,%d,%llu,%.3f\n",
                          v.experiment.c_str(), v.theorem.c_str(), v.check.c_str(),
                          v.statistic, v.threshold, v.pass ? 1 : 0,
                          static_cast<unsigned long long>(v.seed), v.runtime_s);
            summary << row;
            ++total;
            if (!v.pass) ++failures;
        }
        for (const qsim::Diagnostic& d : result.diagnostics)
            diagnostics << qsim::diagnostic_jsonl_line(d) << "\n";
    }
    std::cout << "run directory: " << dir << "\n"
              << (total - failures) << "/" << total << " checks passed\n";
    return failures == 0 ? kExitPass : kExitFail;
}

void write_grid_csv(const std::string& path, const qsim::GridPath& g) {
    std::ofstream os = open_out(path);
    os << "t,x\n";
    char row[80];
    for (std::size_t k = 0; k < g.t.size(); ++k) {
        std::snprintf(row, sizeof row, "%.17g,%.17g\n", g.t[k], g.x[k]);
        os << row;
    }
}

void write_regulated_csv(const std::string& path, const qsim::GridRegulated& g) {
    std::ofstream os = open_out(path);
    os << "t,x,regulator\n";
    char row[120];
    for (std::size_t k = 0; k < g.content.t.size(); ++k) {
        std::snprintf(row, sizeof row, "%.17g,%.17g,%.17g\n", g.content.t[k],
                      g.content.x[k], g.regulator.x[k]);
        os << row;
    }
}

qsim::StepPath parse_driver(const json& j) {
    if (!j.is_object() || !j.contains("horizon"))
        throw std::invalid_argument("config field 'driver': expected {initial, horizon, epochs, values}");
    double initial = j.value("initial", 0.0);
    double horizon = j.at("horizon").get<double>();
    std::vector<double> epochs, values;
    if (j.contains("epochs")) epochs = j.at("epochs").get<std::vector<double>>();
    if (j.contains("values")) values = j.at("values").get<std::vector<double>>();
    return qsim::StepPath(initial, horizon, std::move(epochs), std::move(values));
}

int cmd_limit(const std::string& config_path, const SeedFlag& seed_flag,
              unsigned workers, const std::string& out_root) {
    json j;
    try {
        j = json::parse(read_file(config_path));
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("problem"))
        throw std::invalid_argument("config field 'problem': required "
                                    "(ou, euler, integral_map, or reflected_map)");
    const std::string problem = j.at("problem").get<std::string>();

    SeedFlag seed = seed_flag;
    if (!seed.set && j.contains("seed")) {
        seed.set = true;
        seed.value = j.at("seed").get<std::uint64_t>();
    }

    json canonical = j;
    canonical.erase("seed");
    const std::string dir = qsim::make_run_dir(
        out_root, qsim::run_dir_name(canonical.dump(), seed.set ? seed.value : 0));
    json resolved = j;
    if (seed.set) resolved["seed"] = seed.value;
    open_out(dir + "/resolved_config.json") << resolved.dump(2) << "\n";
    std::filesystem::create_directories(dir + "/paths");

    if (problem == "ou" || problem == "euler") {
        if (!seed.set)
            throw std::invalid_argument("stochastic limit problems require a seed");
        const double mu = j.value("mu", 1.0);
        const double beta = j.value("beta", 0.0);
        const double theta = j.value("theta", mu);
        const double x0 = j.value("x0", 0.0);
        const double T = j.value("T", 1.0);
        const double dt = j.value("dt", 0.01);
        const auto reps = j.value("replications", std::uint32_t{1000});
        const std::vector<double> grid = uniform_grid(T, dt);
        const std::uint64_t master = seed.value;

        qsim::EnsembleStats stats(grid);
        if (problem == "ou") {
            qsim::DiffusionSpec spec = qsim::DiffusionSpec::infinite_server(mu, beta);
            stats = qsim::run_ensemble(grid, reps, workers, [&](std::uint32_t rep) {
                qsim::PhiloxEngine eng(master, rep, qsim::StreamRole::Gaussian);
                return qsim::ou_exact_path(spec, x0, grid, eng);
            });
            std::ofstream os = open_out(dir + "/paths/moments.csv");
            os << "t,mean,var\n";
            char row[120];
            for (double t : grid) {
                std::snprintf(row, sizeof row, "%.17g,%.17g,%.17g\n", t,
                              qsim::ou_mean(spec, x0, t), qsim::ou_var(spec, t));
                os << row;
            }
        } else {
            qsim::DiffusionSpec spec =
                j.contains("kappa")
                    ? qsim::DiffusionSpec::finite_room(beta, mu, theta,
                                                       j.at("kappa").get<double>())
                    : qsim::DiffusionSpec::erlang_a(beta, mu, theta);
            stats = qsim::run_ensemble(grid, reps, workers, [&](std::uint32_t rep) {
                qsim::PhiloxEngine eng(master, rep, qsim::StreamRole::Gaussian);
                return qsim::euler_limit_path(spec, x0, grid, eng).content.x;
            });
            qsim::PhiloxEngine eng(master, 0, qsim::StreamRole::Gaussian);
            write_regulated_csv(dir + "/paths/sample0.csv",
                                qsim::euler_limit_path(spec, x0, grid, eng));
        }
        std::ofstream os = open_out(dir + "/summary.csv");
        stats.write_summary_csv(os);
    } else if (problem == "integral_map" || problem == "reflected_map") {
        const double b = j.value("b", 0.0);
        const double mu = j.value("mu", 1.0);
        const double dt = j.value("dt", 0.01);
        qsim::DriftFn h = j.contains("theta")
                              ? qsim::DriftFn::piecewise(mu, j.at("theta").get<double>())
                              : qsim::DriftFn::linear(mu);
        qsim::StepPath y = j.contains("driver")
                               ? parse_driver(j.at("driver"))
                               : qsim::StepPath(0.0, j.value("T", 1.0));
        if (problem == "integral_map") {
            write_grid_csv(dir + "/paths/solution.csv",
                           qsim::solve_integral_rep(b, y, h, dt));
        } else {
            if (!j.contains("kappa"))
                throw std::invalid_argument("config field 'kappa': required for reflected_map");
            write_regulated_csv(
                dir + "/paths/solution.csv",
                qsim::solve_reflected_rep(b, y, h, j.at("kappa").get<double>(), dt));
        }
    } else {
        throw std::invalid_argument("config field 'problem': unknown problem '" + problem +
                                    "' (expected ou, euler, integral_map, or reflected_map)");
    }
    std::cout << "run directory: " << dir << "\n";
    return kExitPass;
}

int cmd_sweep(const std::string& config_path, const SeedFlag& seed_flag,
              unsigned workers, const std::string& out_root) {
    const std::string text = read_file(config_path);
    qsim::SweepConfig cfg = qsim::parse_sweep_config(text);
    if (!seed_flag.set)
        throw std::invalid_argument("sweep requires --seed");
    const std::uint64_t seed = seed_flag.value;

    json canonical;
    canonical["command"] = "sweep";
    canonical["beta"] = cfg.beta;
    if (cfg.has_room()) canonical["kappa"] = cfg.kappa;
    canonical["mu"] = cfg.mu;
    canonical["theta"] = cfg.theta;
    canonical["n_list"] = cfg.n_list;
    canonical["T"] = cfg.T;
    canonical["replications"] = cfg.replications;
    const std::string dir =
        qsim::make_run_dir(out_root, qsim::run_dir_name(canonical.dump(), seed));
    canonical["seed"] = seed;
    open_out(dir + "/resolved_config.json") << canonical.dump(2) << "\n";

    std::ofstream os = open_out(dir + "/summary.csv");
    os << "n,lambda_n,m_n,fluid_sup_median,xT_mean,xT_se,xT_q05,xT_q50,xT_q95\n";
    for (std::uint64_t n : cfg.n_list) {
        const qsim::ModelSpec model = cfg.model_at(n);
        qsim::EnsembleStats stats = qsim::run_ensemble(
            {cfg.T, cfg.T}, cfg.replications, workers, [&, model](std::uint32_t rep) {
                qsim::QueueRealization r =
                    qsim::construct_time_change(model, seed, rep);
                qsim::StepPath f = qsim::fluid_scale(r.Q, model.n);
                double sup = std::abs(f.initial() - 1.0);
                for (double v : f.values()) sup = std::max(sup, std::abs(v - 1.0));
                double xT = qsim::clt_scale(r.Q, model.n).eval(cfg.T);
                return std::vector<double>{sup, xT};
            });
        auto fluid_q = stats.quantiles(0);
        auto x_q = stats.quantiles(1);
        char row[256];
        char room[32];
        if (model.m_n == qsim::ModelSpec::kInfinite)
            std::snprintf(room, sizeof room, "inf");
        else
            std::snprintf(room, sizeof room, "%llu",
                          static_cast<unsigned long long>(model.m_n));
        std::snprintf(row, sizeof row,
                      "%llu,%.17g,%s,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                      static_cast<unsigned long long>(n), model.lambda_n, room,
                      fluid_q[3], stats.mean(1), stats.se(1), x_q[1], x_q[3], x_q[5]);
        os << row;
    }
    std::cout << "run directory: " << dir << "\n";
    return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Many-server queue simulator and limit-law verification harness"};
    app.require_subcommand(1);

    std::string config_path, out_root = "runs", experiments_csv;
    unsigned workers = 1;
    bool run_all = false;
    SeedFlag seed;
    auto add_common = [&](CLI::App* cmd, bool config_required) {
        auto* opt = cmd->add_option("--config", config_path, "JSON configuration file");
        if (config_required) opt->required();
        cmd->add_option("--seed", seed.value, "64-bit master seed")
            ->each([&](const std::string&) { seed.set = true; });
        cmd->add_option("--workers", workers, "worker thread count")
            ->check(CLI::Range(1u, 256u));
        cmd->add_option("--out", out_root, "output root directory");
    };

    CLI::App* sim = app.add_subcommand(
        "simulate", "Sample queue paths; write event logs and ensemble summaries");
    add_common(sim, true);
    CLI::App* ver = app.add_subcommand(
        "verify", "Run named verification experiments and emit verdicts");
    add_common(ver, false);
    ver->add_option("--experiments", experiments_csv,
                    "comma-separated experiment names");
    ver->add_flag("--all", run_all, "run the full experiment suite");
    CLI::App* lim = app.add_subcommand(
        "limit", "Sample limit diffusions or solve the deterministic maps");
    add_common(lim, true);
    CLI::App* swp = app.add_subcommand(
        "sweep", "Run one family across a list of scales at fixed staffing slack");
    add_common(swp, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (sim->parsed()) return cmd_simulate(config_path, seed, workers, out_root);
        if (ver->parsed())
            return cmd_verify(config_path, seed, workers, out_root, experiments_csv,
                              run_all);
        if (lim->parsed()) return cmd_limit(config_path, seed, workers, out_root);
        if (swp->parsed()) return cmd_sweep(config_path, seed, workers, out_root);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: config: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitUsage;
}
