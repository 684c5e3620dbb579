#include "qsim/config.hpp"

#include "qsim/scaling.hpp"

#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <set>
#include <stdexcept>

namespace qsim {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw std::invalid_argument("config field '" + path + "': " + what);
}

void reject_unknown_keys(const json& j, const std::string& path,
                         const std::set<std::string>& allowed) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (allowed.find(it.key()) == allowed.end())
            fail(path.empty() ? it.key() : path + "." + it.key(), "unknown key");
}

double get_double(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

std::uint64_t get_uint(const json& j, const std::string& path) {
    if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0))
        fail(path, "expected a nonnegative integer");
    return j.get<std::uint64_t>();
}

std::string get_string(const json& j, const std::string& path) {
    if (!j.is_string()) fail(path, "expected a string");
    return j.get<std::string>();
}

Family parse_family(const std::string& s, const std::string& path) {
    for (Family f : {Family::InfiniteServer, Family::ErlangA, Family::FiniteRoom,
                     Family::GeneralArrival})
        if (s == family_name(f)) return f;
    fail(path, "unknown family '" + s +
                   "' (expected infinite_server, erlang_a, finite_room, or "
                   "general_arrival)");
}

Construction parse_construction(const std::string& s, const std::string& path) {
    for (Construction c :
         {Construction::TimeChange, Construction::Thinning, Construction::ServiceTimes})
        if (s == construction_name(c)) return c;
    fail(path, "unknown construction '" + s +
                   "' (expected time_change, thinning, or service_times)");
}

const char* law_kind_name(Law::Kind k) {
    switch (k) {
        case Law::Kind::Exponential: return "exponential";
        case Law::Kind::Deterministic: return "deterministic";
        case Law::Kind::Erlang: return "erlang";
        case Law::Kind::Uniform: return "uniform";
    }
    return "?";
}

Law parse_law(const json& j, const std::string& path, double default_mean) {
    if (!j.is_object()) fail(path, "expected an object {kind, mean?, shape?}");
    reject_unknown_keys(j, path, {"kind", "mean", "shape"});
    if (!j.contains("kind")) fail(path + ".kind", "required");
    std::string kind = get_string(j.at("kind"), path + ".kind");
    double mean = default_mean;
    if (j.contains("mean")) mean = get_double(j.at("mean"), path + ".mean");
    if (!(mean > 0.0)) fail(path + ".mean", "must be > 0");
    try {
        if (kind == "exponential") return Law::exponential(mean);
        if (kind == "deterministic") return Law::deterministic(mean);
        if (kind == "uniform") return Law::uniform(mean);
        if (kind == "erlang") {
            if (!j.contains("shape")) fail(path + ".shape", "required for erlang");
            auto shape = static_cast<int>(get_uint(j.at("shape"), path + ".shape"));
            return Law::erlang(shape, mean);
        }
    } catch (const std::invalid_argument& e) {
        fail(path, e.what());
    }
    fail(path + ".kind", "unknown law '" + kind +
                             "' (expected exponential, deterministic, erlang, "
                             "or uniform)");
}

json law_json(const Law& law) {
    json j;
    j["kind"] = law_kind_name(law.kind);
    j["mean"] = law.mean;
    if (law.kind == Law::Kind::Erlang) j["shape"] = law.shape;
    return j;
}

InitialLaw parse_initial(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object {kind, value}");
    reject_unknown_keys(j, path, {"kind", "value"});
    if (!j.contains("kind")) fail(path + ".kind", "required");
    if (!j.contains("value")) fail(path + ".value", "required");
    std::string kind = get_string(j.at("kind"), path + ".kind");
    if (kind == "fixed")
        return InitialLaw::fixed(get_uint(j.at("value"), path + ".value"));
    if (kind == "poisson") {
        double mean = get_double(j.at("value"), path + ".value");
        if (!(mean >= 0.0)) fail(path + ".value", "must be >= 0");
        return InitialLaw::poisson(mean);
    }
    fail(path + ".kind", "unknown initial law '" + kind +
                             "' (expected fixed or poisson)");
}

json initial_json(const InitialLaw& law) {
    json j;
    if (law.kind == InitialLaw::Kind::Deterministic) {
        j["kind"] = "fixed";
        j["value"] = static_cast<std::uint64_t>(std::llround(law.param));
    } else {
        j["kind"] = "poisson";
        j["value"] = law.param;
    }
    return j;
}

json resolved_json_object(const RunConfig& c) {
    const ModelSpec& m = c.model;
    json j;
    j["family"] = family_name(m.family);
    j["n"] = m.n;
    j["mu"] = m.mu;
    j["theta"] = m.theta;
    j["lambda_n"] = m.lambda_n;
    if (m.family == Family::FiniteRoom) j["m_n"] = m.m_n;
    j["arrival"] = law_json(m.arrival);
    j["service"] = law_json(m.service);
    j["residual_service"] = law_json(m.residual_service);
    j["initial"] = initial_json(m.initial);
    j["horizon"] = m.horizon;
    j["construction"] = construction_name(c.construction);
    j["replications"] = c.replications;
    if (c.has_seed) j["seed"] = c.seed;
    j["t_grid"] = c.t_grid;
    return j;
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
    reject_unknown_keys(j, "",
                        {"family", "n", "mu", "theta", "m_n", "kappa", "beta",
                         "lambda_n", "arrival", "service", "residual_service",
                         "initial", "horizon", "construction", "replications",
                         "seed", "t_grid"});

    RunConfig c;
    ModelSpec& m = c.model;

    if (!j.contains("family")) fail("family", "required");
    m.family = parse_family(get_string(j.at("family"), "family"), "family");

    if (!j.contains("n")) fail("n", "required");
    m.n = get_uint(j.at("n"), "n");
    if (m.n < 1) fail("n", "must be >= 1");

    if (!j.contains("mu")) fail("mu", "required");
    m.mu = get_double(j.at("mu"), "mu");
    if (!(m.mu > 0.0)) fail("mu", "must be > 0");

    m.theta = j.contains("theta") ? get_double(j.at("theta"), "theta") : 0.0;

    if (!j.contains("horizon")) fail("horizon", "required");
    m.horizon = get_double(j.at("horizon"), "horizon");
    if (!(m.horizon > 0.0)) fail("horizon", "must be > 0");

    const bool has_beta = j.contains("beta");
    const bool has_lambda = j.contains("lambda_n");
    if (has_beta && has_lambda)
        fail("beta", "give either beta or lambda_n, not both");
    if (!has_beta && !has_lambda)
        fail("lambda_n", "one of beta or lambda_n is required");
    if (has_beta) {
        double beta = get_double(j.at("beta"), "beta");
        try {
            m.lambda_n = qed_arrival_rate(m.n, m.mu, beta);
        } catch (const std::exception& e) {
            fail("beta", e.what());
        }
    } else {
        m.lambda_n = get_double(j.at("lambda_n"), "lambda_n");
        if (!(m.lambda_n > 0.0)) fail("lambda_n", "must be > 0");
    }

    const bool has_room = j.contains("m_n");
    const bool has_kappa = j.contains("kappa");
    if (m.family == Family::FiniteRoom) {
        if (has_room && has_kappa) fail("m_n", "give either m_n or kappa, not both");
        if (!has_room && !has_kappa)
            fail("m_n", "one of m_n or kappa is required for finite_room");
        if (has_room) {
            m.m_n = get_uint(j.at("m_n"), "m_n");
        } else {
            double kappa = get_double(j.at("kappa"), "kappa");
            if (!(kappa >= 0.0)) fail("kappa", "must be >= 0");
            m.m_n = qed_room_size(m.n, kappa);
        }
    } else {
        if (has_room) fail("m_n", "only valid for the finite_room family");
        if (has_kappa) fail("kappa", "only valid for the finite_room family");
        m.m_n = ModelSpec::kInfinite;
    }

    m.arrival = j.contains("arrival")
                    ? parse_law(j.at("arrival"), "arrival", 1.0 / m.lambda_n)
                    : Law::exponential(1.0 / m.lambda_n);
    m.service = j.contains("service")
                    ? parse_law(j.at("service"), "service", 1.0 / m.mu)
                    : Law::exponential(1.0 / m.mu);
    m.residual_service =
        j.contains("residual_service")
            ? parse_law(j.at("residual_service"), "residual_service", m.service.mean)
            : m.service;
    m.initial = j.contains("initial") ? parse_initial(j.at("initial"), "initial")
                                      : InitialLaw::fixed(m.n);

    c.construction = m.family == Family::GeneralArrival ? Construction::ServiceTimes
                                                        : Construction::TimeChange;
    if (j.contains("construction"))
        c.construction =
            parse_construction(get_string(j.at("construction"), "construction"),
                               "construction");
    const bool markov_construction = c.construction != Construction::ServiceTimes;
    if (markov_construction && (m.family == Family::GeneralArrival ||
                                m.arrival.kind != Law::Kind::Exponential ||
                                m.service.kind != Law::Kind::Exponential))
        fail("construction",
             "time_change and thinning require exponential arrival and "
             "service laws; use service_times");
    if (!markov_construction &&
        (m.family == Family::ErlangA || m.family == Family::FiniteRoom))
        fail("construction",
             "service_times requires an infinite-server family");

    c.replications = 1;
    if (j.contains("replications")) {
        std::uint64_t r = get_uint(j.at("replications"), "replications");
        if (r < 1 || r > 0xffffffffull) fail("replications", "must be in [1, 2^32)");
        c.replications = static_cast<std::uint32_t>(r);
    }

    c.has_seed = j.contains("seed");
    if (c.has_seed) c.seed = get_uint(j.at("seed"), "seed");

    if (j.contains("t_grid")) {
        const json& g = j.at("t_grid");
        if (!g.is_array() || g.empty()) fail("t_grid", "expected a nonempty array");
        for (std::size_t i = 0; i < g.size(); ++i) {
            double t = get_double(g.at(i), "t_grid[" + std::to_string(i) + "]");
            if (t < 0.0 || t > m.horizon)
                fail("t_grid[" + std::to_string(i) + "]",
                     "must lie within [0, horizon]");
            c.t_grid.push_back(t);
        }
    } else {
        for (int k = 0; k < 20; ++k) c.t_grid.push_back(m.horizon * k / 20.0);
        c.t_grid.push_back(m.horizon);
    }

    try {
        m.validate();
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
    return c;
}

std::string resolved_config_json(const RunConfig& c) {
    return resolved_json_object(c).dump(2) + "\n";
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char b : bytes) {
        h ^= b;
        h *= 1099511628211ull;
    }
    return h;
}

std::string run_dir_name(const std::string& canonical_without_seed,
                         std::uint64_t seed) {
    std::uint64_t h = fnv1a64(canonical_without_seed);
    auto folded = static_cast<std::uint32_t>(h ^ (h >> 32));
    char buf[40];
    std::snprintf(buf, sizeof buf, "%08x-%llu", folded,
                  static_cast<unsigned long long>(seed));
    return buf;
}

std::string run_dir_name(const RunConfig& c) {
    json j = resolved_json_object(c);
    j.erase("seed");
    return run_dir_name(j.dump(), c.seed);
}

std::string make_run_dir(const std::string& out_root, const std::string& dir_name) {
    namespace fs = std::filesystem;
    fs::create_directories(out_root);
    fs::path base = fs::path(out_root) / dir_name;
    fs::path candidate = base;
    for (int k = 1; fs::exists(candidate); ++k)
        candidate = fs::path(base.string() + "-r" + std::to_string(k));
    fs::create_directories(candidate);
    return candidate.string();
}

std::string make_run_dir(const std::string& out_root, const RunConfig& c) {
    return make_run_dir(out_root, run_dir_name(c));
}

ModelSpec SweepConfig::model_at(std::uint64_t n) const {
    double lambda = qed_arrival_rate(n, mu, beta);
    if (has_room())
        return ModelSpec::finite_room(n, mu, theta, qed_room_size(n, kappa), lambda,
                                      InitialLaw::fixed(n), T);
    return ModelSpec::erlang_a(n, mu, theta, lambda, InitialLaw::fixed(n), T);
}

SweepConfig parse_sweep_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
    reject_unknown_keys(
        j, "", {"beta", "kappa", "mu", "theta", "n_list", "T", "replications"});

    SweepConfig c;
    if (j.contains("beta")) c.beta = get_double(j.at("beta"), "beta");
    if (j.contains("kappa")) {
        c.kappa = get_double(j.at("kappa"), "kappa");
        if (!(c.kappa >= 0.0)) fail("kappa", "must be >= 0");
    }
    if (j.contains("mu")) c.mu = get_double(j.at("mu"), "mu");
    if (!(c.mu > 0.0)) fail("mu", "must be > 0");
    if (j.contains("theta")) c.theta = get_double(j.at("theta"), "theta");
    if (c.theta < 0.0) fail("theta", "must be >= 0");

    if (!j.contains("n_list")) fail("n_list", "required");
    const json& nl = j.at("n_list");
    if (!nl.is_array() || nl.empty()) fail("n_list", "expected a nonempty array");
    for (std::size_t i = 0; i < nl.size(); ++i) {
        std::uint64_t n = get_uint(nl.at(i), "n_list[" + std::to_string(i) + "]");
        if (n < 1) fail("n_list[" + std::to_string(i) + "]", "must be >= 1");
        c.n_list.push_back(n);
    }

    if (j.contains("T")) c.T = get_double(j.at("T"), "T");
    if (!(c.T > 0.0)) fail("T", "must be > 0");

    if (j.contains("replications")) {
        std::uint64_t r = get_uint(j.at("replications"), "replications");
        if (r < 1 || r > 0xffffffffull) fail("replications", "must be in [1, 2^32)");
        c.replications = static_cast<std::uint32_t>(r);
    }

    // every scale must be feasible before the sweep starts
    for (std::uint64_t n : c.n_list) {
        try {
            c.model_at(n).validate();
        } catch (const std::exception& e) {
            fail("n_list", std::string("scale ") + std::to_string(n) + ": " + e.what());
        }
    }
    return c;
}

}  // namespace qsim
