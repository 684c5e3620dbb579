#include "qsim/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <queue>
#include <random>
#include <stdexcept>
#include <utility>

namespace qsim {

namespace {

constexpr double kInfD = std::numeric_limits<double>::infinity();

// Global event clock.  Holding times can underflow to zero at large rates;
// nudging by one ulp keeps epochs strictly increasing in every path while
// all paths still jump at the same instant.
double advance(double& last, double t) {
    if (t <= last) t = std::nextafter(last, kInfD);
    last = t;
    return t;
}

// accumulates jump epochs of one counting or state path
struct Tape {
    std::vector<double> epochs;
    std::vector<double> values;
    void add(double t, double v) {
        epochs.push_back(t);
        values.push_back(v);
    }
    StepPath finish(double initial, double horizon) {
        return StepPath(initial, horizon, std::move(epochs), std::move(values));
    }
};

std::uint64_t draw_initial(const ModelSpec& spec, std::uint64_t master_seed,
                           std::uint32_t replication) {
    PhiloxEngine eng(master_seed, replication, StreamRole::InitialState);
    std::uint64_t k = spec.initial.sample(eng);
    if (spec.initial.kind == InitialLaw::Kind::Poisson) {
        // memory guard; the clamp is astronomically unlikely to bind
        double m = spec.initial.param;
        double guard = m + 20.0 * std::sqrt(m) + 100.0;
        std::uint64_t cap = std::max<std::uint64_t>(
            2 * spec.n, static_cast<std::uint64_t>(guard));
        k = std::min(k, cap);
    }
    std::uint64_t room = spec.capacity();
    if (k > room) {
        if (spec.initial.kind == InitialLaw::Kind::Deterministic)
            throw std::invalid_argument("initial headcount exceeds system capacity");
        k = room;
    }
    return k;
}

void require_markov_laws(const ModelSpec& spec, const char* who) {
    if (spec.arrival.kind != Law::Kind::Exponential ||
        spec.service.kind != Law::Kind::Exponential)
        throw std::invalid_argument(std::string(who) +
                                    ": needs exponential arrival and service laws");
}

}  // namespace

const char* family_name(Family f) {
    switch (f) {
        case Family::InfiniteServer: return "infinite_server";
        case Family::ErlangA: return "erlang_a";
        case Family::FiniteRoom: return "finite_room";
        case Family::GeneralArrival: return "general_arrival";
    }
    return "?";
}

const char* construction_name(Construction c) {
    switch (c) {
        case Construction::TimeChange: return "time_change";
        case Construction::Thinning: return "thinning";
        case Construction::ServiceTimes: return "service_times";
    }
    return "?";
}

Law Law::exponential(double mean) {
    if (!(mean > 0.0)) throw std::invalid_argument("Law: mean must be > 0");
    return Law{Kind::Exponential, mean, 1};
}

Law Law::deterministic(double mean) {
    if (!(mean > 0.0)) throw std::invalid_argument("Law: mean must be > 0");
    return Law{Kind::Deterministic, mean, 1};
}

Law Law::erlang(int stages, double mean) {
    if (stages < 1) throw std::invalid_argument("Law: Erlang needs >= 1 stage");
    if (!(mean > 0.0)) throw std::invalid_argument("Law: mean must be > 0");
    return Law{Kind::Erlang, mean, stages};
}

Law Law::uniform(double mean) {
    if (!(mean > 0.0)) throw std::invalid_argument("Law: mean must be > 0");
    return Law{Kind::Uniform, mean, 1};
}

double Law::sample(PhiloxEngine& eng) const {
    switch (kind) {
        case Kind::Exponential: return eng.exponential(1.0 / mean);
        case Kind::Deterministic: return mean;
        case Kind::Erlang: {
            double rate = static_cast<double>(shape) / mean;
            double s = 0.0;
            for (int i = 0; i < shape; ++i) s += eng.exponential(rate);
            return s;
        }
        case Kind::Uniform: return 2.0 * mean * eng.uniform01();
    }
    return mean;
}

double Law::cdf(double x) const {
    if (x < 0.0) return 0.0;
    switch (kind) {
        case Kind::Exponential: return 1.0 - std::exp(-x / mean);
        case Kind::Deterministic: return x >= mean ? 1.0 : 0.0;
        case Kind::Erlang: {
            double rx = static_cast<double>(shape) / mean * x;
            double term = 1.0, tail = 1.0;
            for (int j = 1; j < shape; ++j) {
                term *= rx / j;
                tail += term;
            }
            return 1.0 - std::exp(-rx) * tail;
        }
        case Kind::Uniform: return std::min(1.0, x / (2.0 * mean));
    }
    return 0.0;
}

double Law::scv() const {
    switch (kind) {
        case Kind::Exponential: return 1.0;
        case Kind::Deterministic: return 0.0;
        case Kind::Erlang: return 1.0 / static_cast<double>(shape);
        case Kind::Uniform: return 1.0 / 3.0;
    }
    return 1.0;
}

InitialLaw InitialLaw::fixed(std::uint64_t count) {
    return InitialLaw{Kind::Deterministic, static_cast<double>(count)};
}

InitialLaw InitialLaw::poisson(double mean) {
    if (!(mean >= 0.0)) throw std::invalid_argument("InitialLaw: mean must be >= 0");
    return InitialLaw{Kind::Poisson, mean};
}

std::uint64_t InitialLaw::sample(PhiloxEngine& eng) const {
    if (kind == Kind::Deterministic) return static_cast<std::uint64_t>(param);
    std::poisson_distribution<long long> dist(param);
    long long v = dist(eng);
    return v < 0 ? 0 : static_cast<std::uint64_t>(v);
}

ModelSpec ModelSpec::infinite_server(std::uint64_t n, double mu, double lambda_n,
                                     InitialLaw init, double horizon) {
    ModelSpec s;
    s.family = Family::InfiniteServer;
    s.n = n;
    s.mu = mu;
    s.theta = 0.0;
    s.lambda_n = lambda_n;
    s.arrival = Law::exponential(1.0 / lambda_n);
    s.service = Law::exponential(1.0 / mu);
    s.residual_service = Law::exponential(1.0 / mu);
    s.initial = init;
    s.horizon = horizon;
    s.validate();
    return s;
}

ModelSpec ModelSpec::erlang_a(std::uint64_t n, double mu, double theta, double lambda_n,
                              InitialLaw init, double horizon) {
    ModelSpec s;
    s.family = Family::ErlangA;
    s.n = n;
    s.mu = mu;
    s.theta = theta;
    s.lambda_n = lambda_n;
    s.arrival = Law::exponential(1.0 / lambda_n);
    s.service = Law::exponential(1.0 / mu);
    s.residual_service = Law::exponential(1.0 / mu);
    s.initial = init;
    s.horizon = horizon;
    s.validate();
    return s;
}

ModelSpec ModelSpec::finite_room(std::uint64_t n, double mu, double theta,
                                 std::uint64_t m_n, double lambda_n,
                                 InitialLaw init, double horizon) {
    ModelSpec s;
    s.family = Family::FiniteRoom;
    s.n = n;
    s.mu = mu;
    s.theta = theta;
    s.lambda_n = lambda_n;
    s.m_n = m_n;
    s.arrival = Law::exponential(1.0 / lambda_n);
    s.service = Law::exponential(1.0 / mu);
    s.residual_service = Law::exponential(1.0 / mu);
    s.initial = init;
    s.horizon = horizon;
    s.validate();
    return s;
}

ModelSpec ModelSpec::general_arrival(std::uint64_t n, double mu, Law arrival_law,
                                     Law service_law, InitialLaw init, double horizon) {
    ModelSpec s;
    s.family = Family::GeneralArrival;
    s.n = n;
    s.mu = mu;
    s.theta = 0.0;
    s.lambda_n = 1.0 / arrival_law.mean;
    s.arrival = arrival_law;
    s.service = service_law;
    s.residual_service = service_law;
    s.initial = init;
    s.horizon = horizon;
    s.validate();
    return s;
}

std::uint64_t ModelSpec::servers() const {
    return (family == Family::InfiniteServer || family == Family::GeneralArrival)
               ? kInfinite
               : n;
}

std::uint64_t ModelSpec::capacity() const {
    if (family != Family::FiniteRoom || m_n == kInfinite) return kInfinite;
    std::uint64_t s = servers();
    return (m_n > kInfinite - s) ? kInfinite : s + m_n;
}

void ModelSpec::validate() const {
    if (n < 1) throw std::invalid_argument("ModelSpec: n must be >= 1");
    if (!(mu > 0.0)) throw std::invalid_argument("ModelSpec: mu must be > 0");
    if (!(theta >= 0.0)) throw std::invalid_argument("ModelSpec: theta must be >= 0");
    if (!(lambda_n > 0.0)) throw std::invalid_argument("ModelSpec: lambda_n must be > 0");
    if (!(horizon > 0.0)) throw std::invalid_argument("ModelSpec: horizon must be > 0");
    if (std::abs(arrival.mean * lambda_n - 1.0) > 1e-9)
        throw std::invalid_argument("ModelSpec: arrival mean inconsistent with lambda_n");
    if (std::abs(service.mean * mu - 1.0) > 1e-9)
        throw std::invalid_argument("ModelSpec: service mean inconsistent with mu");
    if (family == Family::InfiniteServer || family == Family::GeneralArrival) {
        if (theta != 0.0)
            throw std::invalid_argument("ModelSpec: abandonment needs waiting customers");
        if (m_n != kInfinite)
            throw std::invalid_argument("ModelSpec: waiting room needs finite servers");
    }
    if (family == Family::ErlangA && m_n != kInfinite)
        throw std::invalid_argument("ModelSpec: finite waiting room is its own family");
    if (initial.kind == InitialLaw::Kind::Deterministic &&
        static_cast<double>(capacity()) < initial.param)
        throw std::invalid_argument("initial headcount exceeds system capacity");
}

QueueRealization construct_time_change(const ModelSpec& spec,
                                       std::uint64_t master_seed,
                                       std::uint32_t replication) {
    spec.validate();
    require_markov_laws(spec, "construct_time_change");

    PhiloxEngine hold(master_seed, replication, StreamRole::Misc);
    PhiloxEngine pick(master_seed, replication, StreamRole::EventType);

    const std::uint64_t s = spec.servers();
    const std::uint64_t cap = spec.capacity();
    const double T = spec.horizon;
    std::uint64_t k = draw_initial(spec, master_seed, replication);
    const double q0 = static_cast<double>(k);

    Tape q, a, d, l, u;
    std::uint64_t na = 0, nd = 0, nl = 0, nu = 0;
    double t = 0.0, last = 0.0;
    while (true) {
        double in_service = static_cast<double>(std::min(k, s));
        double waiting = static_cast<double>(k - std::min(k, s));
        double rate = spec.lambda_n + spec.mu * in_service + spec.theta * waiting;
        t += hold.exponential(rate);
        if (t > T) break;
        t = advance(last, t);
        if (t > T) break;
        double x = pick.uniform01() * rate;
        if (x < spec.lambda_n) {
            a.add(t, static_cast<double>(++na));
            if (k < cap) {
                ++k;
                q.add(t, static_cast<double>(k));
            } else {
                u.add(t, static_cast<double>(++nu));
            }
        } else if (x < spec.lambda_n + spec.mu * in_service) {
            --k;
            d.add(t, static_cast<double>(++nd));
            q.add(t, static_cast<double>(k));
        } else {
            --k;
            l.add(t, static_cast<double>(++nl));
            q.add(t, static_cast<double>(k));
        }
    }

    QueueRealization r;
    r.spec = spec;
    r.construction = Construction::TimeChange;
    r.master_seed = master_seed;
    r.replication = replication;
    r.Q = q.finish(q0, T);
    r.A = a.finish(0.0, T);
    r.D = d.finish(0.0, T);
    r.L = l.finish(0.0, T);
    r.U = u.finish(0.0, T);
    return r;
}

QueueRealization construct_thinning(const ModelSpec& spec,
                                    std::uint64_t master_seed,
                                    std::uint32_t replication) {
    spec.validate();
    require_markov_laws(spec, "construct_thinning");

    PhiloxEngine arr(master_seed, replication, StreamRole::Arrival);
    PhiloxEngine srv(master_seed, replication, StreamRole::Service);
    PhiloxEngine abn(master_seed, replication, StreamRole::Abandon);

    const std::uint64_t s = spec.servers();
    const std::uint64_t cap = spec.capacity();
    const bool abandons = spec.theta > 0.0 && s != ModelSpec::kInfinite;
    const double T = spec.horizon;
    std::uint64_t k = draw_initial(spec, master_seed, replication);
    const double q0 = static_cast<double>(k);

    // heap entry: (next firing time, level); level 0 is the arrival stream,
    // levels 1..servers are service streams, higher levels abandon streams
    using Ev = std::pair<double, std::uint64_t>;
    std::priority_queue<Ev, std::vector<Ev>, std::greater<Ev>> heap;
    std::uint64_t svc_levels = 0;   // streams materialized so far
    std::uint64_t abn_levels = s;   // highest abandon level materialized

    auto materialize = [&](double now) {
        while (svc_levels < std::min(k, s))
            heap.emplace(now + srv.exponential(spec.mu), ++svc_levels);
        if (abandons)
            while (abn_levels < k) heap.emplace(now + abn.exponential(spec.theta), ++abn_levels);
    };

    heap.emplace(arr.exponential(spec.lambda_n), 0);
    materialize(0.0);

    Tape q, a, d, l, u;
    std::uint64_t na = 0, nd = 0, nl = 0, nu = 0;
    double last = 0.0;
    while (!heap.empty()) {
        auto [te, level] = heap.top();
        if (te > T) break;
        heap.pop();
        double t = advance(last, te);
        if (t > T) break;
        if (level == 0) {
            a.add(t, static_cast<double>(++na));
            if (k < cap) {
                ++k;
                q.add(t, static_cast<double>(k));
                materialize(t);
            } else {
                u.add(t, static_cast<double>(++nu));
            }
            heap.emplace(t + arr.exponential(spec.lambda_n), 0);
        } else if (level <= s) {
            if (k >= level) {
                --k;
                d.add(t, static_cast<double>(++nd));
                q.add(t, static_cast<double>(k));
            }
            heap.emplace(t + srv.exponential(spec.mu), level);
        } else {
            if (k >= level) {
                --k;
                l.add(t, static_cast<double>(++nl));
                q.add(t, static_cast<double>(k));
            }
            heap.emplace(t + abn.exponential(spec.theta), level);
        }
    }

    QueueRealization r;
    r.spec = spec;
    r.construction = Construction::Thinning;
    r.master_seed = master_seed;
    r.replication = replication;
    r.Q = q.finish(q0, T);
    r.A = a.finish(0.0, T);
    r.D = d.finish(0.0, T);
    r.L = l.finish(0.0, T);
    r.U = u.finish(0.0, T);
    return r;
}

QueueRealization construct_service_times(const ModelSpec& spec,
                                         std::uint64_t master_seed,
                                         std::uint32_t replication) {
    spec.validate();
    if (spec.servers() != ModelSpec::kInfinite)
        throw std::invalid_argument(
            "construct_service_times: needs an infinite-server family");

    PhiloxEngine arr(master_seed, replication, StreamRole::Arrival);
    PhiloxEngine svc(master_seed, replication, StreamRole::ServiceTimes);
    PhiloxEngine res(master_seed, replication, StreamRole::Service);

    const double T = spec.horizon;
    const std::uint64_t k0 = draw_initial(spec, master_seed, replication);

    QueueRealization r;
    r.spec = spec;
    r.construction = Construction::ServiceTimes;
    r.master_seed = master_seed;
    r.replication = replication;
    r.initial_remaining.reserve(k0);
    for (std::uint64_t i = 0; i < k0; ++i)
        r.initial_remaining.push_back(spec.residual_service.sample(res));

    double t = 0.0, last = 0.0;
    while (true) {
        t += spec.arrival.sample(arr);
        if (t > T) break;
        t = advance(last, t);
        if (t > T) break;
        r.arrival_times.push_back(t);
        r.service_times.push_back(spec.service.sample(svc));
    }

    // departures: initial customers at their remaining time, arrivals at
    // arrival plus requirement; only epochs inside the horizon are events
    std::vector<double> deps;
    deps.reserve(r.initial_remaining.size() + r.arrival_times.size());
    for (double e : r.initial_remaining)
        if (e <= T) deps.push_back(e);
    for (std::size_t i = 0; i < r.arrival_times.size(); ++i) {
        double e = r.arrival_times[i] + r.service_times[i];
        if (e <= T) deps.push_back(e);
    }
    std::sort(deps.begin(), deps.end());

    Tape a;
    for (std::size_t i = 0; i < r.arrival_times.size(); ++i)
        a.add(r.arrival_times[i], static_cast<double>(i + 1));
    Tape d;
    for (std::size_t i = 0; i < deps.size();) {
        std::size_t j = i;
        while (j < deps.size() && deps[j] == deps[i]) ++j;  // net exact ties
        d.add(deps[i], static_cast<double>(j));
        i = j;
    }

    // headcount = initial + arrivals - departures, netted at shared epochs
    Tape q;
    {
        std::int64_t k = static_cast<std::int64_t>(k0);
        std::size_t ia = 0, id = 0;
        const auto& ta = r.arrival_times;
        while (ia < ta.size() || id < deps.size()) {
            double te = kInfD;
            if (ia < ta.size()) te = ta[ia];
            if (id < deps.size()) te = std::min(te, deps[id]);
            std::int64_t dk = 0;
            while (ia < ta.size() && ta[ia] == te) ++dk, ++ia;
            while (id < deps.size() && deps[id] == te) --dk, ++id;
            if (dk != 0) {
                k += dk;
                q.add(te, static_cast<double>(k));
            }
        }
    }

    r.Q = q.finish(static_cast<double>(k0), T);
    r.A = a.finish(0.0, T);
    r.D = d.finish(0.0, T);
    r.L = StepPath(0.0, T);
    r.U = StepPath(0.0, T);
    return r;
}

QueueRealization simulate(const ModelSpec& spec, Construction c,
                          std::uint64_t master_seed, std::uint32_t replication) {
    switch (c) {
        case Construction::TimeChange:
            return construct_time_change(spec, master_seed, replication);
        case Construction::Thinning:
            return construct_thinning(spec, master_seed, replication);
        case Construction::ServiceTimes:
            return construct_service_times(spec, master_seed, replication);
    }
    throw std::invalid_argument("simulate: unknown construction");
}

namespace {

LinearPath service_intensity(const QueueRealization& r) {
    const ModelSpec& spec = r.spec;
    if (spec.servers() == ModelSpec::kInfinite)
        return integral_path(r.Q, spec.mu);
    double s = static_cast<double>(spec.servers());
    return integral_path(r.Q, spec.mu, [s](double v) { return std::min(v, s); });
}

LinearPath abandon_intensity(const QueueRealization& r) {
    const ModelSpec& spec = r.spec;
    if (spec.theta == 0.0 || spec.servers() == ModelSpec::kInfinite)
        return integral_path(r.Q, 0.0);
    double s = static_cast<double>(spec.servers());
    return integral_path(r.Q, spec.theta,
                         [s](double v) { return std::max(v - s, 0.0); });
}

LinearPath arrival_intensity(const QueueRealization& r) {
    double T = r.spec.horizon;
    return LinearPath({0.0, T}, {0.0, r.spec.lambda_n * T});
}

}  // namespace

Compensators compensators(const QueueRealization& r) {
    if (r.spec.arrival.kind != Law::Kind::Exponential ||
        r.spec.service.kind != Law::Kind::Exponential)
        throw std::invalid_argument(
            "compensators: defined for exponential arrival and service laws");
    return Compensators{arrival_intensity(r), service_intensity(r),
                        abandon_intensity(r)};
}

TimeChangeClocks time_change_clocks(const QueueRealization& r) {
    if (r.spec.arrival.kind != Law::Kind::Exponential ||
        r.spec.service.kind != Law::Kind::Exponential)
        throw std::invalid_argument(
            "time_change_clocks: defined for exponential arrival and service laws");
    const ModelSpec& spec = r.spec;
    const double n = static_cast<double>(spec.n);
    const double T = spec.horizon;
    LinearPath phi_a({0.0, T}, {0.0, spec.lambda_n * T / n});
    LinearPath phi_s, phi_r;
    if (spec.servers() == ModelSpec::kInfinite) {
        phi_s = integral_path(r.Q, spec.mu / n);
        phi_r = integral_path(r.Q, 0.0);
    } else {
        double s = static_cast<double>(spec.servers());
        phi_s = integral_path(r.Q, spec.mu / n,
                              [s](double v) { return std::min(v, s); });
        phi_r = integral_path(r.Q, spec.theta / n,
                              [s](double v) { return std::max(v - s, 0.0); });
    }
    return TimeChangeClocks{std::move(phi_a), std::move(phi_s), std::move(phi_r)};
}

double two_param_count(const QueueRealization& r, double t, double y) {
    if (r.construction != Construction::ServiceTimes)
        throw std::invalid_argument(
            "two_param_count: needs the per-customer construction");
    if (t < 0.0 || t > r.spec.horizon || y < 0.0)
        throw std::domain_error("two_param_count: time outside the horizon");
    std::uint64_t count = 0;
    if (y >= t)
        for (double e : r.initial_remaining)
            if (e > t) ++count;
    for (std::size_t i = 0; i < r.arrival_times.size(); ++i) {
        double tau = r.arrival_times[i];
        if (tau > t) break;
        if (tau >= t - y && tau + r.service_times[i] > t) ++count;
    }
    return static_cast<double>(count);
}

StepPath renewal_arrivals(const Law& interarrival, double horizon,
                          std::uint64_t master_seed, std::uint32_t replication) {
    if (!(horizon > 0.0))
        throw std::invalid_argument("renewal_arrivals: horizon must be > 0");
    PhiloxEngine eng(master_seed, replication, StreamRole::Arrival);
    Tape a;
    std::uint64_t n = 0;
    double t = 0.0, last = 0.0;
    while (true) {
        t += interarrival.sample(eng);
        if (t > horizon) break;
        t = advance(last, t);
        if (t > horizon) break;
        a.add(t, static_cast<double>(++n));
    }
    return a.finish(0.0, horizon);
}

void write_event_csv(const QueueRealization& r, std::ostream& os) {
    struct Row {
        double t;
        int kind;  // 0 arrival, 1 departure, 2 abandonment, 3 blocked
    };
    static const char* kNames[] = {"arrival", "departure", "abandonment", "blocked"};
    std::vector<Row> rows;
    rows.reserve(r.A.jump_count() + r.D.jump_count() + r.L.jump_count());
    {
        // an arrival epoch shared with a blocked-counter epoch is one event
        std::size_t iu = 0;
        for (std::size_t i = 0; i < r.A.jump_count(); ++i) {
            double t = r.A.epoch(i);
            while (iu < r.U.jump_count() && r.U.epoch(iu) < t) ++iu;
            bool blocked = iu < r.U.jump_count() && r.U.epoch(iu) == t;
            rows.push_back({t, blocked ? 3 : 0});
        }
    }
    for (std::size_t i = 0; i < r.D.jump_count(); ++i)
        rows.push_back({r.D.epoch(i), 1});
    for (std::size_t i = 0; i < r.L.jump_count(); ++i)
        rows.push_back({r.L.epoch(i), 2});
    std::sort(rows.begin(), rows.end(), [](const Row& x, const Row& y) {
        return x.t < y.t || (x.t == y.t && x.kind < y.kind);
    });
    os << "t,event_type,Q_after\n";
    char buf[64];
    for (const Row& row : rows) {
        std::snprintf(buf, sizeof buf, "%.17g", row.t);
        os << buf << ',' << kNames[row.kind] << ','
           << static_cast<long long>(std::llround(r.Q.eval(row.t))) << '\n';
    }
}

}  // namespace qsim
