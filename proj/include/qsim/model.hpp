// Event-driven samplers for birth-death service systems, plus an explicit
// per-customer construction for infinite-server systems with general arrival
// and service laws.  Every construction returns the full event history as
// step paths so downstream checks can work with exact path algebra.
#pragma once

#include "qsim/paths.hpp"
#include "qsim/rng.hpp"
#include "qsim/scaling.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace qsim {

enum class Family { InfiniteServer, ErlangA, FiniteRoom, GeneralArrival };

enum class Construction { TimeChange, Thinning, ServiceTimes };

const char* family_name(Family f);
const char* construction_name(Construction c);

// Nonnegative duration law, parametrized by its mean so swapping the shape
// keeps the rate fixed.  Erlang(k) has squared coefficient of variation 1/k,
// Uniform (on (0, 2*mean)) has 1/3, Deterministic has 0, Exponential has 1.
struct Law {
    enum class Kind { Exponential, Deterministic, Erlang, Uniform };
    Kind kind = Kind::Exponential;
    double mean = 1.0;
    int shape = 1;  // Erlang stage count

    static Law exponential(double mean);
    static Law deterministic(double mean);
    static Law erlang(int stages, double mean);
    static Law uniform(double mean);

    double sample(PhiloxEngine& eng) const;
    double cdf(double x) const;
    double scv() const;
};

// Law of the headcount at time zero.
struct InitialLaw {
    enum class Kind { Deterministic, Poisson };
    Kind kind = Kind::Deterministic;
    double param = 0.0;  // fixed count, or Poisson mean

    static InitialLaw fixed(std::uint64_t count);
    static InitialLaw poisson(double mean);

    std::uint64_t sample(PhiloxEngine& eng) const;
};

// Complete description of one system at one scale.
struct ModelSpec {
    static constexpr std::uint64_t kInfinite = ~std::uint64_t{0};

    Family family = Family::InfiniteServer;
    std::uint64_t n = 1;        // server count; for infinite-server systems,
                                // the centering scale
    double mu = 1.0;            // per-server service rate
    double theta = 0.0;         // abandonment rate while waiting
    double lambda_n = 1.0;      // arrival rate
    std::uint64_t m_n = kInfinite;  // waiting-room size (FiniteRoom only)
    Law arrival = Law::exponential(1.0);   // inter-arrival law, mean 1/lambda_n
    Law service = Law::exponential(1.0);   // service law, mean 1/mu
    Law residual_service = Law::exponential(1.0);  // remaining service of
                                                   // customers present at 0
    InitialLaw initial;
    double horizon = 1.0;

    static ModelSpec infinite_server(std::uint64_t n, double mu, double lambda_n,
                                     InitialLaw init, double horizon);
    static ModelSpec erlang_a(std::uint64_t n, double mu, double theta, double lambda_n,
                              InitialLaw init, double horizon);
    static ModelSpec finite_room(std::uint64_t n, double mu, double theta,
                                 std::uint64_t m_n, double lambda_n,
                                 InitialLaw init, double horizon);
    static ModelSpec general_arrival(std::uint64_t n, double mu, Law arrival_law,
                                     Law service_law, InitialLaw init, double horizon);

    std::uint64_t servers() const;   // kInfinite when every customer is served at once
    std::uint64_t capacity() const;  // servers + waiting room, saturating
    void validate() const;           // throws std::invalid_argument on inconsistency
};

// One sampled history.  Q is the headcount; A counts arrival attempts
// (including blocked ones), D service completions, L abandonments, U blocked
// arrivals.  Pointwise, Q(t) = Q(0) + A(t) - U(t) - D(t) - L(t).
struct QueueRealization {
    ModelSpec spec;
    Construction construction = Construction::TimeChange;
    std::uint64_t master_seed = 0;
    std::uint32_t replication = 0;

    StepPath Q;
    StepPath A;
    StepPath D;
    StepPath L;
    StepPath U;

    // Per-customer record, filled only by the ServiceTimes construction.
    std::vector<double> arrival_times;      // epochs of admitted arrivals
    std::vector<double> service_times;      // requirement of arrival i
    std::vector<double> initial_remaining;  // remaining work of customers at 0
};

// Single master clock: holding times are exponential in the total event rate
// and an independent uniform picks the event type.
QueueRealization construct_time_change(const ModelSpec& spec,
                                       std::uint64_t master_seed,
                                       std::uint32_t replication);

// Per-level unit streams: level k completes service at rate mu whenever at
// least k customers are present (k at most the server count), and waiting
// position j abandons at rate theta whenever at least j customers are
// present.  Streams are materialized lazily, which is distributionally
// equivalent because the streams are memoryless.
QueueRealization construct_thinning(const ModelSpec& spec,
                                    std::uint64_t master_seed,
                                    std::uint32_t replication);

// Draws each customer's arrival epoch and service requirement explicitly and
// reads the headcount off the indicator sum.  Requires an infinite-server
// family; this is the only construction that accepts non-exponential laws.
QueueRealization construct_service_times(const ModelSpec& spec,
                                         std::uint64_t master_seed,
                                         std::uint32_t replication);

QueueRealization simulate(const ModelSpec& spec, Construction c,
                          std::uint64_t master_seed, std::uint32_t replication);

// Cumulative intensities of the three counting processes, as exact
// piecewise-linear paths: t -> lambda_n * t for arrivals,
// mu * int_0^t min(Q, servers) for completions, and
// theta * int_0^t (Q - servers)^+ for abandonments.  Requires exponential
// arrival and service laws.
struct Compensators {
    LinearPath arrival;
    LinearPath service;
    LinearPath abandon;
};
Compensators compensators(const QueueRealization& r);

// Headcount at time t of customers whose elapsed time in system is at most y.
// For y >= t this includes the customers already present at time zero.
// Requires the ServiceTimes construction.
double two_param_count(const QueueRealization& r, double t, double y);

// Renewal counting process with the given inter-arrival law on [0, horizon].
StepPath renewal_arrivals(const Law& interarrival, double horizon,
                          std::uint64_t master_seed, std::uint32_t replication);

// Event log rows "t,event_type,Q_after" with types arrival, departure,
// abandonment, blocked.
void write_event_csv(const QueueRealization& r, std::ostream& os);

}  // namespace qsim
