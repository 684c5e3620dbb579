// Counter-based random number streams.  Each (master seed, replication id,
// stream role) triple addresses an independent substream, so replications can
// run on any worker in any order and still produce identical draws.
#pragma once

#include <array>
#include <cstdint>

namespace qsim {

// One block of the Philox-4x32 keyed bijection, 10 rounds.
std::array<std::uint32_t, 4> philox4x32_10(const std::array<std::uint32_t, 4>& counter,
                                           const std::array<std::uint32_t, 2>& key);

// Stream roles; fixed numbering is part of the reproducibility contract.
enum class StreamRole : std::uint32_t {
    Arrival = 0,
    Service = 1,
    Abandon = 2,
    InitialState = 3,
    ServiceTimes = 4,
    UniformField = 5,
    Gaussian = 6,
    Bridge = 7,
    EventType = 8,
    Misc = 9,
};

// UniformRandomBitGenerator over a Philox substream.  Counter layout:
// word0/word1 = 64-bit draw index, word2 = role, word3 = replication.
class PhiloxEngine {
public:
    using result_type = std::uint64_t;

    PhiloxEngine(std::uint64_t master_seed, std::uint32_t replication, StreamRole role)
        : key_{static_cast<std::uint32_t>(master_seed),
               static_cast<std::uint32_t>(master_seed >> 32)},
          ctr_{0, 0, static_cast<std::uint32_t>(role), replication} {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~0ull; }

    result_type operator()() {
        if (have_ == 0) refill();
        --have_;
        std::uint64_t hi = buf_[2 * (1 - have_) ];
        std::uint64_t lo = buf_[2 * (1 - have_) + 1];
        return (hi << 32) | lo;
    }

    // uniform on the open interval (0, 1); safe for log transforms
    double uniform01() {
        return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
    }

    double exponential(double rate);  // mean 1/rate
    double normal();                  // standard normal, Box-Muller pair cache

private:
    void refill() {
        auto out = philox4x32_10(ctr_, key_);
        buf_ = out;
        if (++ctr_[0] == 0) ++ctr_[1];
        have_ = 2;
    }

    std::array<std::uint32_t, 2> key_;
    std::array<std::uint32_t, 4> ctr_;
    std::array<std::uint32_t, 4> buf_{};
    int have_ = 0;
    double cached_normal_ = 0.0;
    bool has_cached_normal_ = false;
};

}  // namespace qsim
