#pragma once

#include <cstdint>

namespace cpt {

/// Splittable counter-style random stream. A stream is fully identified by
/// (seed, stream_id): the same pair always reproduces the same draw sequence,
/// and distinct stream_ids give statistically independent sequences, so
/// parallel replications can each own a stream without coordination.
///
/// The generator is PCG (XSL-RR 128/64) with the stream id selecting the
/// increment sequence.
class RngStream {
public:
    RngStream() : RngStream(0, 0) {}
    RngStream(std::uint64_t seed, std::uint64_t stream_id);

    std::uint64_t next_u64();

    /// Uniform on [0, 1) with 53 random bits.
    double uniform01();

    double uniform(double lo, double hi);

    /// Standard normal via Box-Muller (pairs are cached, so draws come in
    /// a fixed order regardless of how they are consumed).
    double normal();

    /// Exponential with mean 1.
    double exponential();

    /// Uniform integer in [0, bound), rejection-sampled so it is unbiased.
    std::uint64_t below(std::uint64_t bound);

    /// Poisson with mean 1 (used for resampling weights).
    int poisson1();

    /// Child stream: deterministic function of (seed, stream_id, child),
    /// independent of how much of this stream has been consumed.
    RngStream derive(std::uint64_t child) const;

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_; }

private:
    unsigned __int128 state_;
    unsigned __int128 inc_;
    std::uint64_t seed_;
    std::uint64_t stream_;
    double cached_normal_ = 0.0;
    bool has_cached_normal_ = false;

    void step();
};

/// Stateless 64-bit mix (splitmix64 finalizer over both inputs). Used to
/// derive independent seeds for nested replication hierarchies.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

}  // namespace cpt
