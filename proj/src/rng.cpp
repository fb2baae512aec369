#include "cpt/rng.hpp"

#include <cmath>
#include <limits>

namespace cpt {

namespace {

constexpr unsigned __int128 kPcgMultiplier =
    (static_cast<unsigned __int128>(2549297995355413924ULL) << 64) | 4865540595714422341ULL;

inline std::uint64_t rotr64(std::uint64_t value, unsigned rot) {
    return (value >> rot) | (value << ((-rot) & 63u));
}

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_(stream_id) {
    inc_ = (static_cast<unsigned __int128>(stream_id) << 1) | 1u;
    state_ = 0;
    step();
    state_ += seed;
    step();
}

void RngStream::step() {
    state_ = state_ * kPcgMultiplier + inc_;
}

std::uint64_t RngStream::next_u64() {
    step();
    const std::uint64_t xored =
        static_cast<std::uint64_t>(state_ >> 64) ^ static_cast<std::uint64_t>(state_);
    const unsigned rot = static_cast<unsigned>(state_ >> 122);
    return rotr64(xored, rot);
}

double RngStream::uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform01();
}

double RngStream::normal() {
    if (has_cached_normal_) {
        has_cached_normal_ = false;
        return cached_normal_;
    }
    double u1 = 0.0;
    do {
        u1 = uniform01();
    } while (u1 <= 0.0);
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * M_PI * u2;
    cached_normal_ = radius * std::sin(angle);
    has_cached_normal_ = true;
    return radius * std::cos(angle);
}

double RngStream::exponential() {
    return -std::log1p(-uniform01());
}

std::uint64_t RngStream::below(std::uint64_t bound) {
    const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t limit = max - max % bound;  // multiple of bound
    std::uint64_t r = 0;
    do {
        r = next_u64();
    } while (r >= limit);
    return r % bound;
}

int RngStream::poisson1() {
    // Knuth's product method; mean 1 keeps the loop short.
    static const double kThreshold = std::exp(-1.0);
    int k = 0;
    double p = 1.0;
    do {
        ++k;
        p *= uniform01();
    } while (p > kThreshold);
    return k - 1;
}

RngStream RngStream::derive(std::uint64_t child) const {
    return RngStream(mix_seed(seed_, splitmix64(stream_)), child);
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    return splitmix64(a ^ splitmix64(b + 0x517cc1b727220a95ULL));
}

}  // namespace cpt
