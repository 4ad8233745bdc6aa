#pragma once

#include <cstdint>
#include <random>

namespace granoise {

/// Keyed random substreams: stream(index, domain) depends only on
/// (seed, domain, index), so any worker may run any trial and reproduce it
/// exactly. Each substream is a Mersenne twister seeded through seed_seq.
class SubstreamFactory {
  public:
    explicit SubstreamFactory(std::uint64_t seed) : seed_(seed) {}

    std::mt19937_64 stream(std::uint64_t index, std::uint64_t domain = 0) const {
        std::seed_seq seq{lo(seed_), hi(seed_), lo(domain), hi(domain), lo(index), hi(index)};
        return std::mt19937_64(seq);
    }

    std::uint64_t seed() const { return seed_; }

  private:
    static std::uint32_t lo(std::uint64_t x) { return static_cast<std::uint32_t>(x); }
    static std::uint32_t hi(std::uint64_t x) { return static_cast<std::uint32_t>(x >> 32); }

    std::uint64_t seed_;
};

}  // namespace granoise
