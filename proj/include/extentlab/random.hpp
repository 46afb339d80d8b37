#pragma once

#include <cstdint>

#include "extentlab/types.hpp"

namespace extentlab
{

/**
 * Counter-based generator: output k is a SplitMix64 finalizer applied to
 * key + k * golden gamma. Streams are derived by split(), never shared, so
 * results do not depend on thread scheduling.
 */
class RandomStream
{
public:
    explicit RandomStream(std::uint64_t key = 0) : key_(key) {}

    std::uint64_t key() const { return key_; }
    std::uint64_t counter() const { return counter_; }

    std::uint64_t next_u64();
    /// Uniform in [0, 1) with 53 random bits.
    double uniform();
    /// Standard normal via Box-Muller (one draw consumes two uniforms).
    double normal();

    /// Child stream for (id, index); independent of this stream's counter.
    RandomStream split(std::uint64_t id, std::uint64_t index = 0) const;

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

/// Stream for trial `trial` of experiment `experiment_id` under `master_seed`.
RandomStream trial_stream(std::uint64_t master_seed, std::uint64_t experiment_id, std::uint64_t trial);

/// Normalized vector of independent standard complex Gaussians.
ComplexVector haar_sample(Index dimension, RandomStream &stream);

std::uint64_t mix64(std::uint64_t x);

} // namespace extentlab
