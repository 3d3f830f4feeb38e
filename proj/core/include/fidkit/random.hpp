#pragma once

#include <cstdint>
#include <random>

namespace fidkit {

/// Deterministic random stream keyed by (seed, stream_id).
///
/// The same (seed, stream_id) pair yields the same draw sequence on every
/// platform: the engine is the fully specified std::mt19937_64 and all
/// variate transforms below avoid std::*_distribution, whose output is
/// implementation-defined. Distinct stream ids give independent streams.
/// Instances are not shareable across threads; each worker owns its own.
class RandomSource {
public:
    explicit RandomSource(std::uint64_t seed, std::uint64_t stream_id = 0);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_; }

    /// Child stream derived by mixing `child` into this stream's id.
    /// Used to shard work (replicates, proposal blocks) deterministically.
    RandomSource substream(std::uint64_t child) const;

    std::uint64_t next_u64();

    /// Uniform on the open interval (0, 1).
    double uniform();

    /// Uniform on (lo, hi).
    double uniform(double lo, double hi);

    /// Standard normal via the Marsaglia polar transform.
    double normal();

    /// Standard Laplace (density e^{-|z|}/2) via inverse-CDF transform.
    double laplace();

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace fidkit
