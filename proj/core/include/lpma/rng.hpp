#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace lpma {

/// @brief Deterministic random stream: a mt19937_64 engine plus scalar draw helpers.
///
/// Streams are derived from a root seed and a list of integer keys via a SplitMix64
/// mixer, giving every (cell, replication, purpose) combination its own reproducible
/// substream independent of scheduling. All draws are built from the engine's raw
/// 64-bit output, so sequences are bit-identical across platforms and thread counts.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : engine_(seed) {}

    /// @brief Derive a substream seed by folding keys into the root with SplitMix64.
    [[nodiscard]] static std::uint64_t derive_seed(std::uint64_t root,
                                                   std::initializer_list<std::uint64_t> keys);

    /// @brief Construct the substream for (root, keys) directly.
    [[nodiscard]] static RngStream derive(std::uint64_t root,
                                          std::initializer_list<std::uint64_t> keys) {
        return RngStream(derive_seed(root, keys));
    }

    /// @brief Uniform draw on [0, 1) with 53-bit resolution.
    [[nodiscard]] double uniform01();

    /// @brief Standard normal draw (Marsaglia polar method, spare value cached).
    [[nodiscard]] double normal();

    /// @brief Unbiased uniform integer on [0, n); n must be positive.
    [[nodiscard]] std::uint64_t uniform_int(std::uint64_t n);

    /// @brief Rademacher draw: +1 or -1 with equal probability.
    [[nodiscard]] double rademacher();

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace lpma
