#include "lpma/rng.hpp"

#include <cmath>

#include "lpma/errors.hpp"

namespace lpma {

namespace {

constexpr std::uint64_t kSplitMixIncrement = 0x9e3779b97f4a7c15ULL;

std::uint64_t splitmix64(std::uint64_t z) {
    z += kSplitMixIncrement;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

std::uint64_t RngStream::derive_seed(std::uint64_t root,
                                     std::initializer_list<std::uint64_t> keys) {
    std::uint64_t state = splitmix64(root);
    for (std::uint64_t key : keys) {
        state = splitmix64(state ^ splitmix64(key));
    }
    return state;
}

double RngStream::uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RngStream::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u = 0.0;
    double v = 0.0;
    double s = 0.0;
    do {
        u = 2.0 * uniform01() - 1.0;
        v = 2.0 * uniform01() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double factor = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * factor;
    has_spare_ = true;
    return u * factor;
}

std::uint64_t RngStream::uniform_int(std::uint64_t n) {
    if (n == 0) {
        throw Error(ErrorCode::InvalidInput, "uniform_int requires n > 0");
    }
    const std::uint64_t threshold = (0ULL - n) % n;
    std::uint64_t draw = 0;
    do {
        draw = engine_();
    } while (draw < threshold);
    return draw % n;
}

double RngStream::rademacher() {
    return (engine_() & 1ULL) != 0 ? 1.0 : -1.0;
}

}  // namespace lpma
