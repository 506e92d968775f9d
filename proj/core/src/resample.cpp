#include "lpma/resample.hpp"

#include <cmath>
#include <cstdint>

#include "lpma/errors.hpp"

namespace lpma {

const char* scheme_kind_name(SchemeKind kind) {
    switch (kind) {
        case SchemeKind::Iid: return "iid";
        case SchemeKind::Wild: return "wild";
        case SchemeKind::BlockWild: return "bwb";
        case SchemeKind::Block: return "bb";
    }
    return "unknown";
}

const char* weight_law_name(WeightLaw law) {
    return law == WeightLaw::Rademacher ? "rademacher" : "normal";
}

int default_block_length(int H, BlockRule rule) {
    if (H < 1) throw Error(ErrorCode::InvalidInput, "horizon must be positive");
    if (rule == BlockRule::FullH) return H;
    return static_cast<int>(std::floor(1.5 * static_cast<double>(H)));
}

namespace {

double draw_weight(WeightLaw law, RngStream& rng) {
    return law == WeightLaw::Rademacher ? static_cast<double>(rng.rademacher()) : rng.normal();
}

void check_centered(std::span<const double> residuals) {
    double mean = 0.0;
    for (double r : residuals) mean += r;
    mean /= static_cast<double>(residuals.size());
    double ss = 0.0;
    for (double r : residuals) ss += (r - mean) * (r - mean);
    const double sd = std::sqrt(ss / static_cast<double>(residuals.size()));
    if (std::abs(mean) > 1e-8 * (sd + 1e-300) && sd > 0.0) {
        throw Error(ErrorCode::InvalidInput, "residuals must be centered before resampling",
                    mean);
    }
}

}  // namespace

std::vector<double> draw_innovations(std::span<const double> residuals, int L,
                                     const ResampleScheme& scheme, RngStream& rng) {
    if (residuals.empty()) throw Error(ErrorCode::InvalidInput, "no residuals to resample");
    if (L < 1) throw Error(ErrorCode::InvalidInput, "innovation length must be positive");
    check_centered(residuals);
    const int n = static_cast<int>(residuals.size());
    std::vector<double> out(static_cast<std::size_t>(L));

    switch (scheme.kind) {
        case SchemeKind::Iid: {
            for (int t = 0; t < L; ++t) {
                out[static_cast<std::size_t>(t)] =
                    residuals[rng.uniform_int(static_cast<std::uint64_t>(n))];
            }
            break;
        }
        case SchemeKind::Wild:
        case SchemeKind::BlockWild: {
            const int l = scheme.kind == SchemeKind::Wild ? 1 : scheme.block_length;
            if (l < 1) throw Error(ErrorCode::InvalidInput, "block length must be positive");
            double w = 0.0;
            for (int t = 0; t < L; ++t) {
                if (t % l == 0) w = draw_weight(scheme.weight_law, rng);
                out[static_cast<std::size_t>(t)] =
                    w * residuals[static_cast<std::size_t>(t % n)];
            }
            break;
        }
        case SchemeKind::Block: {
            const int l = scheme.block_length;
            if (l < 1 || l > n) {
                throw Error(ErrorCode::InvalidInput,
                            "block length must lie in [1, n] for block resampling",
                            static_cast<double>(l));
            }
            int filled = 0;
            while (filled < L) {
                const int start =
                    static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(n - l + 1)));
                const int take = std::min(l, L - filled);
                for (int i = 0; i < take; ++i) {
                    out[static_cast<std::size_t>(filled + i)] =
                        residuals[static_cast<std::size_t>(start + i)];
                }
                filled += take;
            }
            break;
        }
    }
    return out;
}

}  // namespace lpma
