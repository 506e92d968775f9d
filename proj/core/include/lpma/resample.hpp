#pragma once

#include <span>
#include <vector>

#include "lpma/rng.hpp"

namespace lpma {

/// Residual resampling family.
enum class SchemeKind { Iid, Wild, BlockWild, Block };

/// Law of the external multiplier weights for wild-type schemes.
enum class WeightLaw { Rademacher, StandardNormal };

/// Rule mapping the target horizon to a default block length.
enum class BlockRule { FullH, OneAndHalfH };

/// Resampling scheme configuration. block_length only matters for the block
/// variants; wild resampling is the block-wild scheme with unit blocks.
struct ResampleScheme {
    SchemeKind kind = SchemeKind::BlockWild;
    int block_length = 1;
    WeightLaw weight_law = WeightLaw::Rademacher;
};

[[nodiscard]] const char* scheme_kind_name(SchemeKind kind);
[[nodiscard]] const char* weight_law_name(WeightLaw law);

/// @brief Default block length: H under FullH, floor(1.5 H) under OneAndHalfH.
[[nodiscard]] int default_block_length(int H, BlockRule rule);

/// @brief Draw a length-L innovation sequence from centered residuals.
///
/// Iid draws with replacement. Wild and BlockWild multiply the residual sequence,
/// recycled cyclically past its end, by one external weight per block of
/// block_length consecutive time points (wild = unit blocks). Block concatenates
/// moving blocks of the residuals with uniformly drawn start points, truncating
/// the final block to fit.
/// @throws Error{InvalidInput} on empty or uncentered residuals, L < 1, or a
/// block length outside [1, n] where the scheme requires one.
[[nodiscard]] std::vector<double> draw_innovations(std::span<const double> residuals, int L,
                                                   const ResampleScheme& scheme,
                                                   RngStream& rng);

}  // namespace lpma
