#pragma once

#include <span>
#include <string>
#include <vector>

#include "ciuv/core.hpp"
#include "ciuv/reliability.hpp"

namespace ciuv {

/// Sources ordered most trustworthy first, plus a note on where the
/// ordering came from.
struct TrustRanking {
    std::vector<std::string> ordered_sources;
    std::string provenance;
};

/// Plain mean of the views.
UnifiedView mean_estimate(std::span<const UnifiedView> views);

/// Middle view for an odd count, mean of the two middle views for even.
UnifiedView median_estimate(std::span<const UnifiedView> views);

/// The view with the smallest total distance to all other views.
/// Ties go to the lowest input index.
UnifiedView voting_estimate(std::span<const UnifiedView> views);

/// Mean of the views from the k most trusted sources. views[i] must belong
/// to source_ids[i]; the ranking must cover every listed source.
UnifiedView k_sources_estimate(std::span<const UnifiedView> views,
                               std::span<const std::string> source_ids,
                               const TrustRanking& ranking, std::size_t k);

/// Ranks sources by ascending |mu| + sigma, the scalarization of
/// "small mean error and small spread". Ties break on source id.
TrustRanking rank_by_profiles(std::span<const ReliabilityProfile> profiles);

} // namespace ciuv
