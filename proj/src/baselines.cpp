#include "ciuv/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "ciuv/fusion.hpp"

namespace ciuv {

UnifiedView mean_estimate(std::span<const UnifiedView> views) {
    if (views.empty()) {
        throw ValidationError("mean_estimate needs at least one view");
    }
    return fuse(views, uniform_weights(views.size()));
}

UnifiedView median_estimate(std::span<const UnifiedView> views) {
    if (views.empty()) {
        throw ValidationError("median_estimate needs at least one view");
    }
    std::vector<double> sorted;
    sorted.reserve(views.size());
    for (const UnifiedView& v : views) {
        sorted.push_back(v.value);
    }
    std::sort(sorted.begin(), sorted.end());
    const std::size_t m = sorted.size();
    if (m % 2 == 1) {
        return UnifiedView{sorted[m / 2]};
    }
    return UnifiedView{0.5 * (sorted[m / 2 - 1] + sorted[m / 2])};
}

UnifiedView voting_estimate(std::span<const UnifiedView> views) {
    if (views.empty()) {
        throw ValidationError("voting_estimate needs at least one view");
    }
    std::size_t best = 0;
    double best_total = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < views.size(); ++i) {
        double total = 0.0;
        for (std::size_t j = 0; j < views.size(); ++j) {
            total += distance(views[i], views[j]);
        }
        if (total < best_total) {
            best_total = total;
            best = i;
        }
    }
    return views[best];
}

UnifiedView k_sources_estimate(std::span<const UnifiedView> views,
                               std::span<const std::string> source_ids,
                               const TrustRanking& ranking, std::size_t k) {
    if (views.size() != source_ids.size()) {
        throw ValidationError("k_sources_estimate: views/source_ids length mismatch");
    }
    if (k == 0 || k > views.size()) {
        throw ValidationError("k_sources_estimate: k out of range");
    }
    std::set<std::string> ranked(ranking.ordered_sources.begin(), ranking.ordered_sources.end());
    if (ranked.size() != ranking.ordered_sources.size()) {
        throw ValidationError("trust ranking contains duplicate sources");
    }
    for (const std::string& s : source_ids) {
        if (!ranked.contains(s)) {
            throw ValidationError("trust ranking does not cover source '" + s + "'");
        }
    }
    // Top-k present sources by ranking order; the selected views keep their
    // input order so k = m reduces to mean_estimate exactly.
    std::set<std::string> chosen;
    for (const std::string& s : ranking.ordered_sources) {
        if (chosen.size() == k) {
            break;
        }
        if (std::find(source_ids.begin(), source_ids.end(), s) != source_ids.end()) {
            chosen.insert(s);
        }
    }
    std::vector<UnifiedView> selected;
    selected.reserve(k);
    for (std::size_t i = 0; i < views.size(); ++i) {
        if (chosen.contains(source_ids[i])) {
            selected.push_back(views[i]);
        }
    }
    return mean_estimate(selected);
}

TrustRanking rank_by_profiles(std::span<const ReliabilityProfile> profiles) {
    std::vector<const ReliabilityProfile*> order;
    order.reserve(profiles.size());
    for (const ReliabilityProfile& p : profiles) {
        order.push_back(&p);
    }
    std::stable_sort(order.begin(), order.end(),
                     [](const ReliabilityProfile* a, const ReliabilityProfile* b) {
                         const double ka = std::abs(a->mu) + std::sqrt(a->sigma2);
                         const double kb = std::abs(b->mu) + std::sqrt(b->sigma2);
                         if (ka != kb) {
                             return ka < kb;
                         }
                         return a->source_id < b->source_id;
                     });
    TrustRanking ranking;
    ranking.provenance = "ascending |mu| + sigma over prior probe questions";
    for (const ReliabilityProfile* p : order) {
        ranking.ordered_sources.push_back(p->source_id);
    }
    return ranking;
}

} // namespace ciuv
