#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace ciuv {

/// Raised when a view/mapping representation pair does not match.
struct MappingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised on violated preconditions and malformed inputs.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A value in the unified representation (e.g. GDP growth rate in
/// percentage points). Must be finite.
struct UnifiedView {
    double value = 0.0;
};

/// A source's answer in its native representation, before mapping.
struct RawView {
    double value = 0.0;
    std::string representation_id;
};

/// Affine map from one raw representation into the unified one.
/// scale must be nonzero so the map stays invertible.
struct MappingSpec {
    std::string representation_id;
    double scale = 1.0;
    double offset = 0.0;
};

struct Question {
    std::string question_id;
    std::optional<UnifiedView> ground_truth;
};

/// One source's answer to one question, already in unified units.
/// (source_id, question_id) pairs are unique within a report set.
struct Report {
    std::string source_id;
    std::string question_id;
    UnifiedView answer;
};

/// Converts a raw view into the unified representation.
/// Throws MappingError if the spec targets a different representation.
UnifiedView map_view(const RawView& raw, const MappingSpec& spec);

/// Inverse of map_view for the same spec.
RawView unmap_view(UnifiedView view, const MappingSpec& spec);

/// Absolute difference |a - b|.
double distance(UnifiedView a, UnifiedView b);

/// Signed difference a - b. Kept separate from distance() so that error
/// means keep their sign while distances stay nonnegative.
double signed_diff(UnifiedView a, UnifiedView b);

} // namespace ciuv
