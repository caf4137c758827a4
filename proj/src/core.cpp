#include "ciuv/core.hpp"

#include <cmath>

namespace ciuv {

namespace {

void require_finite(double x, const char* what) {
    if (!std::isfinite(x)) {
        throw ValidationError(std::string(what) + " must be finite");
    }
}

} // namespace

UnifiedView map_view(const RawView& raw, const MappingSpec& spec) {
    if (raw.representation_id != spec.representation_id) {
        throw MappingError("mapping spec for '" + spec.representation_id +
                           "' applied to view in representation '" + raw.representation_id + "'");
    }
    require_finite(raw.value, "raw view value");
    if (spec.scale == 0.0) {
        throw ValidationError("mapping scale must be nonzero");
    }
    UnifiedView out{spec.scale * raw.value + spec.offset};
    require_finite(out.value, "mapped view value");
    return out;
}

RawView unmap_view(UnifiedView view, const MappingSpec& spec) {
    require_finite(view.value, "unified view value");
    if (spec.scale == 0.0) {
        throw ValidationError("mapping scale must be nonzero");
    }
    return RawView{(view.value - spec.offset) / spec.scale, spec.representation_id};
}

double distance(UnifiedView a, UnifiedView b) {
    require_finite(a.value, "view value");
    require_finite(b.value, "view value");
    return std::abs(a.value - b.value);
}

double signed_diff(UnifiedView a, UnifiedView b) {
    require_finite(a.value, "view value");
    require_finite(b.value, "view value");
    return a.value - b.value;
}

} // namespace ciuv
