#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "zdt/flow.hpp"
#include "zdt/graph.hpp"

namespace zdt {

inline constexpr int kFeatureDim = 24;

// Fixed layout: 5 flow features, 9 source-host features, 9 destination-host
// features, cross-community flag. Timestamp is used only for upstream graph
// windowing and is never a model input; endpoint addresses are likewise
// excluded.
const std::array<std::string, kFeatureDim>& feature_names();

// FNV-1a over the comma-joined layout names; persisted in model bundles so a
// model can never be applied to vectors with a different layout.
std::uint64_t feature_layout_checksum();

struct FeatureVector {
    std::array<double, kFeatureDim> values{};
    std::int64_t record_id = 0;
};

// Both endpoints must be present in the maps; throws UnknownHostError
// otherwise. Deterministic: identical inputs produce bitwise-identical
// vectors.
FeatureVector assemble_features(const FlowRecord& record, std::int64_t record_id,
                                const std::map<std::string, HostFeatures>& host_features,
                                const std::map<std::string, int>& communities);

}  // namespace zdt
