#include "zdt/features.hpp"

#include "zdt/common.hpp"

namespace zdt {

const std::array<std::string, kFeatureDim>& feature_names() {
    static const std::array<std::string, kFeatureDim> names = [] {
        std::array<std::string, kFeatureDim> n;
        int i = 0;
        n[i++] = "duration";
        n[i++] = "src_port";
        n[i++] = "dst_port";
        n[i++] = "fwd_bytes";
        n[i++] = "bwd_bytes";
        for (const char* side : {"src", "dst"})
            for (const char* f : kHostFeatureNames) n[i++] = std::string(side) + "_" + f;
        n[i++] = "cross_community";
        return n;
    }();
    return names;
}

std::uint64_t feature_layout_checksum() {
    std::string joined;
    for (const auto& name : feature_names()) {
        if (!joined.empty()) joined.push_back(',');
        joined += name;
    }
    return fnv1a64(joined);
}

FeatureVector assemble_features(const FlowRecord& record, std::int64_t record_id,
                                const std::map<std::string, HostFeatures>& host_features,
                                const std::map<std::string, int>& communities) {
    auto src_f = host_features.find(record.src_ip);
    auto dst_f = host_features.find(record.dst_ip);
    auto src_c = communities.find(record.src_ip);
    auto dst_c = communities.find(record.dst_ip);
    if (src_f == host_features.end() || src_c == communities.end())
        throw UnknownHostError(record.src_ip);
    if (dst_f == host_features.end() || dst_c == communities.end())
        throw UnknownHostError(record.dst_ip);

    FeatureVector v;
    v.record_id = record_id;
    int i = 0;
    v.values[i++] = record.duration;
    v.values[i++] = static_cast<double>(record.src_port);
    v.values[i++] = static_cast<double>(record.dst_port);
    v.values[i++] = static_cast<double>(record.fwd_bytes);
    v.values[i++] = static_cast<double>(record.bwd_bytes);
    for (double x : src_f->second.as_array()) v.values[i++] = x;
    for (double x : dst_f->second.as_array()) v.values[i++] = x;
    v.values[i++] = src_c->second != dst_c->second ? 1.0 : 0.0;
    return v;
}

}  // namespace zdt
