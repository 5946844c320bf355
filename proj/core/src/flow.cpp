#include "zdt/flow.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "zdt/csv.hpp"

namespace zdt {

FlowSchema FlowSchema::canonical() {
    FlowSchema s;
    for (const auto& f : canonical_fields()) s.columns[f] = f;
    return s;
}

const std::vector<std::string>& FlowSchema::canonical_fields() {
    static const std::vector<std::string> fields = {
        "ts", "src_ip", "dst_ip", "src_port", "dst_port",
        "duration", "fwd_bytes", "bwd_bytes", "label"};
    return fields;
}

std::string FlowSchema::column_for(const std::string& field) const {
    auto it = columns.find(field);
    return it == columns.end() ? field : it->second;
}

namespace {

bool parse_i64(const std::string& s, std::int64_t& out) {
    const char* b = s.data();
    const char* e = b + s.size();
    auto [p, ec] = std::from_chars(b, e, out);
    return ec == std::errc{} && p == e;
}

bool parse_f64(const std::string& s, double& out) {
    if (s.empty()) return false;
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size() && std::isfinite(out);
}

}  // namespace

std::vector<FlowRecord> parse_flow_csv(std::istream& in, const FlowSchema& schema,
                                       ParseReport* report) {
    ParseReport local;
    ParseReport& rep = report ? *report : local;

    csv::Reader reader(in);
    std::vector<std::string> header;
    if (!reader.next(header)) return {};

    auto column_index = [&](const std::string& field) -> int {
        const std::string col = schema.column_for(field);
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == col) return static_cast<int>(i);
        return -1;
    };

    // The eight numeric/endpoint columns are required; label is optional.
    std::map<std::string, int> idx;
    for (const auto& field : FlowSchema::canonical_fields()) {
        int i = column_index(field);
        if (i < 0 && field != "label")
            throw DataError("flow csv schema error: missing column '" + schema.column_for(field) +
                            "' (mapped from field '" + field + "')");
        idx[field] = i;
    }

    std::vector<FlowRecord> records;
    std::vector<std::string> row;
    while (reader.next(row)) {
        if (row.size() == 1 && row[0].empty()) continue;  // blank line
        auto fail = [&](const std::string& msg) {
            rep.rows_skipped++;
            rep.errors.push_back({reader.line(), msg});
        };
        if (row.size() < header.size()) {
            fail("expected " + std::to_string(header.size()) + " fields, got " +
                 std::to_string(row.size()));
            continue;
        }
        FlowRecord r;
        std::int64_t port = 0;
        if (!parse_i64(row[idx["ts"]], r.timestamp)) {
            fail("bad ts '" + row[idx["ts"]] + "'");
            continue;
        }
        r.src_ip = row[idx["src_ip"]];
        r.dst_ip = row[idx["dst_ip"]];
        if (r.src_ip.empty() || r.dst_ip.empty()) {
            fail("empty endpoint");
            continue;
        }
        if (!parse_i64(row[idx["src_port"]], port) || port < 0 || port > 65535) {
            fail("bad src_port '" + row[idx["src_port"]] + "'");
            continue;
        }
        r.src_port = static_cast<int>(port);
        if (!parse_i64(row[idx["dst_port"]], port) || port < 0 || port > 65535) {
            fail("bad dst_port '" + row[idx["dst_port"]] + "'");
            continue;
        }
        r.dst_port = static_cast<int>(port);
        if (!parse_f64(row[idx["duration"]], r.duration) || r.duration < 0) {
            fail("bad duration '" + row[idx["duration"]] + "'");
            continue;
        }
        if (!parse_i64(row[idx["fwd_bytes"]], r.fwd_bytes) || r.fwd_bytes < 0) {
            fail("bad fwd_bytes '" + row[idx["fwd_bytes"]] + "'");
            continue;
        }
        if (!parse_i64(row[idx["bwd_bytes"]], r.bwd_bytes) || r.bwd_bytes < 0) {
            fail("bad bwd_bytes '" + row[idx["bwd_bytes"]] + "'");
            continue;
        }
        if (idx["label"] >= 0) r.label = row[idx["label"]];
        records.push_back(std::move(r));
        rep.rows_parsed++;
    }
    return records;
}

std::vector<FlowRecord> read_flow_csv_file(const std::string& path, const FlowSchema& schema,
                                           ParseReport* report) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open flow csv: " + path);
    return parse_flow_csv(in, schema, report);
}

void write_flow_csv(std::ostream& out, const std::vector<FlowRecord>& records) {
    out << "ts,src_ip,dst_ip,src_port,dst_port,duration,fwd_bytes,bwd_bytes,label\n";
    for (const auto& r : records) {
        csv::write_row(out, {std::to_string(r.timestamp), r.src_ip, r.dst_ip,
                             std::to_string(r.src_port), std::to_string(r.dst_port),
                             csv::format_double(r.duration), std::to_string(r.fwd_bytes),
                             std::to_string(r.bwd_bytes), r.label});
    }
}

void write_flow_csv_file(const std::string& path, const std::vector<FlowRecord>& records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open output file: " + path);
    write_flow_csv(out, records);
    if (!out.flush()) throw DataError("write failure: " + path);
}

}  // namespace zdt
