#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "zdt/common.hpp"

namespace zdt {

// One network connection event. Host identifiers are opaque strings; nothing
// downstream requires them to be well-formed IP addresses.
struct FlowRecord {
    std::int64_t timestamp = 0;  // seconds since Unix epoch
    std::string src_ip;
    std::string dst_ip;
    int src_port = 0;  // [0, 65535]
    int dst_port = 0;  // [0, 65535]
    double duration = 0.0;      // seconds, >= 0
    std::int64_t fwd_bytes = 0; // >= 0
    std::int64_t bwd_bytes = 0; // >= 0
    std::string label;          // empty = unlabeled; "benign" or an attack class name

    bool labeled() const { return !label.empty(); }
    // Unlabeled traffic is treated as benign (real flow exports are
    // overwhelmingly benign and usually unlabeled).
    bool benign() const { return label.empty() || label == "benign"; }

    bool operator==(const FlowRecord&) const = default;
};

// Maps the nine canonical field names to the column headers of a concrete
// CSV export. Canonical names: ts, src_ip, dst_ip, src_port, dst_port,
// duration, fwd_bytes, bwd_bytes, label.
struct FlowSchema {
    std::map<std::string, std::string> columns;

    static FlowSchema canonical();
    static const std::vector<std::string>& canonical_fields();

    // Column header for a canonical field (defaults to the field name).
    std::string column_for(const std::string& field) const;
};

struct RowError {
    std::size_t line = 0;  // 1-based line in the source stream
    std::string message;
};

struct ParseReport {
    std::size_t rows_parsed = 0;
    std::size_t rows_skipped = 0;
    std::vector<RowError> errors;
};

// Parses a flow CSV with a header row. Malformed data rows are skipped and
// reported; a missing mapped column (other than the optional label) throws
// DataError naming the column.
std::vector<FlowRecord> parse_flow_csv(std::istream& in, const FlowSchema& schema,
                                       ParseReport* report = nullptr);

std::vector<FlowRecord> read_flow_csv_file(const std::string& path, const FlowSchema& schema,
                                           ParseReport* report = nullptr);

// Canonical-column serialization; parse(write(records)) reproduces all nine
// fields exactly.
void write_flow_csv(std::ostream& out, const std::vector<FlowRecord>& records);
void write_flow_csv_file(const std::string& path, const std::vector<FlowRecord>& records);

}  // namespace zdt
