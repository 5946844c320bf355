#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace zdt::csv {

// RFC-4180-ish reader: quoted fields may contain commas, doubled quotes and
// newlines. Handles trailing CR from CRLF files.
class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}

    // Reads the next row. Returns false at end of input.
    bool next(std::vector<std::string>& row);

    // 1-based line number of the first line of the row most recently read.
    std::size_t line() const { return row_start_line_; }

private:
    std::istream& in_;
    std::size_t cur_line_ = 0;
    std::size_t row_start_line_ = 0;
};

std::string escape(const std::string& field);
void write_row(std::ostream& out, const std::vector<std::string>& row);

// Shortest decimal text that round-trips the double exactly.
std::string format_double(double v);

}  // namespace zdt::csv
