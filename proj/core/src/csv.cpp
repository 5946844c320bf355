#include "zdt/csv.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>

namespace zdt::csv {

bool Reader::next(std::vector<std::string>& row) {
    row.clear();
    std::string field;
    bool in_quotes = false;
    bool any = false;
    int c;
    row_start_line_ = cur_line_ + 1;
    while ((c = in_.get()) != std::char_traits<char>::eof()) {
        any = true;
        if (in_quotes) {
            if (c == '"') {
                if (in_.peek() == '"') {
                    in_.get();
                    field.push_back('"');
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++cur_line_;
                field.push_back(static_cast<char>(c));
            }
            continue;
        }
        switch (c) {
            case '"':
                in_quotes = true;
                break;
            case ',':
                row.push_back(std::move(field));
                field.clear();
                break;
            case '\r':
                break;
            case '\n':
                ++cur_line_;
                row.push_back(std::move(field));
                return true;
            default:
                field.push_back(static_cast<char>(c));
        }
    }
    if (!any) return false;
    ++cur_line_;
    row.push_back(std::move(field));
    return true;
}

std::string escape(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out.push_back('"');
    return out;
}

void write_row(std::ostream& out, const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out.put(',');
        out << escape(row[i]);
    }
    out.put('\n');
}

std::string format_double(double v) {
    char buf[40];
    // Try increasing precision until the text parses back to the same bits.
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

}  // namespace zdt::csv
