#pragma once

#include "monk/error.hpp"
#include "monk/kernels.hpp"
#include "monk/types.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <string>

namespace monk {

// Single-column CSV: header "value" for reals, "sequence" for strings.
inline void write_sample_csv(std::ostream& out, const Sample& sample)
{
    bool strings = !sample.empty() && std::holds_alternative<std::string>(sample.front());
    out << (strings ? "sequence" : "value") << '\n';
    for (const auto& p : sample) {
        if (const double* v = std::get_if<double>(&p); v && !strings) {
            out << detail::format_real(*v) << '\n';
        } else if (const std::string* s = std::get_if<std::string>(&p); s && strings) {
            out << *s << '\n';
        } else {
            throw DataError("write_sample_csv: mixed or vector-valued points cannot be written");
        }
    }
}

inline Sample read_sample_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line)) {
        throw DataError("sample csv: missing header");
    }
    const std::string header = detail::trim(line);
    const bool strings = header == "sequence";
    if (!strings && header != "value") {
        throw DataError("sample csv: header must be 'value' or 'sequence', got '" + header + "'");
    }
    Sample out;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string field = detail::trim(line);
        if (field.empty()) {
            continue;
        }
        if (strings) {
            out.emplace_back(field);
            continue;
        }
        try {
            out.emplace_back(detail::parse_real(field, "sample"));
        } catch (const InvalidArgument&) {
            throw DataError("sample csv: line " + std::to_string(line_no) + " is not a number: '" + field + "'");
        }
    }
    return out;
}

inline Sample read_sample_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot read sample file '" + path + "'");
    }
    return read_sample_csv(in);
}

} // namespace monk
