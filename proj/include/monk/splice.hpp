#pragma once

#include "monk/error.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace monk {

enum class SpliceLabel { EI, IE, N };

inline std::string_view label_name(SpliceLabel label)
{
    switch (label) {
    case SpliceLabel::EI: return "EI";
    case SpliceLabel::IE: return "IE";
    case SpliceLabel::N: return "N";
    }
    return "?";
}

struct SpliceRecord {
    SpliceLabel label = SpliceLabel::N;
    std::string id;
    std::string sequence; // 60 symbols over A C G T D N S R
};

struct SpliceDiagnostic {
    std::size_t line = 0; // 1-based
    std::string message;
};

struct SpliceData {
    std::vector<SpliceRecord> records;
    std::vector<SpliceDiagnostic> diagnostics; // skipped lines
};

inline constexpr std::size_t kSpliceSequenceLength = 60;

// Class sizes of the UCI "Molecular Biology (Splice-junction Gene Sequences)" file.
inline const std::map<SpliceLabel, std::size_t>& uci_splice_class_counts()
{
    static const std::map<SpliceLabel, std::size_t> counts{
        {SpliceLabel::EI, 767}, {SpliceLabel::IE, 768}, {SpliceLabel::N, 1655}};
    return counts;
}

namespace detail {

inline std::string strip_upper(std::string_view s, bool drop_inner_space)
{
    std::string out;
    for (char ch : s) {
        const auto c = static_cast<unsigned char>(ch);
        if (std::isspace(c) && (drop_inner_space || out.empty())) {
            continue;
        }
        out.push_back(static_cast<char>(std::toupper(c)));
    }
    while (!out.empty() && std::isspace(static_cast<unsigned char>(out.back()))) {
        out.pop_back();
    }
    return out;
}

} // namespace detail

// Parses "label, id, sequence" lines. Malformed lines are skipped and reported.
inline SpliceData load_splice(std::istream& in)
{
    SpliceData data;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) {
            continue;
        }
        auto report = [&](std::string msg) { data.diagnostics.push_back({line_no, std::move(msg)}); };

        const auto c1 = line.find(',');
        const auto c2 = c1 == std::string::npos ? std::string::npos : line.find(',', c1 + 1);
        if (c2 == std::string::npos || line.find(',', c2 + 1) != std::string::npos) {
            report("expected 3 comma-separated fields");
            continue;
        }
        const std::string label = detail::strip_upper(std::string_view(line).substr(0, c1), true);
        const std::string id = detail::strip_upper(std::string_view(line).substr(c1 + 1, c2 - c1 - 1), false);
        const std::string seq = detail::strip_upper(std::string_view(line).substr(c2 + 1), true);

        SpliceRecord rec;
        if (label == "EI") {
            rec.label = SpliceLabel::EI;
        } else if (label == "IE") {
            rec.label = SpliceLabel::IE;
        } else if (label == "N") {
            rec.label = SpliceLabel::N;
        } else {
            report("unknown label '" + label + "'");
            continue;
        }
        if (seq.size() != kSpliceSequenceLength) {
            report("sequence has length " + std::to_string(seq.size()) + ", expected 60");
            continue;
        }
        if (seq.find_first_not_of("ACGTDNSR") != std::string::npos) {
            report("sequence contains a symbol outside ACGTDNSR");
            continue;
        }
        rec.id = id;
        rec.sequence = seq;
        data.records.push_back(std::move(rec));
    }
    return data;
}

inline SpliceData load_splice(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw DataError("load_splice: cannot read '" + path + "'");
    }
    return load_splice(in);
}

inline std::map<SpliceLabel, std::size_t> class_counts(const std::vector<SpliceRecord>& records)
{
    std::map<SpliceLabel, std::size_t> counts;
    for (const auto& r : records) {
        ++counts[r.label];
    }
    return counts;
}

inline std::vector<std::string> sequences_with_label(const std::vector<SpliceRecord>& records, SpliceLabel label)
{
    std::vector<std::string> out;
    for (const auto& r : records) {
        if (r.label == label) {
            out.push_back(r.sequence);
        }
    }
    return out;
}

} // namespace monk
