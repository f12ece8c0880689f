#pragma once

// CSV files exchanged with the outside world.
//
//   polymer records : id,smiles,gap_ev
//   features        : id,x1,...,xk,label      (label is +1 or -1)
//   encoded SMILES  : id,label,gap_ev,t0,...,t138

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "polyqc/dataset.hpp"
#include "polyqc/errors.hpp"
#include "polyqc/featurize.hpp"

namespace polyqc {

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

inline std::string trim(std::string s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
    std::size_t b = 0;
    while (b < s.size() && s[b] == ' ') ++b;
    return s.substr(b);
}

inline double parse_double(const std::string& text, std::size_t line, const char* what) {
    const std::string t = trim(text);
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE)
        throw ParseError(std::string("malformed ") + what + " '" + t + "'", line);
    if (!std::isfinite(v)) throw ParseError(std::string("non-finite ") + what + " '" + t + "'", line);
    return v;
}

inline std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open '" + path.string() + "'");
    return in;
}

inline std::string format_double(double v) {
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.17g", v);
    return buffer;
}

}  // namespace detail

inline std::vector<PolymerRecord> read_polymer_csv(const std::filesystem::path& path) {
    auto in = detail::open_input(path);
    std::string line;
    if (!std::getline(in, line) || detail::trim(line) != "id,smiles,gap_ev")
        throw ParseError("expected header 'id,smiles,gap_ev'", 1);
    std::vector<PolymerRecord> records;
    for (std::size_t n = 2; std::getline(in, line); ++n) {
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto fields = detail::split_csv_line(line);
        if (fields.size() != 3) throw ParseError("expected 3 fields, found " + std::to_string(fields.size()), n);
        records.push_back({detail::trim(fields[0]), detail::trim(fields[1]), detail::parse_double(fields[2], n, "gap")});
    }
    return records;
}

struct FeaturesCsv {
    Dataset vectors;
    std::size_t dim = 0;
    std::vector<std::string> warnings;
};

inline FeaturesCsv read_features_csv(const std::filesystem::path& path) {
    auto in = detail::open_input(path);
    std::string line;
    if (!std::getline(in, line)) throw ParseError("missing header", 1);
    const auto header = detail::split_csv_line(detail::trim(line));
    if (header.size() < 3 || header.front() != "id" || header.back() != "label")
        throw ParseError("expected header 'id,x1,...,xk,label'", 1);
    FeaturesCsv out;
    out.dim = header.size() - 2;
    for (std::size_t j = 0; j < out.dim; ++j)
        if (detail::trim(header[j + 1]) != "x" + std::to_string(j + 1))
            throw ParseError("feature column " + std::to_string(j + 1) + " must be named x" + std::to_string(j + 1), 1);

    for (std::size_t n = 2; std::getline(in, line); ++n) {
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto fields = detail::split_csv_line(line);
        if (fields.size() != header.size())
            throw ParseError("expected " + std::to_string(header.size()) + " fields, found " + std::to_string(fields.size()), n);
        FeatureVector v;
        v.id = detail::trim(fields.front());
        for (std::size_t j = 0; j < out.dim; ++j) v.values.push_back(detail::parse_double(fields[j + 1], n, "feature"));
        const double label = detail::parse_double(fields.back(), n, "label");
        if (label != 1.0 && label != -1.0) throw ParseError("label must be +1 or -1, got '" + detail::trim(fields.back()) + "'", n);
        v.label = static_cast<int>(label);
        out.vectors.push_back(std::move(v));
    }
    if (out.vectors.empty()) out.warnings.push_back("'" + path.string() + "' contains no data rows");
    return out;
}

inline void write_features_csv(const std::filesystem::path& path, std::span<const FeatureVector> vectors) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    const std::size_t k = vectors.empty() ? 0 : vectors.front().dim();
    out << "id";
    for (std::size_t j = 0; j < k; ++j) out << ",x" << j + 1;
    out << ",label\n";
    for (const auto& v : vectors) {
        out << v.id;
        for (double x : v.values) out << ',' << detail::format_double(x);
        out << ',' << v.label << '\n';
    }
}

inline void write_encoded_csv(const std::filesystem::path& path, std::span<const PolymerRecord> records,
                              const TokenDictionary& dict) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << "id,label,gap_ev";
    for (std::size_t j = 0; j < kEncodedLength; ++j) out << ",t" << j;
    out << '\n';
    for (const auto& r : records) {
        const auto label = label_gap(r.gap_ev).label;
        if (!label) continue;
        out << r.id << ',' << *label << ',' << detail::format_double(r.gap_ev);
        for (int t : encode_smiles(r.smiles, dict)) out << ',' << t;
        out << '\n';
    }
}

}  // namespace polyqc
