#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "okr/errors.hpp"

namespace okr {

struct Dataset {
    Eigen::MatrixXd X;  // n x d, row per example
    Eigen::VectorXd y;  // n labels

    int n() const { return static_cast<int>(X.rows()); }
    int d() const { return static_cast<int>(X.cols()); }
};

enum class DataFormat { csv, libsvm };

namespace detail {

inline bool parse_double(const std::string& tok, double& out) {
    const char* begin = tok.c_str();
    char* end = nullptr;
    out = std::strtod(begin, &end);
    return end != begin && end == begin + tok.size();
}

inline std::vector<std::string> split_csv_row(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    std::stringstream ss(line);
    while (std::getline(ss, cur, ',')) {
        // trim surrounding whitespace
        const auto b = cur.find_first_not_of(" \t\r");
        const auto e = cur.find_last_not_of(" \t\r");
        fields.push_back(b == std::string::npos ? std::string() : cur.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

inline Dataset ingest_csv(std::istream& in, const std::string& name, int label_column) {
    std::vector<std::vector<double>> rows;
    std::string line;
    long lineno = 0;
    bool first_content_line = true;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto fields = split_csv_row(line);
        std::vector<double> vals(fields.size());
        bool ok = true;
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (!parse_double(fields[i], vals[i])) {
                ok = false;
                break;
            }
        }
        if (!ok) {
            if (first_content_line) {  // header row
                first_content_line = false;
                continue;
            }
            throw input_error(name + ":" + std::to_string(lineno) + ": malformed CSV row");
        }
        first_content_line = false;
        if (width == 0) {
            width = vals.size();
            if (width < 2) {
                throw input_error(name + ":" + std::to_string(lineno) +
                                  ": need at least one feature and a label column");
            }
        } else if (vals.size() != width) {
            throw input_error(name + ":" + std::to_string(lineno) + ": expected " +
                              std::to_string(width) + " fields, got " + std::to_string(vals.size()));
        }
        rows.push_back(std::move(vals));
    }

    Dataset ds;
    if (rows.empty()) {
        ds.X.resize(0, 0);
        ds.y.resize(0);
        return ds;
    }
    const int w = static_cast<int>(width);
    const int label = label_column < 0 ? w - 1 : label_column;
    if (label >= w) {
        throw input_error(name + ": label column " + std::to_string(label) +
                          " out of range for " + std::to_string(w) + " columns");
    }
    ds.X.resize(static_cast<Eigen::Index>(rows.size()), w - 1);
    ds.y.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        int col = 0;
        for (int j = 0; j < w; ++j) {
            if (j == label) {
                ds.y(static_cast<Eigen::Index>(i)) = rows[i][static_cast<std::size_t>(j)];
            } else {
                ds.X(static_cast<Eigen::Index>(i), col++) = rows[i][static_cast<std::size_t>(j)];
            }
        }
    }
    return ds;
}

inline Dataset ingest_libsvm(std::istream& in, const std::string& name) {
    std::vector<std::vector<std::pair<int, double>>> rows;
    std::vector<double> labels;
    std::string line;
    long lineno = 0;
    int max_index = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::stringstream ss(line);
        std::string tok;
        if (!(ss >> tok)) continue;
        double label;
        if (!parse_double(tok, label)) {
            throw input_error(name + ":" + std::to_string(lineno) + ": malformed label '" + tok + "'");
        }
        std::vector<std::pair<int, double>> feats;
        while (ss >> tok) {
            const auto colon = tok.find(':');
            if (colon == std::string::npos) {
                throw input_error(name + ":" + std::to_string(lineno) +
                                  ": expected index:value, got '" + tok + "'");
            }
            double idx_d, val;
            if (!parse_double(tok.substr(0, colon), idx_d) || idx_d != std::floor(idx_d) || idx_d < 1 ||
                !parse_double(tok.substr(colon + 1), val)) {
                throw input_error(name + ":" + std::to_string(lineno) +
                                  ": malformed feature '" + tok + "'");
            }
            const int idx = static_cast<int>(idx_d);
            max_index = std::max(max_index, idx);
            feats.emplace_back(idx, val);
        }
        labels.push_back(label);
        rows.push_back(std::move(feats));
    }

    Dataset ds;
    ds.X = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()), max_index);
    ds.y.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        ds.y(static_cast<Eigen::Index>(i)) = labels[i];
        for (const auto& [idx, val] : rows[i]) ds.X(static_cast<Eigen::Index>(i), idx - 1) = val;
    }
    return ds;
}

}  // namespace detail

/// Reads a dataset preserving file order. CSV: one numeric row per example,
/// optional header line, label_column < 0 means the last column. libsvm:
/// "label idx:val ..." with 1-based indices densified to the max index seen.
inline Dataset ingest(const std::string& path, DataFormat format, int label_column = -1) {
    std::ifstream in(path);
    if (!in) throw input_error("ingest: cannot open '" + path + "'");
    return format == DataFormat::csv ? detail::ingest_csv(in, path, label_column)
                                     : detail::ingest_libsvm(in, path);
}

inline Dataset ingest_stream(std::istream& in, DataFormat format, int label_column = -1,
                             const std::string& name = "<stream>") {
    return format == DataFormat::csv ? detail::ingest_csv(in, name, label_column)
                                     : detail::ingest_libsvm(in, name);
}

/// Per-coordinate affine map onto [-1,1]; constant coordinates collapse to 0.
/// Labels get the same treatment. Idempotent.
inline Dataset scale(const Dataset& ds) {
    Dataset out = ds;
    if (ds.n() == 0) return out;
    for (int j = 0; j < ds.d(); ++j) {
        const double lo = ds.X.col(j).minCoeff();
        const double hi = ds.X.col(j).maxCoeff();
        if (hi > lo) {
            out.X.col(j) = (2.0 * (ds.X.col(j).array() - lo) / (hi - lo) - 1.0).matrix();
        } else {
            out.X.col(j).setZero();
        }
    }
    const double ylo = ds.y.minCoeff();
    const double yhi = ds.y.maxCoeff();
    if (yhi > ylo) {
        out.y = (2.0 * (ds.y.array() - ylo) / (yhi - ylo) - 1.0).matrix();
    } else {
        out.y.setZero();
    }
    return out;
}

}  // namespace okr
