#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>

#include <json.hpp>

#include "klmi/estimator.hpp"
#include "klmi/synthesis.hpp"

namespace klmi::dataio {

struct ReadOptions {
    char delimiter = ',';
    bool header = false;  ///< skip the first line
};

/// Points file: one record per line, `label,x1,...,xd`. Label tokens are
/// opaque strings numbered in order of first appearance. LF or CRLF line
/// endings; blank lines are ignored. Throws ParseError with the line number.
LabeledDataset parse_points(std::string_view text, const ReadOptions& options = {});
LabeledDataset read_points(const std::filesystem::path& path, const ReadOptions& options = {});

/// Matrix file: `label,d(i,1),...,d(i,n)` for record i; the numeric block
/// must be square and pass validate_matrix().
LabeledDataset parse_matrix(std::string_view text, const ReadOptions& options = {});
LabeledDataset read_matrix(const std::filesystem::path& path, const ReadOptions& options = {});

/// Points file text for a dataset with point geometry; reals use 17
/// significant digits so re-reading reproduces every coordinate exactly.
std::string format_points(const LabeledDataset& ds, char delimiter = ',');

/// Matrix file text for any dataset (point geometry is converted with `metric`).
std::string format_matrix(const LabeledDataset& ds, Metric metric = Metric::euclidean,
                          char delimiter = ',');

enum class Format { json, tsv };

/// Throws UsageError for anything but "json" or "tsv".
Format parse_format(std::string_view name);

nlohmann::ordered_json to_json(const MiEstimate& estimate);
nlohmann::ordered_json to_json(const SweepResult& sweep);
nlohmann::ordered_json to_json(const synthesis::OracleReport& report);
nlohmann::ordered_json to_json(const BiasTable& table, std::span<const std::size_t> class_counts);

std::string write_result(const MiEstimate& estimate, Format format);
std::string write_result(const SweepResult& sweep, Format format);
std::string write_result(const synthesis::OracleReport& report, Format format);
std::string write_result(const BiasTable& table, std::span<const std::size_t> class_counts,
                         Format format);

}  // namespace klmi::dataio
