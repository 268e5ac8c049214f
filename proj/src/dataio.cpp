#include "klmi/dataio.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "klmi/error.hpp"

namespace klmi::dataio {
namespace {

struct Record {
    std::size_t line = 0;
    std::string label;
    std::vector<std::string_view> fields;
};

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<Record> split_records(std::string_view text, const ReadOptions& options) {
    std::vector<Record> records;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line_no == 1 && options.header) continue;
        if (trim(line).empty()) continue;

        Record rec;
        rec.line = line_no;
        std::size_t start = 0;
        bool first = true;
        for (;;) {
            const auto cut = line.find(options.delimiter, start);
            const auto field = trim(line.substr(start, cut == std::string_view::npos
                                                           ? std::string_view::npos
                                                           : cut - start));
            if (first)
                rec.label = std::string(field);
            else
                rec.fields.push_back(field);
            first = false;
            if (cut == std::string_view::npos) break;
            start = cut + 1;
        }
        records.push_back(std::move(rec));
    }
    if (records.empty()) throw ParseError("no records in input", 0);
    return records;
}

double parse_real(std::string_view field, std::size_t line, std::size_t column) {
    if (!field.empty() && field.front() == '+') field.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (field.empty() || ec != std::errc() || ptr != field.data() + field.size())
        throw ParseError("column " + std::to_string(column) + ": '" + std::string(field) +
                             "' is not a number",
                         line);
    return value;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path.string(), 0);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string format_real(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

LabeledDataset parse_points(std::string_view text, const ReadOptions& options) {
    const auto records = split_records(text, options);
    const std::size_t d = records.front().fields.size();
    PointSet points;
    std::vector<std::string> labels;
    points.reserve(records.size());
    for (const auto& rec : records) {
        if (rec.fields.empty()) throw ParseError("record has no feature columns", rec.line);
        if (rec.fields.size() != d)
            throw ParseError("expected " + std::to_string(d) + " feature columns, found " +
                                 std::to_string(rec.fields.size()),
                             rec.line);
        std::vector<double> p(d);
        for (std::size_t k = 0; k < d; ++k) {
            p[k] = parse_real(rec.fields[k], rec.line, k + 2);
            if (!std::isfinite(p[k]))
                throw ParseError("column " + std::to_string(k + 2) + ": non-finite feature", rec.line);
        }
        points.push_back(std::move(p));
        labels.push_back(rec.label);
    }
    return make_dataset(std::span<const std::string>(labels), std::move(points));
}

LabeledDataset parse_matrix(std::string_view text, const ReadOptions& options) {
    const auto records = split_records(text, options);
    const std::size_t n = records.size();
    std::vector<std::vector<double>> entries;
    std::vector<std::string> labels;
    entries.reserve(n);
    for (const auto& rec : records) {
        if (rec.fields.size() != n)
            throw ParseError("expected " + std::to_string(n) + " distance columns (one per record), found " +
                                 std::to_string(rec.fields.size()),
                             rec.line);
        std::vector<double> row(n);
        for (std::size_t k = 0; k < n; ++k) row[k] = parse_real(rec.fields[k], rec.line, k + 2);
        entries.push_back(std::move(row));
        labels.push_back(rec.label);
    }
    return make_dataset(std::span<const std::string>(labels), validate_matrix(entries));
}

LabeledDataset read_points(const std::filesystem::path& path, const ReadOptions& options) {
    return parse_points(read_file(path), options);
}

LabeledDataset read_matrix(const std::filesystem::path& path, const ReadOptions& options) {
    return parse_matrix(read_file(path), options);
}

std::string format_points(const LabeledDataset& ds, char delimiter) {
    const auto* points = std::get_if<PointSet>(&ds.geometry);
    if (!points) throw ShapeError("format_points: dataset has no point geometry");
    std::string out;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        out += ds.label_names[ds.labels[i]];
        for (double v : (*points)[i]) {
            out += delimiter;
            out += format_real(v);
        }
        out += '\n';
    }
    return out;
}

std::string format_matrix(const LabeledDataset& ds, Metric metric, char delimiter) {
    const DistanceMatrix dm = resolve_distances(ds, metric);
    std::string out;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        out += ds.label_names[ds.labels[i]];
        for (double v : dm.row(i)) {
            out += delimiter;
            out += format_real(v);
        }
        out += '\n';
    }
    return out;
}

Format parse_format(std::string_view name) {
    if (name == "json") return Format::json;
    if (name == "tsv") return Format::tsv;
    throw UsageError("unknown output format '" + std::string(name) + "' (expected json or tsv)");
}

nlohmann::ordered_json to_json(const MiEstimate& e) {
    nlohmann::ordered_json j;
    j["n"] = e.n;
    j["n_x"] = e.n_x;
    j["class_counts"] = e.class_counts;
    j["h"] = e.h;
    j["i0_bits"] = e.i0;
    j["ib_bits"] = e.ib;
    j["ie_bits"] = e.ie;
    return j;
}

nlohmann::ordered_json to_json(const SweepResult& sweep) {
    nlohmann::ordered_json j = to_json(sweep.best());
    auto rows = nlohmann::ordered_json::array();
    for (const auto& e : sweep.estimates) rows.push_back(to_json(e));
    j["sweep"] = std::move(rows);
    j["selected_h"] = sweep.best().h;
    return j;
}

nlohmann::ordered_json to_json(const synthesis::OracleReport& r) {
    nlohmann::ordered_json j;
    j["n"] = r.n;
    j["n_x"] = r.n_x;
    j["class_counts"] = r.class_counts;
    j["h"] = r.h;
    j["i0_bits"] = r.mean_i0;
    j["ib_bits"] = r.mean_ib;
    j["ie_bits"] = r.mean_ie;
    j["replicates"] = r.replicates;
    j["empirical_p_r"] = r.empirical_p_r;
    j["analytic_p_r"] = r.analytic_p_r;
    j["tv_distance"] = r.tv_distance;
    j["mean_i0_bits"] = r.mean_i0;
    j["mean_ie_bits"] = r.mean_ie;
    j["stderr_i0_bits"] = r.stderr_i0;
    j["stderr_ie_bits"] = r.stderr_ie;
    j["rng"] = r.rng;
    return j;
}

nlohmann::ordered_json to_json(const BiasTable& t, std::span<const std::size_t> class_counts) {
    nlohmann::ordered_json j;
    std::size_t n = 0;
    for (std::size_t c : class_counts) n += c;
    j["n"] = n;
    j["n_x"] = t.n_x;
    j["class_counts"] = std::vector<std::size_t>(class_counts.begin(), class_counts.end());
    j["h"] = t.h;
    j["p_r"] = t.p_r;
    j["ib_bits"] = t.i_b;
    return j;
}

namespace {

std::string estimate_row(const MiEstimate& e) {
    return std::to_string(e.n) + '\t' + std::to_string(e.n_x) + '\t' + std::to_string(e.h) + '\t' +
           format_real(e.i0) + '\t' + format_real(e.ib) + '\t' + format_real(e.ie);
}

constexpr const char* kEstimateHeader = "n\tn_x\th\ti0_bits\tib_bits\tie_bits";

}  // namespace

std::string write_result(const MiEstimate& estimate, Format format) {
    if (format == Format::json) return to_json(estimate).dump() + '\n';
    return std::string(kEstimateHeader) + '\n' + estimate_row(estimate) + '\n';
}

std::string write_result(const SweepResult& sweep, Format format) {
    if (format == Format::json) return to_json(sweep).dump() + '\n';
    std::string out = std::string(kEstimateHeader) + "\tselected\n";
    for (std::size_t k = 0; k < sweep.estimates.size(); ++k)
        out += estimate_row(sweep.estimates[k]) + (k == sweep.selected ? "\t1\n" : "\t0\n");
    return out;
}

std::string write_result(const synthesis::OracleReport& r, Format format) {
    if (format == Format::json) return to_json(r).dump() + '\n';
    std::string out =
        "n\tn_x\th\treplicates\tmean_i0_bits\tmean_ib_bits\tmean_ie_bits\tstderr_i0_bits\t"
        "stderr_ie_bits\ttv_distance\n";
    out += std::to_string(r.n) + '\t' + std::to_string(r.n_x) + '\t' + std::to_string(r.h) + '\t' +
           std::to_string(r.replicates) + '\t' + format_real(r.mean_i0) + '\t' +
           format_real(r.mean_ib) + '\t' + format_real(r.mean_ie) + '\t' +
           format_real(r.stderr_i0) + '\t' + format_real(r.stderr_ie) + '\t' +
           format_real(r.tv_distance) + '\n';
    return out;
}

std::string write_result(const BiasTable& t, std::span<const std::size_t> class_counts,
                         Format format) {
    if (format == Format::json) return to_json(t, class_counts).dump() + '\n';
    std::string out = "h\tr\tp_r\tib_bits\n";
    for (std::size_t r = 1; r <= t.h; ++r)
        out += std::to_string(t.h) + '\t' + std::to_string(r) + '\t' + format_real(t.p_r[r - 1]) +
               '\t' + format_real(t.i_b) + '\n';
    return out;
}

}  // namespace klmi::dataio
