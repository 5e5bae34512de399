#include "sinlab/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <string_view>

#include "sinlab/rng.hpp"

namespace sinlab {

void Dataset::validate() const {
    if (features.empty()) throw DataError("dataset: no features");
    if (labels.size() != features.cols()) {
        throw DataError("dataset: " + std::to_string(labels.size()) +
                        " labels vs " + std::to_string(features.cols()) +
                        " samples");
    }
    if (class_count == 0) throw DataError("dataset: class_count is zero");
    for (std::size_t label : labels) {
        if (label >= class_count) {
            throw DataError("dataset: label " + std::to_string(label) +
                            " outside [0, " + std::to_string(class_count) + ")");
        }
    }
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

bool parse_double(std::string_view field, double& out) {
    field = trim(field);
    if (field.empty()) return false;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last && std::isfinite(out);
}

bool parse_label(std::string_view field, std::size_t& out) {
    field = trim(field);
    if (field.empty() || field.front() == '-' || field.front() == '+') return false;
    unsigned long long value = 0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) return false;
    out = static_cast<std::size_t>(value);
    return true;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

}  // namespace

Dataset load_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();

    struct Row {
        std::size_t line_number;
        std::string content;
    };
    std::vector<Row> rows;
    std::size_t line_number = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        std::string line = text.substr(
            pos, nl == std::string::npos ? std::string::npos : nl - pos);
        ++line_number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) rows.push_back({line_number, std::move(line)});
        if (nl == std::string::npos) break;
        pos = nl + 1;
    }
    if (rows.empty()) throw DataError(path.string() + ": file has no data rows");

    // Header detection: any non-numeric field in the first row.
    std::size_t first_data = 0;
    {
        double ignored;
        for (std::string_view field : split_fields(rows[0].content)) {
            if (!parse_double(field, ignored)) {
                first_data = 1;
                break;
            }
        }
    }
    if (first_data >= rows.size()) {
        throw DataError(path.string() + ": file has a header but no data rows");
    }

    const std::size_t field_count = split_fields(rows[first_data].content).size();
    if (field_count < 2) {
        throw DataError(path.string() + ": line " +
                        std::to_string(rows[first_data].line_number) +
                        ": need at least one feature column plus a label");
    }
    const std::size_t dim = field_count - 1;
    const std::size_t n = rows.size() - first_data;

    Matrix features(dim, n);
    std::vector<std::size_t> labels(n);
    std::size_t max_label = 0;
    for (std::size_t r = 0; r < n; ++r) {
        const Row& row = rows[first_data + r];
        const auto fields = split_fields(row.content);
        if (fields.size() != field_count) {
            throw DataError(path.string() + ": line " +
                            std::to_string(row.line_number) + ": expected " +
                            std::to_string(field_count) + " fields, got " +
                            std::to_string(fields.size()));
        }
        for (std::size_t f = 0; f < dim; ++f) {
            double value;
            if (!parse_double(fields[f], value)) {
                throw DataError(path.string() + ": line " +
                                std::to_string(row.line_number) + ": field " +
                                std::to_string(f + 1) + " is not a number");
            }
            features(f, r) = value;
        }
        if (!parse_label(fields[dim], labels[r])) {
            throw DataError(path.string() + ": line " +
                            std::to_string(row.line_number) +
                            ": label is not a non-negative integer");
        }
        max_label = std::max(max_label, labels[r]);
    }

    Dataset ds{std::move(features), std::move(labels), max_label + 1};
    ds.validate();
    return ds;
}

Dataset synth_blobs(std::size_t classes, std::size_t per_class, std::size_t dim,
                    double separation, std::uint64_t seed) {
    if (classes == 0 || per_class == 0 || dim == 0) {
        throw ParameterError("synth_blobs: counts must be positive");
    }
    if (!(separation > 0.0) || !std::isfinite(separation)) {
        throw ParameterError("synth_blobs: separation must be positive");
    }

    std::vector<std::vector<double>> centers(classes, std::vector<double>(dim, 0.0));
    if (dim >= classes) {
        for (std::size_t k = 0; k < classes; ++k) centers[k][k] = separation;
    } else if (dim >= 2) {
        for (std::size_t k = 0; k < classes; ++k) {
            const double theta =
                2.0 * std::numbers::pi * static_cast<double>(k) /
                static_cast<double>(classes);
            centers[k][0] = separation * std::cos(theta);
            centers[k][1] = separation * std::sin(theta);
        }
    } else {
        for (std::size_t k = 0; k < classes; ++k) {
            centers[k][0] = separation * static_cast<double>(k);
        }
    }

    Rng rng(seed);
    const std::size_t n = classes * per_class;
    Matrix features(dim, n);
    std::vector<std::size_t> labels(n);
    for (std::size_t k = 0; k < classes; ++k) {
        for (std::size_t s = 0; s < per_class; ++s) {
            const std::size_t col = k * per_class + s;
            labels[col] = k;
            for (std::size_t f = 0; f < dim; ++f) {
                features(f, col) = centers[k][f] + rng.normal();
            }
        }
    }
    Dataset ds{std::move(features), std::move(labels), classes};
    ds.validate();
    return ds;
}

Dataset standardize(const Dataset& ds) {
    ds.validate();
    const std::size_t n = ds.features.cols();
    if (n < 2) throw ParameterError("standardize: need at least 2 samples");
    Dataset out = ds;
    for (std::size_t f = 0; f < out.features.rows(); ++f) {
        double mean = 0.0;
        for (std::size_t j = 0; j < n; ++j) mean += out.features(f, j);
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double d = out.features(f, j) - mean;
            var += d * d;
        }
        var /= static_cast<double>(n);
        const double std_dev = std::sqrt(var);
        // A feature that is constant up to rounding is centered, not scaled.
        const double floor = 1e-12 * std::max(1.0, std::abs(mean));
        const double inv = std_dev > floor ? 1.0 / std_dev : 1.0;
        for (std::size_t j = 0; j < n; ++j) {
            out.features(f, j) = (out.features(f, j) - mean) * inv;
        }
    }
    return out;
}

Matrix one_hot(const Dataset& ds) {
    ds.validate();
    Matrix targets(ds.class_count, ds.sample_count());
    for (std::size_t j = 0; j < ds.labels.size(); ++j) {
        targets(ds.labels[j], j) = 1.0;
    }
    return targets;
}

namespace {

Dataset take_columns(const Dataset& ds, const std::vector<std::size_t>& cols) {
    Matrix features(ds.features.rows(), cols.size());
    std::vector<std::size_t> labels(cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j) {
        labels[j] = ds.labels[cols[j]];
        for (std::size_t f = 0; f < ds.features.rows(); ++f) {
            features(f, j) = ds.features(f, cols[j]);
        }
    }
    return Dataset{std::move(features), std::move(labels), ds.class_count};
}

}  // namespace

std::pair<Dataset, Dataset> split(const Dataset& ds, double train_fraction,
                                  std::uint64_t seed) {
    ds.validate();
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw ParameterError("split: train_fraction must lie in (0, 1)");
    }
    const std::size_t n = ds.sample_count();
    if (n < 2) throw ParameterError("split: need at least 2 samples");

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    Rng rng(seed);
    for (std::size_t i = n - 1; i > 0; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.uniform_below(i + 1));
        std::swap(order[i], order[j]);
    }

    std::size_t n_train = static_cast<std::size_t>(
        std::floor(train_fraction * static_cast<double>(n)));
    n_train = std::clamp<std::size_t>(n_train, 1, n - 1);

    std::vector<std::size_t> train_cols(order.begin(), order.begin() + n_train);
    std::vector<std::size_t> test_cols(order.begin() + n_train, order.end());
    return {take_columns(ds, train_cols), take_columns(ds, test_cols)};
}

}  // namespace sinlab
