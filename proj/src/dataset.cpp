#include "distbrush/dataset.hpp"
#include "distbrush/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace distbrush {

Dataset::Dataset(std::size_t n, std::size_t dim, std::vector<double> values,
                 std::optional<std::vector<int>> labels)
    : n_(n), dim_(dim), values_(std::move(values)), labels_(std::move(labels)) {
    if (n_ < 2) {
        throw ValidationError("dataset needs at least 2 points, got " + std::to_string(n_));
    }
    if (dim_ < 1) {
        throw ValidationError("dataset needs at least 1 dimension");
    }
    if (values_.size() != n_ * dim_) {
        throw DimensionError("value count does not match n x M");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) {
            throw ValidationError("non-finite value at row " + std::to_string(i / dim_) + ", column " +
                                  std::to_string(i % dim_));
        }
    }
    if (labels_ && labels_->size() != n_) {
        throw ValidationError("label count does not match point count");
    }
}

double Dataset::squared_distance(std::size_t i, std::size_t j) const {
    const double* a = values_.data() + i * dim_;
    const double* b = values_.data() + j * dim_;
    double s = 0.0;
    for (std::size_t d = 0; d < dim_; ++d) {
        const double diff = a[d] - b[d];
        s += diff * diff;
    }
    return s;
}

DataFormat format_from_path(const std::filesystem::path& path) {
    auto ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext == ".json" ? DataFormat::Json : DataFormat::Csv;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError("cannot open " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw Error("cannot write " + tmp.string());
        }
        out << contents;
        if (!out) {
            throw Error("write failed for " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

std::uint64_t content_hash(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    auto res = std::to_chars(buf, buf + 16, v, 16);
    std::string s(buf, res.ptr);
    return std::string(16 - s.size(), '0') + s;
}

std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) {
        ++b;
    }
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) {
        --e;
    }
    return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(trim(line.substr(start)));
            break;
        }
        out.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
    return out;
}

std::vector<std::string> csv_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (trim(line).empty()) {
            continue;
        }
        lines.push_back(std::move(line));
    }
    return lines;
}

// Accepts the usual decimal forms plus nan/inf spellings, which the caller
// rejects during validation with a clearer message than a parse failure.
double parse_number(const std::string& cell, std::size_t row, std::size_t col) {
    double v = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    if (first != last && *first == '+') {
        ++first;
    }
    auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last) {
        throw ParseError("row " + std::to_string(row) + ", column " + std::to_string(col) +
                         ": not a number: '" + cell + "'");
    }
    return v;
}

} // namespace

Dataset parse_dataset_csv(const std::string& text) {
    const auto lines = csv_lines(text);
    if (lines.empty()) {
        throw ParseError("empty dataset file");
    }
    const auto header = split_csv_line(lines[0]);
    std::optional<std::size_t> labelCol;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (header[c] == "label") {
            if (labelCol) {
                throw ParseError("duplicate label column");
            }
            labelCol = c;
        }
    }
    const std::size_t width = header.size();
    const std::size_t dim = width - (labelCol ? 1 : 0);
    const std::size_t n = lines.size() - 1;

    std::vector<double> values;
    values.reserve(n * dim);
    std::vector<int> labels;
    for (std::size_t r = 1; r < lines.size(); ++r) {
        const auto cells = split_csv_line(lines[r]);
        if (cells.size() != width) {
            throw DimensionError("row " + std::to_string(r) + " has " + std::to_string(cells.size()) +
                                 " columns, expected " + std::to_string(width));
        }
        for (std::size_t c = 0; c < width; ++c) {
            if (labelCol && c == *labelCol) {
                int lab = 0;
                const auto& cell = cells[c];
                auto res = std::from_chars(cell.data(), cell.data() + cell.size(), lab);
                if (res.ec != std::errc() || res.ptr != cell.data() + cell.size()) {
                    throw ParseError("row " + std::to_string(r) + ": label is not an integer: '" + cell + "'");
                }
                labels.push_back(lab);
            } else {
                values.push_back(parse_number(cells[c], r, c));
            }
        }
    }
    std::optional<std::vector<int>> lab;
    if (labelCol) {
        lab = std::move(labels);
    }
    return Dataset(n, dim, std::move(values), std::move(lab));
}

Dataset parse_dataset_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("dataset JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("values") || !doc["values"].is_array()) {
        throw ParseError("dataset JSON must be an object with a \"values\" array");
    }
    const auto& rows = doc["values"];
    const std::size_t n = rows.size();
    std::size_t dim = 0;
    std::vector<double> values;
    for (std::size_t r = 0; r < n; ++r) {
        const auto& row = rows[r];
        if (!row.is_array()) {
            throw ParseError("values[" + std::to_string(r) + "] is not an array");
        }
        if (r == 0) {
            dim = row.size();
        } else if (row.size() != dim) {
            throw DimensionError("row " + std::to_string(r) + " has " + std::to_string(row.size()) +
                                 " values, expected " + std::to_string(dim));
        }
        for (const auto& v : row) {
            if (!v.is_number()) {
                throw ParseError("values[" + std::to_string(r) + "] contains a non-number");
            }
            values.push_back(v.get<double>());
        }
    }
    std::optional<std::vector<int>> labels;
    if (doc.contains("labels") && !doc["labels"].is_null()) {
        if (!doc["labels"].is_array()) {
            throw ParseError("labels must be an array");
        }
        std::vector<int> lab;
        for (const auto& v : doc["labels"]) {
            if (!v.is_number_integer()) {
                throw ParseError("labels must be integers");
            }
            lab.push_back(v.get<int>());
        }
        labels = std::move(lab);
    }
    return Dataset(n, dim, std::move(values), std::move(labels));
}

Dataset load_dataset(const std::filesystem::path& path, DataFormat format) {
    const auto text = read_file(path);
    return format == DataFormat::Json ? parse_dataset_json(text) : parse_dataset_csv(text);
}

Dataset load_dataset(const std::filesystem::path& path) { return load_dataset(path, format_from_path(path)); }

std::string dataset_to_csv(const Dataset& data) {
    std::string out;
    for (std::size_t d = 0; d < data.dim(); ++d) {
        out += (d ? ",f" : "f") + std::to_string(d);
    }
    if (data.has_labels()) {
        out += ",label";
    }
    out += '\n';
    for (std::size_t i = 0; i < data.size(); ++i) {
        for (std::size_t d = 0; d < data.dim(); ++d) {
            if (d) {
                out += ',';
            }
            out += format_double(data.at(i, d));
        }
        if (data.has_labels()) {
            out += ',' + std::to_string((*data.labels())[i]);
        }
        out += '\n';
    }
    return out;
}

std::string dataset_to_json(const Dataset& data) {
    nlohmann::json doc;
    auto& rows = doc["values"] = nlohmann::json::array();
    for (std::size_t i = 0; i < data.size(); ++i) {
        auto row = nlohmann::json::array();
        for (double v : data.row(i)) {
            row.push_back(v);
        }
        rows.push_back(std::move(row));
    }
    if (data.has_labels()) {
        doc["labels"] = *data.labels();
    }
    return doc.dump() + "\n";
}

void save_dataset(const Dataset& data, const std::filesystem::path& path) {
    write_file_atomic(path, format_from_path(path) == DataFormat::Json ? dataset_to_json(data) : dataset_to_csv(data));
}

Projection parse_projection_csv(const std::string& text) {
    const auto lines = csv_lines(text);
    if (lines.empty()) {
        throw ParseError("empty projection file");
    }
    const auto header = split_csv_line(lines[0]);
    if (header.size() != 2 || header[0] != "x" || header[1] != "y") {
        throw ParseError("projection header must be 'x,y'");
    }
    Projection proj;
    proj.positions.reserve(lines.size() - 1);
    for (std::size_t r = 1; r < lines.size(); ++r) {
        const auto cells = split_csv_line(lines[r]);
        if (cells.size() != 2) {
            throw DimensionError("projection row " + std::to_string(r) + " must have 2 columns");
        }
        const Point2 p{parse_number(cells[0], r, 0), parse_number(cells[1], r, 1)};
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
            throw ValidationError("non-finite projection coordinate at row " + std::to_string(r));
        }
        proj.positions.push_back(p);
    }
    return proj;
}

Projection load_projection(const std::filesystem::path& path) { return parse_projection_csv(read_file(path)); }

std::string projection_to_csv(const Projection& proj) {
    std::string out = "x,y\n";
    for (const Point2& p : proj.positions) {
        out += format_double(p.x) + ',' + format_double(p.y) + '\n';
    }
    return out;
}

void save_projection(const Projection& proj, const std::filesystem::path& path) {
    write_file_atomic(path, projection_to_csv(proj));
}

KnnIndex::KnnIndex(std::size_t n, std::size_t k, std::vector<PointId> neighbors)
    : n_(n), k_(k), neighbors_(std::move(neighbors)) {
    if (neighbors_.size() != n_ * k_) {
        throw DimensionError("neighbor table size does not match n x k");
    }
}

KnnIndex build_knn(const Dataset& data, std::size_t k) {
    const std::size_t n = data.size();
    if (k < 1 || k > n - 1) {
        throw ParameterError("k must lie in [1, n-1] = [1, " + std::to_string(n - 1) + "], got " + std::to_string(k));
    }
    std::vector<PointId> table(n * k);
    std::vector<std::pair<double, PointId>> cand(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t c = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) {
                cand[c++] = {data.squared_distance(i, j), static_cast<PointId>(j)};
            }
        }
        // Pair ordering gives (distance, index) with ascending-index tie-break.
        std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(k), cand.end());
        for (std::size_t m = 0; m < k; ++m) {
            table[i * k + m] = cand[m].second;
        }
    }
    return KnnIndex(n, k, std::move(table));
}

} // namespace distbrush
