#include <charconv>
#include <fstream>
#include <sstream>
#include <string_view>

#include "seriesforge/data/series.hpp"
#include "seriesforge/error.hpp"

namespace seriesforge::data {

namespace {

std::vector<std::string_view> split_row(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            cells.push_back(line.substr(start));
            break;
        }
        cells.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    for (auto& c : cells) {
        while (!c.empty() && (c.front() == ' ' || c.front() == '\t')) c.remove_prefix(1);
        while (!c.empty() && (c.back() == ' ' || c.back() == '\t' || c.back() == '\r')) c.remove_suffix(1);
    }
    return cells;
}

double parse_number(std::string_view cell, std::size_t row, std::size_t col) {
    double v = 0.0;
    const auto* end = cell.data() + cell.size();
    auto [ptr, ec] = std::from_chars(cell.data(), end, v);
    if (cell.empty() || ec != std::errc{} || ptr != end) {
        throw FormatError("csv row " + std::to_string(row) + ", column " + std::to_string(col + 1) +
                          ": non-numeric value '" + std::string(cell) + "'");
    }
    return v;
}

long long parse_integer(std::string_view cell, std::size_t row, std::size_t col) {
    long long v = 0;
    const auto* end = cell.data() + cell.size();
    auto [ptr, ec] = std::from_chars(cell.data(), end, v);
    if (cell.empty() || ec != std::errc{} || ptr != end) {
        throw FormatError("csv row " + std::to_string(row) + ", column " + std::to_string(col + 1) +
                          ": expected an integer, got '" + std::string(cell) + "'");
    }
    return v;
}

template <typename Fn>
void for_each_line(const std::string& text, Fn&& fn) {
    std::size_t row = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t nl = text.find('\n', start);
        if (nl == std::string::npos) nl = text.size();
        std::string_view line(text.data() + start, nl - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        ++row;
        if (!line.empty()) fn(line, row);
        start = nl + 1;
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_number(std::string& out, double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, ptr);
}

}  // namespace

SeriesBatch parse_csv(const std::string& text) {
    std::size_t features = 0;
    bool have_header = false;
    std::vector<long long> ids;
    std::vector<std::size_t> lengths;
    std::vector<double> values;

    for_each_line(text, [&](std::string_view line, std::size_t row) {
        const auto cells = split_row(line);
        if (!have_header) {
            if (cells.size() < 3 || cells[0] != "sample_id" || cells[1] != "t") {
                throw FormatError("csv: missing header 'sample_id,t,<features...>'");
            }
            features = cells.size() - 2;
            have_header = true;
            return;
        }
        if (cells.size() != features + 2) {
            throw FormatError("csv row " + std::to_string(row) + ": expected " + std::to_string(features + 2) +
                              " columns, got " + std::to_string(cells.size()));
        }
        const long long id = parse_integer(cells[0], row, 0);
        const long long t = parse_integer(cells[1], row, 1);
        if (ids.empty() || ids.back() != id) {
            for (long long seen : ids) {
                if (seen == id) {
                    throw FormatError("csv row " + std::to_string(row) + ": sample_id " + std::to_string(id) +
                                      " is not contiguous");
                }
            }
            ids.push_back(id);
            lengths.push_back(0);
        }
        if (t != static_cast<long long>(lengths.back())) {
            throw FormatError("csv row " + std::to_string(row) + ": sample_id " + std::to_string(id) +
                              " expected t=" + std::to_string(lengths.back()) + ", got " + std::to_string(t));
        }
        ++lengths.back();
        for (std::size_t f = 0; f < features; ++f) values.push_back(parse_number(cells[f + 2], row, f + 2));
    });

    if (!have_header) throw FormatError("csv: missing header 'sample_id,t,<features...>'");
    if (ids.empty()) throw FormatError("csv: no data rows");
    const std::size_t steps = lengths.front();
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (lengths[i] != steps) {
            throw FormatError("csv: ragged sample_id " + std::to_string(ids[i]) + " has " +
                              std::to_string(lengths[i]) + " timestamps, expected " + std::to_string(steps));
        }
    }
    SeriesBatch out(ids.size(), steps, features);
    out.values = std::move(values);
    return out;
}

SeriesBatch load_csv(const std::filesystem::path& path) { return parse_csv(read_file(path)); }

std::string to_csv(const SeriesBatch& batch) {
    batch.validate();
    std::string out = "sample_id,t";
    for (std::size_t f = 0; f < batch.features; ++f) out += ",f" + std::to_string(f + 1);
    out += '\n';
    for (std::size_t n = 0; n < batch.samples; ++n) {
        for (std::size_t t = 0; t < batch.steps; ++t) {
            out += std::to_string(n);
            out += ',';
            out += std::to_string(t);
            for (std::size_t f = 0; f < batch.features; ++f) {
                out += ',';
                write_number(out, batch.at(n, t, f));
            }
            out += '\n';
        }
    }
    return out;
}

void export_csv(const SeriesBatch& batch, const std::filesystem::path& path) {
    const std::string text = to_csv(batch);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("write failed: " + path.string());
}

LongSeries parse_series_csv(const std::string& text) {
    LongSeries out;
    bool have_header = false;
    for_each_line(text, [&](std::string_view line, std::size_t row) {
        const auto cells = split_row(line);
        if (!have_header) {
            out.features = cells.size();
            have_header = true;
            // A header made entirely of numbers is treated as data.
            bool numeric = true;
            for (auto c : cells) {
                double v;
                auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), v);
                if (c.empty() || ec != std::errc{} || ptr != c.data() + c.size()) numeric = false;
            }
            if (!numeric) return;
        }
        if (cells.size() != out.features) {
            throw FormatError("csv row " + std::to_string(row) + ": expected " + std::to_string(out.features) +
                              " columns, got " + std::to_string(cells.size()));
        }
        for (std::size_t f = 0; f < cells.size(); ++f) out.values.push_back(parse_number(cells[f], row, f));
        ++out.length;
    });
    if (!have_header) throw FormatError("csv: empty input");
    if (out.length == 0) throw FormatError("csv: no data rows");
    return out;
}

LongSeries load_series_csv(const std::filesystem::path& path) { return parse_series_csv(read_file(path)); }

}  // namespace seriesforge::data
