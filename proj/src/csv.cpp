#include "cascade_kde/csv.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "cascade_kde/errors.hpp"

namespace cascade_kde {
namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        fields.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return fields;
}

}  // namespace

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    std::array<char, 32> buf{};
    const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), end);
}

double parse_number(std::string_view field) {
    field = trim(field);
    if (!field.empty() && field.front() == '+') field.remove_prefix(1);
    double value = 0;
    const auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (field.empty() || ec != std::errc{} || end != field.data() + field.size()) {
        throw InvalidInput("not a number: '" + std::string(field) + "'");
    }
    return value;
}

SeriesFile read_series_csv(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    bool has_mask = false;
    std::vector<double> times;
    std::vector<double> values;
    std::vector<bool> mask;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view body = trim(line);
        if (body.empty()) continue;
        const auto fields = split_fields(body);
        if (!have_header) {
            if (fields.size() < 2 || fields[0] != "t" || fields[1] != "y" ||
                (fields.size() == 3 && fields[2] != "mask") || fields.size() > 3) {
                throw InvalidInput("csv: expected header 't,y' or 't,y,mask', got '" +
                                   std::string(body) + "'");
            }
            has_mask = fields.size() == 3;
            have_header = true;
            continue;
        }
        if (fields.size() != (has_mask ? 3u : 2u)) {
            throw InvalidInput("csv line " + std::to_string(line_no) + ": expected " +
                               (has_mask ? "3" : "2") + " fields");
        }
        try {
            times.push_back(parse_number(fields[0]));
            values.push_back(parse_number(fields[1]));
            if (has_mask) {
                const double m = parse_number(fields[2]);
                if (m != 0.0 && m != 1.0) throw InvalidInput("mask must be 0 or 1");
                mask.push_back(m == 1.0);
            }
        } catch (const InvalidInput& e) {
            throw InvalidInput("csv line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (!have_header) throw InvalidInput("csv: missing header");
    VectorXd t = Eigen::Map<const VectorXd>(times.data(), static_cast<Eigen::Index>(times.size()));
    VectorXd y = Eigen::Map<const VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
    SeriesFile file{TimeSeries(std::move(t), std::move(y)), std::nullopt};
    if (has_mask) file.mask = std::move(mask);
    return file;
}

SeriesFile read_series_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    try {
        return read_series_csv(in);
    } catch (const InvalidInput& e) {
        throw InvalidInput(path.string() + ": " + e.what());
    }
}

void write_series_csv(std::ostream& out, const TimeSeries& series, const std::vector<bool>* mask) {
    if (mask != nullptr && static_cast<Eigen::Index>(mask->size()) != series.size()) {
        throw InvalidInput("csv: mask length differs from series length");
    }
    out << (mask != nullptr ? "t,y,mask\n" : "t,y\n");
    for (Eigen::Index i = 0; i < series.size(); ++i) {
        out << format_number(series.times()[i]) << ',' << format_number(series.values()[i]);
        if (mask != nullptr) out << ',' << ((*mask)[static_cast<std::size_t>(i)] ? '1' : '0');
        out << '\n';
    }
}

void write_series_csv(const std::filesystem::path& path, const TimeSeries& series,
                      const std::vector<bool>* mask) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    write_series_csv(out, series, mask);
    if (!out) throw IoError("write to '" + path.string() + "' failed");
}

}  // namespace cascade_kde
