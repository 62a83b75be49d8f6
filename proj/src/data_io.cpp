#include "covshift/data_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>
#include <vector>

#include "covshift/error.hpp"

namespace covshift {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(',', start);
        out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

bool parse_double(std::string_view s, double& out) {
    if (s.empty()) return false;
    if (s.front() == '+') s.remove_prefix(1);
    const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

SampleSet read_samples_csv(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    std::size_t dim = 0;
    SampleSet out;
    bool have_header = false;
    std::vector<double> x;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view view = trim(line);
        if (view.empty() || view.front() == '#') continue;
        const auto fields = split(view);
        if (!have_header) {
            if (fields.size() < 3 || fields[fields.size() - 2] != "y" || fields.back() != "origin")
                throw DataError("line " + std::to_string(line_no) + ": expected header x_1,...,x_D,y,origin");
            dim = fields.size() - 2;
            for (std::size_t j = 0; j < dim; ++j)
                if (fields[j] != "x_" + std::to_string(j + 1))
                    throw DataError("line " + std::to_string(line_no) + ": header column " + std::to_string(j + 1) +
                                    " should be x_" + std::to_string(j + 1));
            out = SampleSet(dim);
            x.resize(dim);
            have_header = true;
            continue;
        }
        if (fields.size() != dim + 2)
            throw DataError("line " + std::to_string(line_no) + ": expected " + std::to_string(dim + 2) +
                            " fields, found " + std::to_string(fields.size()));
        for (std::size_t j = 0; j < dim; ++j)
            if (!parse_double(fields[j], x[j]) || !std::isfinite(x[j]))
                throw DataError("line " + std::to_string(line_no) + ": bad number '" + std::string(fields[j]) + "'");
        double y = 0.0;
        if (!parse_double(fields[dim], y) || !std::isfinite(y))
            throw DataError("line " + std::to_string(line_no) + ": bad response '" + std::string(fields[dim]) + "'");
        Origin origin;
        if (fields[dim + 1] == "P")
            origin = Origin::Source;
        else if (fields[dim + 1] == "Q")
            origin = Origin::Target;
        else
            throw DataError("line " + std::to_string(line_no) + ": origin must be P or Q, got '" +
                            std::string(fields[dim + 1]) + "'");
        out.add(x, y, origin);
    }
    if (!have_header) throw DataError("CSV input has no header line");
    return out;
}

SampleSet read_samples_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    try {
        return read_samples_csv(in);
    } catch (const DataError& e) {
        throw DataError(path + ": " + e.what());
    }
}

void write_samples_csv(std::ostream& out, const SampleSet& data, const std::string& comment) {
    if (!comment.empty()) out << "# " << comment << '\n';
    for (std::size_t j = 0; j < data.ambient_dim(); ++j) out << "x_" << j + 1 << ',';
    out << "y,origin\n";
    for (std::size_t i = 0; i < data.size(); ++i) {
        for (double v : data.x(i)) out << format_double(v) << ',';
        out << format_double(data.y(i)) << ',' << (data.origin(i) == Origin::Source ? 'P' : 'Q') << '\n';
    }
}

void write_samples_csv_file(const std::string& path, const SampleSet& data, const std::string& comment) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path + "'");
    write_samples_csv(out, data, comment);
    if (!out) throw DataError("write to '" + path + "' failed");
}

std::vector<double> parse_number_list(const std::string& text) {
    std::vector<double> out;
    for (auto field : split(trim(text))) {
        double v = 0.0;
        if (!parse_double(field, v)) throw InputError("bad number '" + std::string(field) + "' in list '" + text + "'");
        out.push_back(v);
    }
    return out;
}

}  // namespace covshift
