#pragma once

#include <iosfwd>
#include <string>

#include "covshift/sample.hpp"

namespace covshift {

/// CSV layout: optional '#' comment lines, a header `x_1,...,x_D,y,origin`, then one
/// row per sample with origin P (source) or Q (target). Values are written with 17
/// significant digits so a round trip is exact.
SampleSet read_samples_csv(std::istream& in);
SampleSet read_samples_csv_file(const std::string& path);

/// `comment`, when non-empty, is written as a single leading '#' line.
void write_samples_csv(std::ostream& out, const SampleSet& data, const std::string& comment = {});
void write_samples_csv_file(const std::string& path, const SampleSet& data, const std::string& comment = {});

/// Comma-separated list of numbers, e.g. "0.1,0.2,0.3".
std::vector<double> parse_number_list(const std::string& text);

}  // namespace covshift
