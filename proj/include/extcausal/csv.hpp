#pragma once

#include <iosfwd>
#include <string>

#include "extcausal/margins.hpp"

namespace extcausal {

// Comma-separated numeric matrix. The first row is treated as a header when
// any of its cells fails to parse as a number; otherwise it is data. Blank
// lines are ignored. Every data row must have the same number of cells, all
// numeric and finite; errors cite the 1-based data row and column.
Sample load_csv(const std::string& path);
Sample parse_csv(std::istream& in, const std::string& origin);

// Writes a header row (column names, or col1..cold when unnamed) followed by
// the data rows with full round-trip precision.
void save_csv(const Sample& sample, const std::string& path);
void write_csv(const Sample& sample, std::ostream& out);

}  // namespace extcausal
