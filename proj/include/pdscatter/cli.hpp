#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "pdscatter/depth.hpp"

namespace pdscatter {

// Comma-separated numeric rows; a first row that does not parse as numbers is
// taken as a header. Ragged rows and bad cells raise ParseError with the line
// number; a file with no data rows raises DomainError.
DataMatrix parse_dataset(std::istream& in);
DataMatrix read_dataset(const std::string& path);

// "a:b:s" -> a, a + s, ... up to b (inclusive within 1e-9 s).
std::vector<double> parse_grid(const std::string& text);

// Runs one subcommand. `args` excludes the program name. Reports go to `out`,
// a JSON error record to `err`. Returns the process exit status.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pdscatter
