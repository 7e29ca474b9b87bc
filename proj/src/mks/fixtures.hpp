#pragma once

#include <string_view>
#include <vector>

namespace mks::fixtures {

/// One row of a kernel fixture table.
struct Row {
  double input_x = 0.0;
  double input_y = 0.0;
  double a_or_eps = 0.0;
  double out_x = 0.0;
  double out_y = 0.0;
};

/// Embedded CSV text of a fixture table ("f_a", "grad_green",
/// "mollified_gaussian"). Throws std::out_of_range for unknown names.
std::string_view csv(std::string_view name);

/// Parses a fixture table with header input_x,input_y,A_or_eps,out_x,out_y.
std::vector<Row> parse(std::string_view text);

}  // namespace mks::fixtures
