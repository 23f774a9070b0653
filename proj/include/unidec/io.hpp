#pragma once
#include <string>
#include <vector>

#include "unidec/grid.hpp"

namespace unidec {

inline constexpr const char* kVersion = "0.1.0";

// Field snapshot, little-endian binary: magic "UDF1", u32 version, n, N, r,
// Nt, kind, rep, i32 eps[3], f64 T, then the samples as float64 re/im pairs
// in row-major axis order with t outermost.
void save_field(const SpaceTimeField& f, const std::string& path);
SpaceTimeField load_field(const std::string& path);

// Shortest round-trip decimal (%.17g); keeps text outputs byte-stable.
std::string format_double(double v);

void write_text(const std::string& path, const std::string& content);

// One CSV line from already formatted cells.
std::string csv_row(const std::vector<std::string>& cells);

}  // namespace unidec
