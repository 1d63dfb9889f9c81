#pragma once

#include <map>
#include <string>

#include "mesmix/mip.hpp"

namespace mesmix {

inline constexpr std::size_t kMpsNameWidth = 8;

struct MpsOptions {
  // Replace every name by a stable 8-character hash instead of failing on long names.
  bool hash_names = false;
};

struct MpsExport {
  std::string text;
  // hashed name -> original name; empty unless names were hashed
  std::map<std::string, std::string> names;
};

/// Fixed-format MPS. Rows keep program order, columns are sorted by name.
/// The objective row carries f1; f2 and f3 are listed in a comment block.
MpsExport export_mps(const MipProgram& program, const MpsOptions& options = {});

/// CPLEX-style LP text with the same row and column order as the MPS export.
std::string export_lp(const MipProgram& program);

/// Sidecar document for a hashed export.
std::string name_map_json(const MpsExport& e);

/// Readers for the two formats as written above. The objective row becomes f1;
/// rows and columns keep file order. Both throw InvalidInstance on malformed input.
MipProgram read_mps(const std::string& text);
MipProgram read_lp(const std::string& text);

}  // namespace mesmix
