#pragma once

#include "featimp/data_matrix.hpp"

#include <filesystem>
#include <istream>
#include <map>
#include <ostream>
#include <string>

namespace featimp {

/// Column name -> role. Columns missing from a schema are read as features.
using Schema = std::map<std::string, Role, std::less<>>;

struct CsvOptions {
  char delimiter = ',';
  /// Cells equal to this token (or empty) are read as missing.
  std::string missing_token = "NA";
};

DataMatrix read_csv(std::istream& in, const Schema& schema, const CsvOptions& opts = {});
DataMatrix load_csv(const std::filesystem::path& path, const Schema& schema,
                    const CsvOptions& opts = {});

/// Shortest round-trip representation of every observed value; missing cells
/// are written as the missing token.
void write_csv(std::ostream& out, const DataMatrix& m, const CsvOptions& opts = {});
void save_csv(const std::filesystem::path& path, const DataMatrix& m, const CsvOptions& opts = {});

/// Mask as 0/1 CSV (1 = observed) with the matrix header.
void save_mask_csv(const std::filesystem::path& path, const DataMatrix& m);
Mask load_mask_csv(const std::filesystem::path& path, const DataMatrix& like);

/// Flat `name = role` lines; `#` starts a comment.
Schema read_schema(std::istream& in);
Schema load_schema(const std::filesystem::path& path);
void save_schema(const std::filesystem::path& path, const DataMatrix& m);
Schema schema_of(const DataMatrix& m);

/// Shortest decimal string that parses back to exactly `v`.
std::string format_double(double v);

}  // namespace featimp
