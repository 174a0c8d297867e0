#include "featimp/csv_io.hpp"

#include "featimp/error.hpp"
#include "featimp/kv_config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace featimp {

namespace {

std::vector<std::string> split_line(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') {
      quoted = !quoted;
    } else if (c == delim && !quoted) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(trim(cur));
  return out;
}

bool parse_real(const std::string& s, double& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && std::isfinite(out);
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path);
  if (!f) throw Error("cannot open '" + path.string() + "' for writing");
  return f;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot open '" + path.string() + "'");
  return f;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

DataMatrix read_csv(std::istream& in, const Schema& schema, const CsvOptions& opts) {
  std::string line;
  if (!std::getline(in, line)) throw IngestionError("CSV input is empty (no header row)");
  const auto header = split_line(line, opts.delimiter);

  std::unordered_set<std::string> seen;
  std::vector<ColumnInfo> columns;
  for (const auto& name : header) {
    if (name.empty()) throw SchemaError("empty column name in CSV header");
    if (!seen.insert(name).second) throw SchemaError("duplicate column name '" + name + "'");
    auto it = schema.find(name);
    columns.push_back({name, it == schema.end() ? Role::feature : it->second});
  }
  for (const auto& [name, role] : schema) {
    if (!seen.count(name)) throw SchemaError("schema column '" + name + "' is not in the CSV header");
  }

  std::vector<std::vector<double>> cells;
  std::vector<std::vector<bool>> obs;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto fields = split_line(line, opts.delimiter);
    if (fields.size() != header.size()) {
      throw IngestionError("row " + std::to_string(row + 1) + " has " + std::to_string(fields.size()) +
                           " fields, expected " + std::to_string(header.size()));
    }
    std::vector<double> r(header.size());
    std::vector<bool> o(header.size());
    for (std::size_t j = 0; j < fields.size(); ++j) {
      if (fields[j].empty() || fields[j] == opts.missing_token) {
        o[j] = false;
        r[j] = 0.0;
      } else if (parse_real(fields[j], r[j])) {
        o[j] = true;
      } else {
        throw IngestionError("cannot parse '" + fields[j] + "' at row " + std::to_string(row + 1) +
                             ", column '" + header[j] + "'");
      }
    }
    cells.push_back(std::move(r));
    obs.push_back(std::move(o));
    ++row;
  }

  const auto n = static_cast<Eigen::Index>(cells.size());
  const auto p = static_cast<Eigen::Index>(header.size());
  Matrix values(n, p);
  Mask mask(n, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) {
      values(i, j) = cells[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      mask(i, j) = obs[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  return DataMatrix(std::move(columns), std::move(values), std::move(mask));
}

DataMatrix load_csv(const std::filesystem::path& path, const Schema& schema, const CsvOptions& opts) {
  auto f = open_in(path);
  return read_csv(f, schema, opts);
}

void write_csv(std::ostream& out, const DataMatrix& m, const CsvOptions& opts) {
  for (std::size_t j = 0; j < m.cols(); ++j) {
    if (j) out << opts.delimiter;
    out << m.column(j).name;
  }
  out << '\n';
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) out << opts.delimiter;
      if (m.is_observed(i, j)) {
        out << format_double(m.value(i, j));
      } else {
        out << opts.missing_token;
      }
    }
    out << '\n';
  }
}

void save_csv(const std::filesystem::path& path, const DataMatrix& m, const CsvOptions& opts) {
  auto f = open_out(path);
  write_csv(f, m, opts);
}

void save_mask_csv(const std::filesystem::path& path, const DataMatrix& m) {
  auto f = open_out(path);
  for (std::size_t j = 0; j < m.cols(); ++j) f << (j ? "," : "") << m.column(j).name;
  f << '\n';
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) f << (j ? "," : "") << (m.is_observed(i, j) ? '1' : '0');
    f << '\n';
  }
}

Mask load_mask_csv(const std::filesystem::path& path, const DataMatrix& like) {
  auto raw = load_csv(path, {});
  if (raw.rows() != like.rows()) throw SchemaError("mask row count does not match data");
  Mask mask(static_cast<Eigen::Index>(like.rows()), static_cast<Eigen::Index>(like.cols()));
  for (std::size_t j = 0; j < like.cols(); ++j) {
    const auto src = raw.index_of(like.column(j).name);
    for (std::size_t i = 0; i < like.rows(); ++i) {
      if (!raw.is_observed(i, src)) throw IngestionError("empty mask cell");
      mask(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = raw.value(i, src) != 0.0;
    }
  }
  return mask;
}

Schema read_schema(std::istream& in) {
  Schema schema;
  for (const auto& [key, value] : read_kv(in)) {
    if (!schema.emplace(key, parse_role(value)).second) {
      throw SchemaError("duplicate schema entry '" + key + "'");
    }
  }
  return schema;
}

Schema load_schema(const std::filesystem::path& path) {
  auto f = open_in(path);
  return read_schema(f);
}

Schema schema_of(const DataMatrix& m) {
  Schema s;
  for (const auto& c : m.columns()) s.emplace(c.name, c.role);
  return s;
}

void save_schema(const std::filesystem::path& path, const DataMatrix& m) {
  auto f = open_out(path);
  for (const auto& c : m.columns()) f << c.name << " = " << to_string(c.role) << '\n';
}

}  // namespace featimp
