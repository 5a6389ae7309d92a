#pragma once

#include "anchorsim/ledger/digest.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace anchorsim::sim {

using Cell = std::variant<std::int64_t, double, std::string>;

/// Formats a cell: integers in decimal, doubles in shortest round-trip form.
std::string format_cell(Cell const &cell);

struct Table
{
  std::vector<std::string>       columns;  ///< excluding the leading seed, scenario, round
  std::vector<std::uint64_t>     rounds;
  std::vector<std::vector<Cell>> rows;
};

enum class Format
{
  Csv,
  Json,
};

/// Named time-series tables; every row carries (seed, scenario id, round).
class MetricsSink
{
public:
  MetricsSink(std::string scenario, std::uint64_t seed);

  /// Declares a table; redeclaring with the same columns is a no-op.
  void declare(std::string const &table, std::vector<std::string> columns);
  void add(std::string const &table, std::uint64_t round, std::vector<Cell> values);

  bool         has(std::string const &table) const { return tables_.contains(table); }
  Table const &table(std::string const &name) const;
  std::map<std::string, Table> const &tables() const { return tables_; }

  std::string const &scenario() const { return scenario_; }
  std::uint64_t      seed() const { return seed_; }

  /// Appends another sink's tables (same layout) under their own seed and id.
  void merge(MetricsSink const &other);

  std::string render(std::string const &table, Format format) const;
  /// Writes <dir>/<table>.csv or .json for every table.
  void write(std::filesystem::path const &dir, Format format) const;

  /// Hash over every table in canonical CSV form.
  ledger::Digest digest() const;

private:
  struct Origin
  {
    std::string   scenario;
    std::uint64_t seed;
  };

  std::string                         scenario_;
  std::uint64_t                       seed_;
  std::map<std::string, Table>        tables_;
  std::map<std::string, std::vector<Origin>> origins_;  ///< per-row provenance
};

}  // namespace anchorsim::sim
