#include "anchorsim/sim/metrics_sink.hpp"

#include "anchorsim/common/error.hpp"
#include "anchorsim/ledger/crypto.hpp"

#include <json.hpp>

#include <charconv>
#include <fstream>
#include <sstream>

namespace anchorsim::sim {

std::string format_cell(Cell const &cell)
{
  if (auto const *i = std::get_if<std::int64_t>(&cell))
  {
    return std::to_string(*i);
  }
  if (auto const *d = std::get_if<double>(&cell))
  {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, *d);
    return std::string(buf, p);
  }
  return std::get<std::string>(cell);
}

MetricsSink::MetricsSink(std::string scenario, std::uint64_t seed)
  : scenario_(std::move(scenario))
  , seed_(seed)
{}

void MetricsSink::declare(std::string const &table, std::vector<std::string> columns)
{
  auto [it, inserted] = tables_.try_emplace(table);
  if (inserted)
  {
    it->second.columns = std::move(columns);
    origins_[table];
  }
  else if (it->second.columns != columns)
  {
    throw InvalidArgument("table '" + table + "' redeclared with different columns");
  }
}

void MetricsSink::add(std::string const &table, std::uint64_t round, std::vector<Cell> values)
{
  auto it = tables_.find(table);
  if (it == tables_.end())
  {
    throw LookupError("undeclared metrics table '" + table + "'");
  }
  if (values.size() != it->second.columns.size())
  {
    throw InvalidArgument("row width does not match table '" + table + "'");
  }
  it->second.rounds.push_back(round);
  it->second.rows.push_back(std::move(values));
  origins_[table].push_back({scenario_, seed_});
}

Table const &MetricsSink::table(std::string const &name) const
{
  auto it = tables_.find(name);
  if (it == tables_.end())
  {
    throw LookupError("no metrics table '" + name + "'");
  }
  return it->second;
}

void MetricsSink::merge(MetricsSink const &other)
{
  for (auto const &[name, t] : other.tables_)
  {
    declare(name, t.columns);
    auto &mine = tables_.at(name);
    auto &orig = origins_.at(name);
    auto const &theirs = other.origins_.at(name);
    for (std::size_t i = 0; i < t.rows.size(); ++i)
    {
      mine.rounds.push_back(t.rounds[i]);
      mine.rows.push_back(t.rows[i]);
      orig.push_back(theirs[i]);
    }
  }
}

std::string MetricsSink::render(std::string const &name, Format format) const
{
  auto const &t   = table(name);
  auto const &org = origins_.at(name);
  if (format == Format::Json)
  {
    auto rows = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < t.rows.size(); ++i)
    {
      nlohmann::ordered_json row;
      row["seed"]     = org[i].seed;
      row["scenario"] = org[i].scenario;
      row["round"]    = t.rounds[i];
      for (std::size_t c = 0; c < t.columns.size(); ++c)
      {
        std::visit([&](auto const &v) { row[t.columns[c]] = v; }, t.rows[i][c]);
      }
      rows.push_back(std::move(row));
    }
    return rows.dump(1) + "\n";
  }
  std::ostringstream out;
  out << "seed,scenario,round";
  for (auto const &c : t.columns)
  {
    out << ',' << c;
  }
  out << '\n';
  for (std::size_t i = 0; i < t.rows.size(); ++i)
  {
    out << org[i].seed << ',' << org[i].scenario << ',' << t.rounds[i];
    for (auto const &cell : t.rows[i])
    {
      out << ',' << format_cell(cell);
    }
    out << '\n';
  }
  return out.str();
}

void MetricsSink::write(std::filesystem::path const &dir, Format format) const
{
  std::filesystem::create_directories(dir);
  for (auto const &[name, t] : tables_)
  {
    auto const    path = dir / (name + (format == Format::Json ? ".json" : ".csv"));
    std::ofstream out(path, std::ios::binary);
    if (!out)
    {
      throw Error("cannot write " + path.string());
    }
    out << render(name, format);
  }
}

ledger::Digest MetricsSink::digest() const
{
  std::string all;
  for (auto const &[name, t] : tables_)
  {
    all += name;
    all += '\n';
    all += render(name, Format::Csv);
  }
  return ledger::hash(std::string_view(all));
}

}  // namespace anchorsim::sim
