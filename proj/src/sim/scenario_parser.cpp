#include "anchorsim/sim/scenario_parser.hpp"

#include "anchorsim/common/error.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>

namespace anchorsim::sim {

namespace {

std::string_view trim(std::string_view s)
{
  auto const first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos)
  {
    return {};
  }
  auto const last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep)
{
  std::vector<std::string_view> out;
  std::size_t                   pos = 0;
  while (true)
  {
    auto const next = s.find(sep, pos);
    out.push_back(trim(s.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos)));
    if (next == std::string_view::npos)
    {
      return out;
    }
    pos = next + 1;
  }
}

struct Cursor
{
  std::size_t line;
  std::string field;
  std::string_view value;

  [[noreturn]] void fail(std::string const &what) const { throw ParseError(line, field, what); }

  double real() const { return real(value); }

  double real(std::string_view text) const
  {
    double v{};
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || p != text.data() + text.size() || text.empty())
    {
      fail("expected a number, got '" + std::string(text) + "'");
    }
    return v;
  }

  std::uint64_t integer() const
  {
    std::uint64_t v{};
    auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc{} || p != value.data() + value.size() || value.empty())
    {
      fail("expected a non-negative integer, got '" + std::string(value) + "'");
    }
    return v;
  }

  std::size_t size() const { return static_cast<std::size_t>(integer()); }

  bool flag() const
  {
    if (value == "on" || value == "true" || value == "yes" || value == "1")
    {
      return true;
    }
    if (value == "off" || value == "false" || value == "no" || value == "0")
    {
      return false;
    }
    fail("expected on/off, got '" + std::string(value) + "'");
  }

  std::vector<double> reals(std::size_t n) const
  {
    auto parts = split(value, ',');
    if (parts.size() != n)
    {
      fail("expected " + std::to_string(n) + " comma-separated numbers");
    }
    std::vector<double> out;
    for (auto p : parts)
    {
      out.push_back(real(p));
    }
    return out;
  }

  contract::Grid grid() const
  {
    auto v = reals(3);
    if (v[2] < 1.0 || v[2] != static_cast<double>(static_cast<std::size_t>(v[2])))
    {
      fail("grid point count must be a positive integer");
    }
    return {v[0], v[1], static_cast<std::size_t>(v[2])};
  }
};

using Setter  = std::function<void(Scenario &, Cursor const &)>;
using Section = std::map<std::string, Setter, std::less<>>;

std::map<std::string, Section, std::less<>> const &sections()
{
  static std::map<std::string, Section, std::less<>> const table = [] {
    std::map<std::string, Section, std::less<>> t;
    t["scenario"] = {
      {"id", [](Scenario &s, Cursor const &c) { s.id = std::string(c.value); }},
      {"seed", [](Scenario &s, Cursor const &c) { s.seed = c.integer(); }},
      {"rounds", [](Scenario &s, Cursor const &c) { s.rounds = c.integer(); }},
      {"client_funds", [](Scenario &s, Cursor const &c) { s.client_funds = c.real(); }},
    };
    t["level"] = {
      {"name", [](Scenario &s, Cursor const &c) { s.levels.back().name = std::string(c.value); }},
      {"masps", [](Scenario &s, Cursor const &c) { s.levels.back().masps = c.size(); }},
      {"satisfy", [](Scenario &s, Cursor const &c) { s.levels.back().satisfy = c.real(); }},
      {"drop_round", [](Scenario &s, Cursor const &c) { s.levels.back().drop_round = c.integer(); }},
      {"drop_satisfy", [](Scenario &s, Cursor const &c) { s.levels.back().drop_satisfy = c.real(); }},
    };
    t["client_type"] = {
      {"name", [](Scenario &s, Cursor const &c) { s.client_types.back().name = std::string(c.value); }},
      {"clients", [](Scenario &s, Cursor const &c) { s.client_types.back().clients = c.size(); }},
      {"strictness", [](Scenario &s, Cursor const &c) { s.client_types.back().strictness = c.real(); }},
      {"sensitivity", [](Scenario &s, Cursor const &c) { s.client_types.back().sensitivity = c.real(); }},
    };
    t["selection"] = {
      {"policy",
       [](Scenario &s, Cursor const &c) {
         if (c.value == "capacity")
         {
           s.selection.policy = AcceptPolicy::Capacity;
         }
         else if (c.value == "probability")
         {
           s.selection.policy = AcceptPolicy::Probability;
         }
         else
         {
           c.fail("expected capacity or probability");
         }
       }},
      {"capacity", [](Scenario &s, Cursor const &c) { s.selection.capacity = c.size(); }},
      {"accept_probability", [](Scenario &s, Cursor const &c) { s.selection.accept_probability = c.real(); }},
    };
    t["chain"] = {
      {"block_interval", [](Scenario &s, Cursor const &c) { s.chain.block_interval = c.real(); }},
      {"block_capacity", [](Scenario &s, Cursor const &c) { s.chain.block_capacity = c.size(); }},
      {"nodes", [](Scenario &s, Cursor const &c) { s.chain.nodes = c.size(); }},
      {"super_nodes", [](Scenario &s, Cursor const &c) { s.chain.super_nodes = c.size(); }},
      {"attackers", [](Scenario &s, Cursor const &c) { s.chain.attackers = c.size(); }},
      {"avg_neighbors", [](Scenario &s, Cursor const &c) { s.chain.avg_neighbors = c.real(); }},
      {"avg_bandwidth", [](Scenario &s, Cursor const &c) { s.chain.avg_bandwidth = c.real(); }},
      {"poisson_blocks", [](Scenario &s, Cursor const &c) { s.chain.poisson_blocks = c.flag(); }},
    };
    t["rollup"] = {
      {"enabled", [](Scenario &s, Cursor const &c) { s.rollup_enabled = c.flag(); }},
      {"max_count", [](Scenario &s, Cursor const &c) { s.rollup.max_count = c.size(); }},
      {"max_time", [](Scenario &s, Cursor const &c) { s.rollup.max_time = c.real(); }},
      {"fee", [](Scenario &s, Cursor const &c) { s.rollup.rollup_fee = to_tokens(c.real()); }},
      {"replicas", [](Scenario &s, Cursor const &c) { s.rollup.replicas = c.size(); }},
    };
    t["reputation"] = {
      {"gamma", [](Scenario &s, Cursor const &c) { s.rollup.reputation.gamma = c.real(); }},
      {"sensitivity", [](Scenario &s, Cursor const &c) { s.rollup.reputation.default_sensitivity = c.real(); }},
      {"mu",
       [](Scenario &s, Cursor const &c) {
         auto v = c.reals(3);
         s.rollup.reputation.mu = {v[0], v[1], v[2]};
       }},
      {"decay", [](Scenario &s, Cursor const &c) { s.rollup.decay.decay = c.real(); }},
      {"familiarity", [](Scenario &s, Cursor const &c) { s.rollup.reputation.ablation.familiarity = c.flag(); }},
      {"freshness", [](Scenario &s, Cursor const &c) { s.rollup.reputation.ablation.freshness = c.flag(); }},
      {"market_worth", [](Scenario &s, Cursor const &c) { s.rollup.reputation.ablation.market_worth = c.flag(); }},
    };
    t["channel"] = {
      {"enabled", [](Scenario &s, Cursor const &c) { s.channels_enabled = c.flag(); }},
      {"step_timeout", [](Scenario &s, Cursor const &c) { s.channel.step_timeout = c.real(); }},
      {"timers", [](Scenario &s, Cursor const &c) { s.channel.timers = c.flag(); }},
      {"step_durations",
       [](Scenario &s, Cursor const &c) {
         auto v = c.reals(channel::kSteps);
         std::copy(v.begin(), v.end(), s.channel.step_durations.begin());
       }},
    };
    t["contract"] = {
      {"output_bytes", [](Scenario &s, Cursor const &c) { s.contract.state.output_bytes = c.real(); }},
      {"bandwidth", [](Scenario &s, Cursor const &c) { s.contract.state.bandwidth = c.real(); }},
      {"difficulty", [](Scenario &s, Cursor const &c) { s.contract.state.difficulty = c.real(); }},
      {"participants", [](Scenario &s, Cursor const &c) { s.contract.state.participants = c.size(); }},
      {"neighbors", [](Scenario &s, Cursor const &c) { s.contract.state.neighbors = c.real(); }},
      {"honest_broadcast", [](Scenario &s, Cursor const &c) { s.contract.state.honest_broadcast = c.real(); }},
      {"mean_queue_length", [](Scenario &s, Cursor const &c) { s.contract.state.mean_queue_length = c.real(); }},
      {"roi", [](Scenario &s, Cursor const &c) { s.contract.state.roi = c.real(); }},
      {"unit_cost", [](Scenario &s, Cursor const &c) { s.contract.state.unit_cost = c.real(); }},
      {"channel_rounds", [](Scenario &s, Cursor const &c) { s.contract.state.rounds = c.integer(); }},
      {"compute", [](Scenario &s, Cursor const &c) { s.contract.actions.compute = c.grid(); }},
      {"action_fee", [](Scenario &s, Cursor const &c) { s.contract.actions.fee = c.grid(); }},
      {"bonus", [](Scenario &s, Cursor const &c) { s.contract.contracts.bonus = c.grid(); }},
      {"kappa", [](Scenario &s, Cursor const &c) { s.contract.contracts.kappa = c.grid(); }},
      {"alpha", [](Scenario &s, Cursor const &c) { s.contract.assessment.alpha = c.real(); }},
      {"expected_os2a", [](Scenario &s, Cursor const &c) { s.contract.assessment.expected_os2a = c.real(); }},
      {"fee_bands", [](Scenario &s, Cursor const &c) { s.contract.assessment.fee_bands = c.size(); }},
      {"threshold", [](Scenario &s, Cursor const &c) { s.contract.threshold = c.real(); }},
    };
    t["attack"] = {
      {"kind",
       [](Scenario &s, Cursor const &c) {
         try
         {
           s.attack.kind = parse_attack_kind(c.value);
         }
         catch (InvalidArgument const &e)
         {
           c.fail(e.what());
         }
       }},
      {"target_level",
       [](Scenario &s, Cursor const &c) {
         auto const v = c.size();
         if (v == 0)
         {
           c.fail("levels are numbered from 1");
         }
         s.attack.target_level = v - 1;
       }},
      {"attackers", [](Scenario &s, Cursor const &c) { s.attack.attackers = c.size(); }},
      {"sybils", [](Scenario &s, Cursor const &c) { s.attack.sybils = c.size(); }},
      {"start", [](Scenario &s, Cursor const &c) { s.attack.start = c.integer(); }},
      {"end", [](Scenario &s, Cursor const &c) { s.attack.end = c.integer(); }},
      {"rate", [](Scenario &s, Cursor const &c) { s.attack.rate = c.real(); }},
      {"value", [](Scenario &s, Cursor const &c) { s.attack.value = c.real(); }},
      {"satisfied", [](Scenario &s, Cursor const &c) { s.attack.satisfied = c.flag(); }},
    };
    return t;
  }();
  return table;
}

}  // namespace

Scenario parse_scenario(std::istream &in)
{
  Scenario       s;
  Section const *section = nullptr;
  std::string    section_name;
  std::string    raw;
  std::size_t    line_no = 0;
  while (std::getline(in, raw))
  {
    ++line_no;
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos)
    {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty())
    {
      continue;
    }
    if (line.front() == '[')
    {
      if (line.back() != ']')
      {
        throw ParseError(line_no, std::string(line), "unterminated section header");
      }
      section_name = std::string(trim(line.substr(1, line.size() - 2)));
      auto it      = sections().find(section_name);
      if (it == sections().end())
      {
        throw ParseError(line_no, section_name, "unknown section");
      }
      section = &it->second;
      if (section_name == "level")
      {
        s.levels.emplace_back().name = "level-" + std::to_string(s.levels.size() + 1);
      }
      else if (section_name == "client_type")
      {
        s.client_types.emplace_back().name = "type-" + std::to_string(s.client_types.size() + 1);
      }
      continue;
    }
    auto const eq = line.find('=');
    if (eq == std::string_view::npos)
    {
      throw ParseError(line_no, std::string(line), "expected key = value");
    }
    auto const key   = std::string(trim(line.substr(0, eq)));
    auto const value = trim(line.substr(eq + 1));
    if (section == nullptr)
    {
      throw ParseError(line_no, key, "key outside of any section");
    }
    auto setter = section->find(key);
    if (setter == section->end())
    {
      throw ParseError(line_no, section_name + "." + key, "unknown key");
    }
    setter->second(s, Cursor{line_no, section_name + "." + key, value});
  }
  try
  {
    s.validate();
  }
  catch (InvalidArgument const &e)
  {
    throw ParseError(0, "scenario", e.what());
  }
  return s;
}

Scenario load_scenario(std::filesystem::path const &path)
{
  std::ifstream in(path);
  if (!in)
  {
    throw LookupError("cannot open scenario file " + path.string());
  }
  return parse_scenario(in);
}

}  // namespace anchorsim::sim
