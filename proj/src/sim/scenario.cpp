#include "anchorsim/sim/scenario.hpp"

#include "anchorsim/common/error.hpp"

#include <numeric>

namespace anchorsim::sim {

char const *to_string(AttackKind kind)
{
  switch (kind)
  {
  case AttackKind::None: return "none";
  case AttackKind::Flooding: return "flooding";
  case AttackKind::LongRange: return "long_range";
  case AttackKind::Dusting: return "dusting";
  }
  return "unknown";
}

AttackKind parse_attack_kind(std::string_view text)
{
  for (auto k : {AttackKind::None, AttackKind::Flooding, AttackKind::LongRange, AttackKind::Dusting})
  {
    if (text == to_string(k))
    {
      return k;
    }
  }
  if (text == "long-range")
  {
    return AttackKind::LongRange;
  }
  throw InvalidArgument("unknown attack kind '" + std::string(text) + "'");
}

std::size_t Scenario::clients() const
{
  return std::accumulate(client_types.begin(), client_types.end(), std::size_t{0},
                         [](std::size_t a, ClientType const &t) { return a + t.clients; });
}

std::size_t Scenario::masps() const
{
  return std::accumulate(levels.begin(), levels.end(), std::size_t{0},
                         [](std::size_t a, Level const &l) { return a + l.masps; });
}

std::size_t Scenario::level_of(std::size_t masp) const
{
  for (std::size_t i = 0; i < levels.size(); ++i)
  {
    if (masp < levels[i].masps)
    {
      return i;
    }
    masp -= levels[i].masps;
  }
  throw LookupError("MASP index out of range");
}

std::size_t Scenario::type_of(std::size_t client) const
{
  for (std::size_t i = 0; i < client_types.size(); ++i)
  {
    if (client < client_types[i].clients)
    {
      return i;
    }
    client -= client_types[i].clients;
  }
  throw LookupError("client index out of range");
}

void Scenario::validate() const
{
  auto require = [](bool ok, char const *what) {
    if (!ok)
    {
      throw InvalidArgument(what);
    }
  };
  require(!id.empty(), "scenario id must not be empty");
  require(rounds > 0, "rounds must be positive");
  require(!levels.empty(), "at least one capability level is required");
  require(!client_types.empty(), "at least one client type is required");
  for (auto const &l : levels)
  {
    require(l.masps > 0, "every level needs at least one MASP");
    require(l.satisfy >= 0.0 && l.satisfy <= 1.0, "level satisfy probability must lie in [0, 1]");
    require(l.drop_satisfy >= 0.0 && l.drop_satisfy <= 1.0, "level drop_satisfy must lie in [0, 1]");
  }
  for (auto const &t : client_types)
  {
    require(t.clients > 0, "every client type needs at least one client");
    require(t.strictness >= 0.0 && t.strictness < 1.0, "strictness must lie in [0, 1)");
    require(t.sensitivity >= 0.0 && t.sensitivity <= 1.0, "sensitivity must lie in [0, 1]");
  }
  require(selection.capacity > 0, "selection capacity must be positive");
  require(selection.accept_probability > 0.0 && selection.accept_probability <= 1.0,
          "accept probability must lie in (0, 1]");
  if (selection.policy == AcceptPolicy::Capacity)
  {
    require(selection.capacity * masps() >= clients(), "MASP capacity cannot serve every client each round");
  }
  require(client_funds > 0.0, "client funds must be positive");
  require(2 * attack.attackers <= masps(), "attackers must not exceed half of the MASPs");
  if (attack.kind != AttackKind::None)
  {
    require(attack.target_level < levels.size(), "attack target level out of range");
    require(attack.attackers > 0 && attack.attackers <= levels[attack.target_level].masps,
            "attackers must be between 1 and the target level size");
    require(attack.sybils > 0, "an attack needs at least one sybil client");
    require(attack.start <= attack.end, "attack start must not follow its end");
    require(attack.rate >= 0.0 && attack.value > 0.0, "attack rate and value must be positive");
  }
  chain.validate();
  rollup.validate();
  channel.validate();
  contract.state.validate();
  contract.actions.compute.validate("action compute");
  contract.actions.fee.validate("action fee");
  contract.contracts.bonus.validate("contract bonus");
  contract.contracts.kappa.validate("contract kappa");
}

Scenario explicit_scenario(std::uint64_t seed)
{
  Scenario s;
  s.id     = "explicit";
  s.seed   = seed;
  s.rounds = 200;
  s.levels = {
    {"level-1", 25, 0.9, 120, 0.8},
    {"level-2", 25, 0.7, std::nullopt, 0.0},
    {"level-3", 25, 0.5, 120, 0.4},
    {"level-4", 25, 0.3, std::nullopt, 0.0},
  };
  s.client_types = {
    {"lenient", 25, 0.0, 0.2},
    {"moderate", 25, 0.05, 0.4},
    {"strict", 25, 0.1, 0.6},
    {"harsh", 25, 0.15, 0.8},
  };
  return s;
}

Scenario attack_scenario(AttackKind kind, std::uint64_t seed)
{
  auto s = explicit_scenario(seed);
  s.id   = std::string("attack-") + to_string(kind);
  for (auto &l : s.levels)
  {
    l.drop_round.reset();
  }
  s.rollup.reputation.default_sensitivity = 0.0;
  s.attack.kind         = kind;
  s.attack.target_level = 1;
  s.attack.attackers    = 25;
  s.attack.start        = 1;
  s.attack.end          = 30;
  auto &ablation        = s.rollup.reputation.ablation;
  switch (kind)
  {
  case AttackKind::None: break;
  case AttackKind::Flooding:
    s.rounds            = 100;
    s.attack.sybils     = 100;
    s.attack.rate       = 1.0;
    s.attack.value      = 0.01;
    ablation.familiarity = false;
    break;
  case AttackKind::LongRange:
    s.rounds          = 160;
    s.attack.sybils   = 25;
    s.attack.rate     = 0.2;
    s.attack.value    = 1000.0;
    ablation.freshness = false;
    break;
  case AttackKind::Dusting:
    s.rounds              = 60;
    s.attack.sybils       = 100;
    s.attack.rate         = 1.0;
    s.attack.value        = 0.01;
    ablation.market_worth = false;
    break;
  }
  if (kind == AttackKind::None)
  {
    s.attack.attackers = 0;
  }
  return s;
}

}  // namespace anchorsim::sim
