#pragma once

#include "anchorsim/chain/anchor_chain.hpp"
#include "anchorsim/channel/channel.hpp"
#include "anchorsim/contract/contract.hpp"
#include "anchorsim/rollup/rollup_engine.hpp"

#include <optional>
#include <string>
#include <vector>

namespace anchorsim::sim {

using ledger::Address;
using ledger::Digest;

/// MASP capability level: Bernoulli probability of a satisfying output.
struct Level
{
  std::string                  name;
  std::size_t                  masps{1};
  double                       satisfy{0.5};
  std::optional<std::uint64_t> drop_round;  ///< capability changes from this round on
  double                       drop_satisfy{0.0};

  double satisfy_at(std::uint64_t round) const
  {
    return drop_round && round >= *drop_round ? drop_satisfy : satisfy;
  }
};

/// Client strictness type. An output satisfies the client with probability
/// satisfy * (1 - strictness); sensitivity is the client's theta_i.
struct ClientType
{
  std::string name;
  std::size_t clients{1};
  double      strictness{0.0};
  double      sensitivity{0.5};
};

enum class AttackKind
{
  None,
  Flooding,
  LongRange,
  Dusting,
};

char const *to_string(AttackKind kind);
AttackKind  parse_attack_kind(std::string_view text);

/// Forged-opinion campaign: sybil clients controlled by attacking MASPs of
/// the target level post opinions without any service taking place.
struct AttackSpec
{
  AttackKind    kind{AttackKind::None};
  std::size_t   target_level{1};  ///< index into Scenario::levels
  std::size_t   attackers{0};     ///< Q: attacking MASPs, taken from the target level
  std::size_t   sybils{0};        ///< forged client identities
  std::uint64_t start{0};
  std::uint64_t end{0};           ///< last round with attack activity
  double        rate{1.0};        ///< opinions per sybil per active round (fractional part is a probability)
  double        value{1.0};       ///< claimed market value per opinion, tokens
  bool          satisfied{true};

  bool active(std::uint64_t round) const { return kind != AttackKind::None && round >= start && round <= end; }
};

enum class AcceptPolicy
{
  Capacity,     ///< a MASP serves at most `capacity` clients per round
  Probability,  ///< each handshake round is acknowledged with `accept_probability`
};

struct SelectionSpec
{
  AcceptPolicy policy{AcceptPolicy::Capacity};
  std::size_t  capacity{1};
  double       accept_probability{0.9};
};

struct ContractSpec
{
  contract::MarketState      state;
  contract::ActionGrid       actions{{1.0, 20.0, 5}, {0.1, 2.0, 5}};
  contract::ContractGrid     contracts{{0.0, 10.0, 5}, {0.0, 0.2, 5}};
  contract::AssessmentParams assessment;
  double                     threshold{0.0};  ///< U_SP participation threshold
};

struct Scenario
{
  std::string   id{"scenario"};
  std::uint64_t seed{1};
  std::uint64_t rounds{100};

  std::vector<Level>      levels;
  std::vector<ClientType> client_types;
  SelectionSpec           selection;

  chain::ChainParams     chain;
  rollup::RollupParams   rollup;
  channel::ChannelConfig channel;
  double                 client_funds{1.0e6};  ///< tokens credited to each client at genesis

  ContractSpec contract;
  AttackSpec   attack;

  /// Baseline mode: opinions and transfers go on-chain as full transactions.
  bool rollup_enabled{true};
  bool channels_enabled{true};

  std::size_t clients() const;
  std::size_t masps() const;
  std::size_t attackers() const { return attack.attackers; }
  /// Level index of MASP `m`; MASPs are numbered level by level.
  std::size_t level_of(std::size_t masp) const;
  /// Client type index of client `c`; clients are numbered type by type.
  std::size_t type_of(std::size_t client) const;

  /// Throws InvalidArgument naming the violated constraint.
  void validate() const;
};

/// Four capability levels of 25 MASPs, four strictness types of 25 clients,
/// 200 rounds, capability drop of levels 1 and 3 at round 120.
Scenario explicit_scenario(std::uint64_t seed = 1);

/// The explicit population without capability drops, attacked at level 2 by
/// all 25 of its MASPs, with the matching defense factor switched off:
/// familiarity for flooding, freshness for long-range, market worth for dusting.
/// Leaf reputations use sensitivity 0.
Scenario attack_scenario(AttackKind kind, std::uint64_t seed = 1);

}  // namespace anchorsim::sim
