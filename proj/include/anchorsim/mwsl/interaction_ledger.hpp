#pragma once

#include "anchorsim/mwsl/opinion.hpp"

#include <cstdint>
#include <map>
#include <span>
#include <vector>

namespace anchorsim::mwsl {

using ClientId = std::uint32_t;
using MaspId   = std::uint32_t;

/// One judgement as preserved by the coordinators.
struct HistoryEntry
{
  Opinion       opinion;  ///< local opinion after this judgement
  double        value{0.0};  ///< market value: service fee paid for the round
  std::uint64_t block{0};    ///< index of the block carrying the opinion
  bool          satisfied{false};
};

/// Freshness configuration shared by every freshness-weighted quantity.
struct DecayParams
{
  double decay{0.95};      ///< theta in (0, 1)
  double block_rate{0.2};  ///< lambda, blocks per second
  bool   enabled{true};    ///< false: no ageing at all

  double factor(std::uint64_t carrying_block, std::uint64_t latest_block) const;
};

/// Sum over all but the most recent entry of value * freshness, at `latest_block`.
double market_worth(std::span<HistoryEntry const> history, std::uint64_t latest_block, DecayParams const &decay);

struct PairRecord
{
  std::uint64_t             positive{0};
  std::uint64_t             negative{0};
  std::vector<HistoryEntry> history;

  std::uint64_t interactions() const { return positive + negative; }
  Opinion       opinion() const { return local_opinion(positive, negative); }
  std::uint64_t latest_block() const { return history.back().block; }

  // incremental market worth, referenced to latest_block()
  double worth_at_latest{0.0};
};

/// Per (client, MASP) judgement counts and opinion history.
class InteractionLedger
{
public:
  explicit InteractionLedger(DecayParams decay = {});

  void record(ClientId client, MaspId masp, bool satisfied, double value, std::uint64_t block);

  PairRecord const *find(ClientId client, MaspId masp) const;
  /// Clients with at least one interaction with `masp`, ascending id.
  std::vector<ClientId> const &clients_of(MaspId masp) const;
  std::uint64_t                total_interactions(MaspId masp) const;
  std::size_t                  records() const { return pairs_.size(); }

  /// Market worth of the pair at `latest_block`, from the incremental accumulator.
  double worth(PairRecord const &rec, std::uint64_t latest_block) const;

  DecayParams const &decay() const { return decay_; }

  /// Starts journaling; every record() after this can be undone by rollback().
  void checkpoint();
  /// Undoes every record() since checkpoint() and stops journaling.
  void rollback();
  /// Drops the journal, making the recorded judgements permanent.
  void commit();
  bool journaling() const { return journaling_; }

private:
  struct Undo
  {
    MaspId   masp;
    ClientId client;
    bool     created;
    bool     satisfied;
    double   previous_worth;
  };

  DecayParams                                        decay_;
  std::map<std::pair<MaspId, ClientId>, PairRecord>  pairs_;
  std::map<MaspId, std::vector<ClientId>>            clients_;
  std::map<MaspId, std::uint64_t>                    totals_;
  std::vector<Undo>                                  journal_;
  bool                                               journaling_{false};
};

/// p_ij + n_ij over the sum across clients.
double familiarity(InteractionLedger const &ledger, ClientId client, MaspId masp);

}  // namespace anchorsim::mwsl
