#pragma once

#include "anchorsim/sim/metrics_sink.hpp"
#include "anchorsim/sim/scenario.hpp"

namespace anchorsim::sim {

/// One forged opinion of an attack campaign.
struct ForgedOpinion
{
  std::size_t sybil;
  std::size_t masp;  ///< scenario MASP index
  bool        satisfied;
  double      value;
};

/// Forged opinions for `round`. Attackers are the first Q MASPs of the target
/// level; sybil k serves attacker k mod Q and posts floor(rate) opinions plus
/// one more with probability frac(rate).
/// Throws InvalidArgument when Q exceeds half of the MASPs.
std::vector<ForgedOpinion> attack_events(Scenario const &s, std::uint64_t round, Rng &rng);

struct RunSummary
{
  std::size_t opinions{0};  ///< honest opinions posted
  std::size_t forged{0};
  std::size_t rollups{0};
  std::size_t poisoned{0};
  std::size_t transfers{0};
  std::size_t committed{0};
  std::size_t rolled_back{0};
  std::size_t rejected{0};
  std::size_t unserved{0};  ///< client-rounds with no accepting MASP
  std::size_t blocks{0};
  std::size_t ledger_bytes{0};
  std::size_t reputation_bytes{0};  ///< accounting bytes of reputation-carrying records
  Tokens      supply{0};            ///< token total at genesis, checked every round
  Digest      final_root;
  contract::Outcome contract;
  double      mean_transfer_latency{0.0};
  /// Committed (anchored) reputation per round, averaged per level: [round][level].
  std::vector<std::vector<double>> level_reputation;
  /// Committed reputation of every MASP after the last round.
  std::vector<double> final_reputation;
};

struct RunResult
{
  MetricsSink metrics;
  RunSummary  summary;
};

/// Full two-layer run: opinions through the roll-up engine, fees through
/// transfer channels. Aborts with InvariantViolation on a broken invariant.
RunResult run(Scenario const &scenario);

/// Same workload with roll-up and channels disabled: every opinion and
/// every fee payment is a full on-chain transaction.
RunResult baseline_run(Scenario const &scenario);

}  // namespace anchorsim::sim
