#pragma once

#include "anchorsim/sim/metrics_sink.hpp"
#include "anchorsim/sim/queue_oracle.hpp"
#include "anchorsim/sim/scenario.hpp"

#include <string>
#include <vector>

namespace anchorsim::sim {

/// Outcome of one directional check with a one-line explanation.
struct Check
{
  bool        pass{false};
  std::string detail;
};

// Storage: the same opinion stream anchored one record per opinion versus
// through roll-ups.

struct StorageReport
{
  std::size_t opinions{0};
  std::size_t rollups{0};
  std::size_t baseline_bytes{0};  ///< accounting bytes of the on-chain opinion records
  std::size_t rollup_bytes{0};    ///< accounting bytes of the anchored roll-ups
  double      ratio{0.0};         ///< rollup_bytes / baseline_bytes
  Digest      baseline_root;
  Digest      rollup_root;
  MetricsSink metrics{"storage", 0};
  Check       check;
};

/// `opinions` judgements from 200 clients about 100 MASPs, 500 per block.
StorageReport storage_experiment(std::uint64_t seed, std::size_t opinions = 100000);

// Scaling: R coordinator groups, each owning a disjoint share of the MASPs.

struct RcoServiceModel
{
  double opinion_cost{1.0 / 400.0};  ///< simulated seconds of coordinator work per opinion
  double offered_rate{2400.0};       ///< opinions per second arriving across all groups
  double duration{30.0};             ///< simulated seconds
  std::size_t masps{64};
  std::size_t clients{512};
};

struct ScalingReport
{
  std::vector<std::size_t> groups;
  std::vector<double>      throughput;  ///< anchored opinions per simulated second
  std::vector<double>      speedup;     ///< throughput / (groups * single-group throughput)
  MetricsSink              metrics{"scaling", 0};
  Check                    check;
};

ScalingReport scaling_experiment(std::uint64_t seed, std::vector<std::size_t> groups = {1, 2, 4},
                                 RcoServiceModel model = {});

// Latency: on-chain transfers injected above block capacity versus channel
// rounds over already-open channels.

struct LatencyParams
{
  std::size_t block_capacity{200};
  double      overload{2.0};  ///< injected transactions per block / capacity
  std::size_t windows{30};    ///< one window per block interval
  std::size_t channels{20};
};

struct LatencyReport
{
  std::vector<double> baseline;        ///< mean confirmation latency per window
  std::size_t         longest_rise{0};  ///< longest run of strictly increasing windows
  double              channel_idle{0.0};
  double              channel_loaded{0.0};
  MetricsSink         metrics{"latency", 0};
  Check               check;
};

LatencyReport latency_experiment(std::uint64_t seed, LatencyParams params = {});

// Atomicity: channel rounds under random step delays and faults.

struct AtomicityParams
{
  std::size_t         rounds{10000};
  std::vector<double> delay_probabilities{0.0, 0.25, 0.5};
  double              mean_delay{6.0};        ///< exponential delay of a delayed step, seconds
  double              halt_probability{0.01};  ///< per round
  double              wrong_preimage_probability{0.01};
  std::size_t         channels{16};
  channel::ChannelConfig channel;  ///< step timeouts, timers and nominal step durations
};

struct AtomicityRow
{
  double      delay_probability{0.0};
  std::size_t committed{0};
  std::size_t rolled_back{0};
  std::size_t stalled{0};
  std::size_t rejected{0};
  std::size_t violations{0};  ///< rounds that were neither all nor nothing
};

struct AtomicityReport
{
  std::vector<AtomicityRow> rows;
  bool                      supply_conserved{true};
  MetricsSink               metrics{"atomicity", 0};
  Check                     check;
};

AtomicityReport atomicity_experiment(std::uint64_t seed, AtomicityParams params = {});

// Reputation semantics on the explicit scenario.

struct ReputationReport
{
  std::vector<std::vector<double>> mean;  ///< seed-averaged committed reputation [round][level]
  std::size_t                      order_violations{0};
  std::vector<std::size_t>         non_decreasing;  ///< per dropped level, smoothed steps that did not fall
  MetricsSink                      metrics{"explicit", 0};
  Check                            check;
};

ReputationReport explicit_experiment(std::vector<std::uint64_t> const &seeds);

// Attack ablations.

/// Turns the defense factor matching the scenario's attack on or off.
void set_defense(Scenario &s, bool on);

struct AttackReport
{
  AttackKind                       kind{AttackKind::None};
  std::vector<std::vector<double>> undefended;  ///< attack with the defense off [round][level]
  std::vector<std::vector<double>> defended;    ///< attack with the defense on
  std::vector<std::vector<double>> quiet_undefended;  ///< no attack, defense off (dusting only)
  std::vector<std::vector<double>> quiet_defended;
  double                           gain_undefended{0.0};
  double                           gain_defended{0.0};
  MetricsSink                      metrics{"attack", 0};
  Check                            check;
};

/// Seed-averaged runs of `base` (an attack scenario) with the defense off and on.
AttackReport attack_experiment(Scenario const &base, std::vector<std::uint64_t> const &seeds);

// Contract correctness.

struct ContractParams
{
  std::size_t states{20};
  std::size_t grid{50};  ///< points per axis of both grids
};

struct ContractReport
{
  std::size_t states{0};
  std::size_t mismatches{0};     ///< optimizer output differing from the flat enumeration
  std::size_t ir_failures{0};
  std::size_t profitable{0};     ///< profitable deviations found by the audit
  std::size_t infeasible{0};
  MetricsSink metrics{"contract", 0};
  Check       check;
};

ContractReport contract_experiment(std::uint64_t seed, ContractParams params = {});

/// Optimal contract and best response over the grids of `s`, one row per contract.
MetricsSink contract_sweep(Scenario const &s);

// Queuing model.

struct QueueReport
{
  QueueOracleResult oracle;
  double            density_mass{0.0};  ///< integral of the chi-square density over (0, inf)
  MetricsSink       metrics{"queue", 0};
  Check             check;
};

QueueReport queue_experiment(std::uint64_t seed, QueueOracleParams params = {});

}  // namespace anchorsim::sim
