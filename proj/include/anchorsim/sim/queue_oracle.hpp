#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace anchorsim::sim {

struct QueueOracleParams
{
  double        block_rate{0.2};       ///< lambda
  std::size_t   block_capacity{200};   ///< transactions per block
  double        load{0.7};             ///< arrival rate / (lambda * capacity)
  std::size_t   bands{5};              ///< Z
  double        fee_min{0.0};
  double        fee_max{4.0};
  double        dof{0.59};
  double        warmup{2000.0};        ///< seconds discarded before measuring
  double        horizon{20000.0};      ///< seconds of measured arrivals
  std::uint64_t seed{1};

  void validate() const;
};

struct QueueOracleResult
{
  std::vector<double>      simulated;  ///< mean queuing delay per band, seconds
  std::vector<std::size_t> served;     ///< measured transactions per band
  std::vector<double>      analytic;   ///< recursion prediction per band at the measured E(L)
  std::vector<double>      relative_error;
  double                   mean_queue_length{0.0};
  std::size_t              arrivals{0};
};

/// Discrete-event run of the fee-priority pool: Poisson arrivals with
/// chi-square fees, fixed-cadence blocks draining the highest fees first.
/// The analytic column evaluates the band recursion on the same fee range.
QueueOracleResult run_queue_oracle(QueueOracleParams const &params);

}  // namespace anchorsim::sim
