#pragma once

#include "anchorsim/os2a/fee_model.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace anchorsim::os2a {

/// Output transfer time S_p / b.
double latency_t1(double output_bytes, double bandwidth);
/// Inference time D_t / c.
double latency_t2(double difficulty, double compute);

enum class LogBase
{
  Natural,
  Two,
  Ten,
};

/// log(|M|) * S_b / (k * b * p_b), S_b in bytes.
double broadcast_latency(double block_bytes, std::size_t nodes, double neighbors, double bandwidth,
                         double honest_broadcast, LogBase base = LogBase::Natural);

/// Queuing delay per fee band (index 0 is band 1, the cheapest).
///
/// Evaluated top-down: T(Z) = tau(p_Z * lambda) and, for z < Z,
/// T(z) = [tau(lambda * sum_{k>=z} p_k) - sum_{k>z} T(k) p_k] / p_z with
/// tau(x) = E(L) / x. Values are returned as computed, negative ones included.
std::vector<double> queue_latencies(FeeModel const &fees, double block_rate, double mean_queue_length);
/// Same recursion on explicit band weights p_1..p_Z.
std::vector<double> queue_latencies(std::span<double const> weights, double block_rate, double mean_queue_length);
/// Single band, 1-based.
double queue_latency(std::size_t band, FeeModel const &fees, double block_rate, double mean_queue_length);

struct ServiceParams
{
  double      output_bytes{1.0e6};       ///< S_p
  double      bandwidth{1.0e6};          ///< b-bar
  double      difficulty{50.0};          ///< D_t
  double      compute{10.0};             ///< c-bar
  std::size_t block_capacity{2000};      ///< S_b in transactions
  double      tx_bytes{99.0};            ///< accounting bytes per transaction
  std::size_t nodes{8};                  ///< |M|
  double      neighbors{4.0};            ///< k-bar
  double      honest_broadcast{1.0};     ///< p_b
  double      block_rate{0.2};           ///< lambda
  double      mean_queue_length{100.0};  ///< E(L)
  double      p_fork{0.0};
  bool        channel_active{false};
  LogBase     log_base{LogBase::Natural};

  void validate() const;
};

/// Channel-establishment latency (T_b + T_q) / (1 - p_fork); zero when the channel is active.
double latency_t3(ServiceParams const &p, FeeModel const &fees, std::size_t band);
/// T1 + T2 + T3.
double total_latency(ServiceParams const &p, FeeModel const &fees, std::size_t band);

}  // namespace anchorsim::os2a
