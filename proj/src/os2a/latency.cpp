#include "anchorsim/os2a/latency.hpp"

#include "anchorsim/common/error.hpp"

#include <cmath>
#include <string>

namespace anchorsim::os2a {

double latency_t1(double output_bytes, double bandwidth)
{
  if (!(bandwidth > 0.0))
  {
    throw InvalidArgument("bandwidth must be positive");
  }
  return output_bytes / bandwidth;
}

double latency_t2(double difficulty, double compute)
{
  if (!(compute > 0.0))
  {
    throw InvalidArgument("invested compute must be positive");
  }
  return difficulty / compute;
}

double broadcast_latency(double block_bytes, std::size_t nodes, double neighbors, double bandwidth,
                         double honest_broadcast, LogBase base)
{
  if (!(honest_broadcast > 0.0))
  {
    throw InvalidArgument("p_b is zero: every node is an attacker");
  }
  if (nodes == 0 || !(neighbors > 0.0) || !(bandwidth > 0.0) || !(block_bytes > 0.0))
  {
    throw InvalidArgument("broadcast parameters must be positive");
  }
  double lg = std::log(static_cast<double>(nodes));
  if (base == LogBase::Two)
  {
    lg = std::log2(static_cast<double>(nodes));
  }
  else if (base == LogBase::Ten)
  {
    lg = std::log10(static_cast<double>(nodes));
  }
  return lg * block_bytes / (neighbors * bandwidth * honest_broadcast);
}

std::vector<double> queue_latencies(FeeModel const &fees, double block_rate, double mean_queue_length)
{
  return queue_latencies(std::span<double const>(fees.weights()), block_rate, mean_queue_length);
}

std::vector<double> queue_latencies(std::span<double const> p, double block_rate, double mean_queue_length)
{
  if (!(block_rate > 0.0))
  {
    throw InvalidArgument("block rate must be positive");
  }
  auto const Z = p.size();
  if (Z == 0)
  {
    throw InvalidArgument("at least one fee band is required");
  }
  for (std::size_t k = 0; k < Z; ++k)
  {
    if (!(p[k] > 0.0))
    {
      throw InvalidArgument("fee band " + std::to_string(k + 1) + " has zero density");
    }
  }
  auto tau = [&](double x) { return mean_queue_length / x; };

  std::vector<double> t(Z);
  t[Z - 1]       = tau(p[Z - 1] * block_rate);
  double tail_p  = p[Z - 1];         // sum_{k>=z} p_k
  double tail_tp = t[Z - 1] * p[Z - 1];  // sum_{k>z} T(k) p_k, updated as we descend
  for (std::size_t i = Z - 1; i-- > 0;)
  {
    tail_p += p[i];
    t[i] = (tau(tail_p * block_rate) - tail_tp) / p[i];
    tail_tp += t[i] * p[i];
  }
  return t;
}

double queue_latency(std::size_t band, FeeModel const &fees, double block_rate, double mean_queue_length)
{
  if (band < 1 || band > fees.bands())
  {
    throw InvalidArgument("band index out of range");
  }
  return queue_latencies(fees, block_rate, mean_queue_length)[band - 1];
}

void ServiceParams::validate() const
{
  if (!(output_bytes > 0.0 && bandwidth > 0.0 && difficulty > 0.0 && compute > 0.0 && tx_bytes > 0.0 &&
        neighbors > 0.0 && block_rate > 0.0) ||
      block_capacity == 0 || nodes == 0)
  {
    throw InvalidArgument("service parameters must be strictly positive");
  }
  if (!(honest_broadcast > 0.0 && honest_broadcast <= 1.0))
  {
    throw InvalidArgument("p_b must lie in (0, 1]");
  }
  if (!(p_fork >= 0.0 && p_fork < 1.0))
  {
    throw InvalidArgument("p_fork must lie in [0, 1)");
  }
}

double latency_t3(ServiceParams const &p, FeeModel const &fees, std::size_t band)
{
  if (p.channel_active)
  {
    return 0.0;
  }
  double const tb = broadcast_latency(static_cast<double>(p.block_capacity) * p.tx_bytes, p.nodes, p.neighbors,
                                      p.bandwidth, p.honest_broadcast, p.log_base);
  double const tq = queue_latency(band, fees, p.block_rate, p.mean_queue_length);
  return (tb + tq) / (1.0 - p.p_fork);
}

double total_latency(ServiceParams const &p, FeeModel const &fees, std::size_t band)
{
  return latency_t1(p.output_bytes, p.bandwidth) + latency_t2(p.difficulty, p.compute) +
         latency_t3(p, fees, band);
}

}  // namespace anchorsim::os2a
