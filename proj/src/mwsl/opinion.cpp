#include "anchorsim/mwsl/opinion.hpp"

#include "anchorsim/common/error.hpp"

#include <cmath>

namespace anchorsim::mwsl {

Opinion local_opinion(std::uint64_t positive, std::uint64_t negative)
{
  auto const total = positive + negative;
  if (total == 0)
  {
    throw InvalidArgument("local opinion needs at least one judgement");
  }
  double const n = static_cast<double>(total);
  double const c = 1.0 / n;
  return Opinion{(1.0 - c) * static_cast<double>(positive) / n, (1.0 - c) * static_cast<double>(negative) / n, c};
}

Opinion fuse_opinions(Opinion const &local, Opinion const &reference)
{
  double const den = local.c + reference.c - local.c * reference.c;
  if (!(den > 0.0))
  {
    throw InvalidArgument("opinion fusion is undefined when both uncertainties vanish");
  }
  return Opinion{(local.s * reference.c + reference.s * local.c) / den,
                 (local.u * reference.c + reference.u * local.c) / den, (reference.c * local.c) / den};
}

double reputation(Opinion const &fused, double gamma)
{
  if (!(gamma >= 0.0 && gamma <= 1.0))
  {
    throw InvalidArgument("gamma must lie in [0, 1]");
  }
  return fused.s + gamma * fused.c;
}

double freshness(std::uint64_t carrying_block, std::uint64_t latest_block, double block_rate, double decay)
{
  if (latest_block < carrying_block)
  {
    throw InvalidArgument("latest block precedes the opinion's block");
  }
  if (!(decay > 0.0 && decay < 1.0))
  {
    throw InvalidArgument("freshness decay must lie in (0, 1)");
  }
  if (!(block_rate > 0.0))
  {
    throw InvalidArgument("block rate must be positive");
  }
  double const age = static_cast<double>(latest_block - carrying_block) / block_rate;
  return std::pow(decay, age);
}

}  // namespace anchorsim::mwsl
