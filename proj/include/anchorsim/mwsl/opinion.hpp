#pragma once

#include <cstdint>

namespace anchorsim::mwsl {

/// Subjective-logic triple: satisfying, unsatisfying and uncertainty mass.
///
/// Local opinions lie on the simplex s + u + c = 1. Reference and fused
/// triples are carried in the same type but need not.
struct Opinion
{
  double s{0.0};
  double u{0.0};
  double c{1.0};

  double sum() const { return s + u + c; }
  bool   operator==(Opinion const &) const = default;
};

/// Opinion from p satisfying and n unsatisfying judgements.
Opinion local_opinion(std::uint64_t positive, std::uint64_t negative);

/// Cumulative fusion of a local opinion with a reference triple.
Opinion fuse_opinions(Opinion const &local, Opinion const &reference);

/// R = s + gamma * c.
double reputation(Opinion const &fused, double gamma);

/// theta^delta with delta = (latest - carrying) / block_rate, the opinion's age in seconds.
double freshness(std::uint64_t carrying_block, std::uint64_t latest_block, double block_rate, double decay);

}  // namespace anchorsim::mwsl
