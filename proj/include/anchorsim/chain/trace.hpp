#pragma once

#include "anchorsim/ledger/digest.hpp"

#include <optional>
#include <unordered_map>
#include <vector>

namespace anchorsim::chain {

/// Submission and registration times of every transaction seen by a chain.
class ChainTrace
{
public:
  struct Record
  {
    double                     submitted{0.0};
    std::optional<double>      registered;
    std::optional<std::size_t> block;
  };
  struct BlockMark
  {
    double      time;
    std::size_t tx_count;
  };

  void submitted(ledger::Digest const &id, double at);
  void registered(ledger::Digest const &id, double at, std::size_t block);
  void block(double at, std::size_t tx_count);

  Record const                 *find(ledger::Digest const &id) const;
  std::vector<BlockMark> const &blocks() const { return blocks_; }
  std::size_t                   submitted_count() const { return records_.size(); }
  double                        start_time() const { return start_; }

private:
  std::unordered_map<ledger::Digest, Record, ledger::DigestHash> records_;
  std::vector<BlockMark>                                         blocks_;
  double                                                         start_{0.0};
  bool                                                           started_{false};
};

/// Packed transactions per simulated second over (from, to].
double measure_throughput(ChainTrace const &trace, double from, double to);
/// Over the whole trace: from the first submission to the last block.
double measure_throughput(ChainTrace const &trace);

/// Registration time minus submission time. Throws LookupError for unknown or
/// not-yet-registered transactions.
double measure_confirmation_latency(ChainTrace const &trace, ledger::Digest const &id);

}  // namespace anchorsim::chain
