#pragma once

#include "anchorsim/mwsl/interaction_ledger.hpp"

#include <array>
#include <optional>
#include <map>
#include <span>

namespace anchorsim::mwsl {

/// Calibration factor vector (F^a, F^r, W) of one reference client.
struct ReferenceInput
{
  Opinion opinion;
  double  familiarity{0.0};
  double  freshness{0.0};
  double  worth{0.0};
};

/// Weighted reference opinion: weights are ||mu (.) (F^a, F^r, W)||_2, s is
/// scaled by (1 - sensitivity), u by sensitivity, c unscaled.
Opinion reference_opinion(std::span<ReferenceInput const> refs, std::array<double, 3> const &mu,
                          double sensitivity);

struct Ablation
{
  bool familiarity{true};
  bool freshness{true};
  bool market_worth{true};
};

struct ReputationParams
{
  double                gamma{0.5};
  double                default_sensitivity{0.5};
  std::array<double, 3> mu{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  Ablation              ablation;

  /// mu with disabled factors zeroed.
  std::array<double, 3> effective_mu() const;
  void                  validate() const;
};

/// Builds calibrated reference inputs for `masp`, skipping `exclude` when set.
/// Market worth is range-normalised to [0, 1] over the returned set.
std::vector<ReferenceInput> reference_inputs(InteractionLedger const &ledger, MaspId masp,
                                             std::optional<ClientId> exclude, std::uint64_t latest_block);

/// Reputation of `masp` from `client`'s perspective: local opinion fused with
/// the calibrated reference opinion of every other client.
double client_reputation(InteractionLedger const &ledger, ReputationParams const &params, ClientId client,
                         MaspId masp, double sensitivity, std::uint64_t latest_block);

/// Client-independent reputation stored in the reputation tree: reference
/// opinion over all clients at the default sensitivity, then s + gamma * c.
double aggregate_reputation(InteractionLedger const &ledger, ReputationParams const &params, MaspId masp,
                            std::uint64_t latest_block);

}  // namespace anchorsim::mwsl

namespace anchorsim::mwsl {

/// Read-only reputation queries against one ledger snapshot at one block.
///
/// Per MASP, the weighted reference sums over all clients are built once;
/// a client's reference opinion then drops that client's own term, falling
/// back to a full rebuild when removing it would move the worth range.
class ReputationView
{
public:
  ReputationView(InteractionLedger const &ledger, ReputationParams params, std::uint64_t latest_block);

  double client_reputation(ClientId client, MaspId masp, double sensitivity) const;
  double aggregate(MaspId masp) const;

  std::uint64_t latest_block() const { return latest_; }

private:
  struct Summary
  {
    std::vector<ReferenceInput> refs;     ///< normalised over the full reference set
    std::vector<ClientId>       clients;  ///< parallel to refs
    std::vector<double>         weights;
    double                      s{0.0}, u{0.0}, c{0.0}, total{0.0};
    double                      wmin{0.0}, wmax{0.0};
    std::size_t                 at_min{0}, at_max{0};
    std::size_t                 positive{0};
    std::vector<double>         raw_worth;
  };

  Summary const &summary(MaspId masp) const;

  InteractionLedger const                 &ledger_;
  ReputationParams                         params_;
  std::array<double, 3>                    mu_;
  std::uint64_t                            latest_;
  mutable std::map<MaspId, Summary>        cache_;
};

}  // namespace anchorsim::mwsl
