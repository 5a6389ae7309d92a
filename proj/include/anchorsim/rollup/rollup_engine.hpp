#pragma once

#include "anchorsim/chain/anchor_chain.hpp"
#include "anchorsim/mwsl/reputation.hpp"
#include "anchorsim/rollup/opinion_tx.hpp"
#include "anchorsim/rollup/reputation_tree.hpp"

#include <map>
#include <set>
#include <span>
#include <unordered_map>

namespace anchorsim::rollup {

using ledger::Transaction;

/// Stable small integer ids for client addresses, assigned on first use.
class ClientDirectory
{
public:
  mwsl::ClientId                id(Address const &client);
  std::optional<mwsl::ClientId> find(Address const &client) const;
  std::size_t                   size() const { return ids_.size(); }

private:
  std::map<Address, mwsl::ClientId> ids_;
};

/// Hash list of `pending` in order; root left unset.
ledger::RollupRecord compress(std::span<Transaction const> pending);

/// Records every opinion of `batch` in `ledger` and recomputes the leaf of
/// each touched MASP. Throws LookupError naming an unknown MASP.
ReputationTree apply_opinions(mwsl::InteractionLedger &ledger, ReputationTree const &rt,
                              std::span<Transaction const> batch, ClientDirectory &clients,
                              mwsl::ReputationParams const &params);

struct RollupParams
{
  std::size_t            max_count{500};
  double                 max_time{60.0};
  Tokens                 rollup_fee{to_tokens(0.01)};
  std::size_t            replicas{3};
  mwsl::ReputationParams reputation;
  mwsl::DecayParams      decay;

  void validate() const;
};

struct RollupResult
{
  std::uint64_t         sequence{0};
  std::size_t           duty{0};
  Digest                tx_id;
  ledger::RollupRecord  record;
  bool                  accepted{false};
  std::optional<Digest> poison_tx;
  double                submitted_at{0.0};

  std::size_t bytes_raw() const { return ledger::kTxRecordBytes * record.hashes.size(); }
  std::size_t bytes_compressed() const { return record.accounting_size(); }
};

/// A group of replicated roll-up coordinators serving one set of MASPs.
///
/// Replication is atomic: every accepted opinion lands in every replica's
/// pending list. Each roll-up is built by the duty replica (round-robin by
/// sequence number) and validated by the others through independent
/// reconstruction of the reputation tree.
class RollupEngine
{
public:
  RollupEngine(RollupParams params, ledger::SignatureScheme &scheme, std::vector<Address> masps,
               std::uint64_t seed, std::string_view label = "rco");

  /// Signs an opinion on behalf of `client` and feeds it to accept().
  Transaction collect_opinion(ledger::Identity const &client, Address const &masp, OpinionPayload const &opinion,
                              double now);

  /// Validates and queues an OpinionUpdate. Returns false (pending unchanged)
  /// for a bad signature, wrong kind, malformed payload or block regression.
  bool accept(Transaction const &tx, double now);

  /// True when pending reached max_count or max_time elapsed since the last roll-up.
  bool due(double now) const;

  /// Rolls up the oldest min(max_count, |pending|) opinions and submits the
  /// result to `anchor`. A rejected roll-up is poisoned before returning.
  RollupResult roll_up(chain::AnchorChain &anchor, double now);

  /// Rolls up while due() holds; returns the results.
  std::vector<RollupResult> poll(chain::AnchorChain &anchor, double now);

  /// Reverts the roll-up `bad_tx`, requeues its opinions and posts a poison
  /// claim. No-op if already rolled back. Only the most recent roll-up can be reverted.
  void poison_rollback(chain::AnchorChain &anchor, Digest const &bad_tx, double now);

  /// The duty replica of roll-up `sequence` corrupts one leaf of its claimed tree.
  void tamper_at(std::uint64_t sequence) { tamper_.insert(sequence); }

  /// Re-executes every valid roll-up of this group found on `chain` from genesis.
  /// Throws ValidationError on a missing transaction or root mismatch.
  Digest replay(chain::Ledger const &chain) const;

  ReputationTree const                &tree() const { return tree_; }
  Digest const                        &last_committed_root() const { return tree_.root(); }
  std::vector<Transaction> const      &pending(std::size_t replica = 0) const { return replicas_.at(replica).pending; }
  bool                                 replicas_agree() const;
  std::vector<RollupResult> const     &results() const { return results_; }
  std::size_t                          opinions_rolled() const { return rolled_; }
  std::uint64_t                        sequence() const { return sequence_; }
  Transaction const                   *archived(Digest const &id) const;
  mwsl::InteractionLedger const       &interactions() const { return replicas_.front().ledger; }
  ClientDirectory const               &clients() const { return clients_; }
  std::vector<ledger::Identity> const &coordinators() const { return identities_; }
  RollupParams const                  &params() const { return params_; }
  std::optional<mwsl::MaspId>          masp_id(Address const &masp) const;

private:
  struct Replica
  {
    mwsl::InteractionLedger  ledger;
    std::vector<Transaction> pending;
  };

  void commit_open();

  RollupParams                             params_;
  ledger::SignatureScheme                 &scheme_;
  std::vector<ledger::Identity>            identities_;
  std::vector<Replica>                     replicas_;
  ClientDirectory                          clients_;
  ReputationTree                           tree_;
  ReputationTree                           previous_tree_;
  std::vector<Transaction>                 open_batch_;  ///< opinions of the revertible roll-up
  std::optional<Digest>                    open_tx_;
  std::map<Digest, Digest>                 rolled_back_;  ///< bad roll-up -> poison claim
  std::set<std::uint64_t>                  tamper_;
  std::unordered_map<Digest, Transaction, ledger::DigestHash> archive_;
  std::map<std::pair<Address, Address>, std::uint64_t>        last_block_;
  std::vector<RollupResult>                results_;
  std::uint64_t                            sequence_{0};
  std::size_t                              rolled_{0};
  double                                   last_rollup_time_{0.0};
  std::vector<Address>                     masps_;
};

}  // namespace anchorsim::rollup
