#include "anchorsim/rollup/rollup_engine.hpp"

#include "anchorsim/common/error.hpp"

#include <algorithm>

namespace anchorsim::rollup {

mwsl::ClientId ClientDirectory::id(Address const &client)
{
  auto [it, inserted] = ids_.try_emplace(client, static_cast<mwsl::ClientId>(ids_.size()));
  return it->second;
}

std::optional<mwsl::ClientId> ClientDirectory::find(Address const &client) const
{
  auto it = ids_.find(client);
  if (it == ids_.end())
  {
    return std::nullopt;
  }
  return it->second;
}

ledger::RollupRecord compress(std::span<Transaction const> pending)
{
  if (pending.empty())
  {
    throw InvalidArgument("cannot roll up an empty pending list");
  }
  ledger::RollupRecord r;
  r.hashes.reserve(pending.size());
  for (auto const &tx : pending)
  {
    r.hashes.push_back(ledger::transaction_id(tx));
  }
  return r;
}

ReputationTree apply_opinions(mwsl::InteractionLedger &ledger, ReputationTree const &rt,
                              std::span<Transaction const> batch, ClientDirectory &clients,
                              mwsl::ReputationParams const &params)
{
  std::set<mwsl::MaspId> touched;
  std::uint64_t          latest = 0;
  for (auto const &tx : batch)
  {
    auto const &masp = tx.receiver.value();
    auto        idx  = rt.index_of(masp);
    if (!idx)
    {
      throw LookupError("opinion references unknown MASP " + masp.hex());
    }
    auto const p = decode_opinion(tx.payload);
    ledger.record(clients.id(tx.sender), static_cast<mwsl::MaspId>(*idx), p.satisfied, from_tokens(p.value),
                  p.block);
    touched.insert(static_cast<mwsl::MaspId>(*idx));
    latest = std::max(latest, p.block);
  }
  std::map<Address, FixedValue> updates;
  for (auto m : touched)
  {
    double const r = mwsl::aggregate_reputation(ledger, params, m, latest);
    updates.emplace(rt.leaves()[m].masp, to_fixed(r));
  }
  return rt.with_values(updates);
}

void RollupParams::validate() const
{
  if (max_count == 0 || max_count > 500)
  {
    throw InvalidArgument("roll-up max_count must lie in [1, 500]");
  }
  if (!(max_time > 0.0))
  {
    throw InvalidArgument("roll-up max_time must be positive");
  }
  if (rollup_fee < 0)
  {
    throw InvalidArgument("roll-up fee must be non-negative");
  }
  if (replicas == 0)
  {
    throw InvalidArgument("at least one coordinator replica is required");
  }
  reputation.validate();
}

RollupEngine::RollupEngine(RollupParams params, ledger::SignatureScheme &scheme, std::vector<Address> masps,
                           std::uint64_t seed, std::string_view label)
  : params_(std::move(params))
  , scheme_(scheme)
  , masps_(std::move(masps))
{
  params_.validate();
  if (!params_.reputation.ablation.freshness)
  {
    params_.decay.enabled = false;
  }
  for (std::size_t r = 0; r < params_.replicas; ++r)
  {
    identities_.push_back(scheme_.generate(seed, std::string(label) + "/" + std::to_string(r)));
    replicas_.push_back(Replica{mwsl::InteractionLedger(params_.decay), {}});
  }
  // no evidence: s = 0, c = 1, so R = gamma
  tree_          = ReputationTree::genesis(masps_, params_.reputation.gamma);
  previous_tree_ = tree_;
}

Transaction RollupEngine::collect_opinion(ledger::Identity const &client, Address const &masp,
                                          OpinionPayload const &opinion, double now)
{
  auto tx = make_opinion_tx(scheme_, client, masp, opinion);
  accept(tx, now);
  return tx;
}

bool RollupEngine::accept(Transaction const &tx, double)
{
  if (tx.kind != ledger::TxKind::OpinionUpdate || !tx.receiver)
  {
    return false;
  }
  if (!ledger::verify_transaction(scheme_, tx))
  {
    return false;
  }
  OpinionPayload p;
  try
  {
    p = decode_opinion(tx.payload);
  }
  catch (InvalidArgument const &)
  {
    return false;
  }
  auto [it, inserted] = last_block_.try_emplace({tx.sender, *tx.receiver}, p.block);
  if (!inserted)
  {
    if (p.block < it->second)
    {
      return false;
    }
    it->second = p.block;
  }
  auto const id = ledger::transaction_id(tx);
  archive_.emplace(id, tx);
  for (auto &rep : replicas_)
  {
    rep.pending.push_back(tx);
  }
  return true;
}

bool RollupEngine::due(double now) const
{
  auto const n = replicas_.front().pending.size();
  return n >= params_.max_count || (n > 0 && now - last_rollup_time_ >= params_.max_time);
}

void RollupEngine::commit_open()
{
  for (auto &rep : replicas_)
  {
    rep.ledger.commit();
  }
  open_batch_.clear();
  open_tx_.reset();
}

RollupResult RollupEngine::roll_up(chain::AnchorChain &anchor, double now)
{
  auto &front = replicas_.front().pending;
  if (front.empty())
  {
    throw InvalidArgument("cannot roll up an empty pending list");
  }
  commit_open();

  auto const n = std::min(front.size(), params_.max_count);
  std::vector<Transaction> batch(front.begin(), front.begin() + static_cast<std::ptrdiff_t>(n));
  for (auto &rep : replicas_)
  {
    rep.pending.erase(rep.pending.begin(), rep.pending.begin() + static_cast<std::ptrdiff_t>(n));
  }

  RollupResult res;
  res.sequence     = sequence_++;
  res.duty         = static_cast<std::size_t>(res.sequence % replicas_.size());
  res.submitted_at = now;
  res.record       = compress(batch);

  // every replica reconstructs the tree on its own copy of the ledger
  std::vector<Digest> roots;
  ReputationTree      honest;
  for (std::size_t r = 0; r < replicas_.size(); ++r)
  {
    replicas_[r].ledger.checkpoint();
    auto t = apply_opinions(replicas_[r].ledger, tree_, batch, clients_, params_.reputation);
    roots.push_back(t.root());
    if (r == res.duty)
    {
      honest = std::move(t);
    }
  }

  Digest claimed = honest.root();
  if (tamper_.contains(res.sequence) && honest.size() > 0)
  {
    auto leaves = honest.leaves();
    leaves.front().value += to_fixed(0.1);
    claimed = compute_root(leaves);
  }
  res.record.root = claimed;

  auto tx = ledger::make_signed(scheme_, identities_[res.duty], ledger::TxKind::ReputationRollup, std::nullopt,
                                ledger::encode_rollup(res.record), params_.rollup_fee);
  res.tx_id = ledger::transaction_id(tx);
  archive_.emplace(res.tx_id, tx);
  anchor.submit(tx, now);

  bool valid = true;
  for (std::size_t r = 0; r < replicas_.size(); ++r)
  {
    if ((r != res.duty || replicas_.size() == 1) && roots[r] != claimed)
    {
      valid = false;
    }
  }

  previous_tree_    = tree_;
  tree_             = std::move(honest);
  open_batch_       = std::move(batch);
  open_tx_          = res.tx_id;
  last_rollup_time_ = now;
  rolled_ += open_batch_.size();

  res.accepted = valid;
  if (!valid)
  {
    poison_rollback(anchor, res.tx_id, now);
    res.poison_tx = rolled_back_.at(res.tx_id);
  }
  results_.push_back(res);
  return res;
}

std::vector<RollupResult> RollupEngine::poll(chain::AnchorChain &anchor, double now)
{
  std::vector<RollupResult> out;
  while (due(now))
  {
    out.push_back(roll_up(anchor, now));
  }
  return out;
}

void RollupEngine::poison_rollback(chain::AnchorChain &anchor, Digest const &bad_tx, double now)
{
  if (rolled_back_.contains(bad_tx))
  {
    return;
  }
  if (!open_tx_ || *open_tx_ != bad_tx)
  {
    throw InvalidArgument("only the most recent roll-up can be rolled back");
  }
  for (auto &rep : replicas_)
  {
    rep.ledger.rollback();
    rep.pending.insert(rep.pending.begin(), open_batch_.begin(), open_batch_.end());
  }
  rolled_ -= open_batch_.size();
  tree_ = previous_tree_;

  // a super node claims the invalidity on-chain
  auto const &claimant = anchor.super_nodes().at(anchor.producer_of(anchor.ledger().height()));
  auto        poison   = ledger::make_signed(anchor.scheme(), claimant, ledger::TxKind::ReputationRollup,
                                             std::nullopt, ledger::encode_poison({bad_tx}), params_.rollup_fee);
  auto const  pid      = ledger::transaction_id(poison);
  anchor.submit(poison, now);
  rolled_back_.emplace(bad_tx, pid);
  for (auto &r : results_)
  {
    if (r.tx_id == bad_tx)
    {
      r.accepted  = false;
      r.poison_tx = pid;
    }
  }
  open_batch_.clear();
  open_tx_.reset();
}

bool RollupEngine::replicas_agree() const
{
  for (auto const &rep : replicas_)
  {
    if (rep.pending != replicas_.front().pending)
    {
      return false;
    }
  }
  return true;
}

Transaction const *RollupEngine::archived(Digest const &id) const
{
  auto it = archive_.find(id);
  return it == archive_.end() ? nullptr : &it->second;
}

std::optional<mwsl::MaspId> RollupEngine::masp_id(Address const &masp) const
{
  auto i = tree_.index_of(masp);
  if (!i)
  {
    return std::nullopt;
  }
  return static_cast<mwsl::MaspId>(*i);
}

Digest RollupEngine::replay(chain::Ledger const &chain) const
{
  std::set<Address> own;
  for (auto const &id : identities_)
  {
    own.insert(id.address());
  }
  std::set<Digest> poisoned;
  for (auto const &b : chain.blocks())
  {
    for (auto const &tx : b.transactions)
    {
      if (tx.kind == ledger::TxKind::ReputationRollup)
      {
        if (auto p = ledger::decode_poison(tx.payload))
        {
          poisoned.insert(p->target);
        }
      }
    }
  }

  mwsl::InteractionLedger ledger(params_.decay);
  ClientDirectory         clients;
  auto                    tree = ReputationTree::genesis(masps_, params_.reputation.gamma);
  for (auto const &b : chain.blocks())
  {
    for (auto const &tx : b.transactions)
    {
      if (tx.kind != ledger::TxKind::ReputationRollup || !own.contains(tx.sender))
      {
        continue;
      }
      auto rec = ledger::decode_rollup(tx.payload);
      if (!rec || poisoned.contains(ledger::transaction_id(tx)))
      {
        continue;
      }
      std::vector<Transaction> batch;
      batch.reserve(rec->hashes.size());
      for (auto const &h : rec->hashes)
      {
        auto const *op = archived(h);
        if (op == nullptr)
        {
          throw ValidationError("opinion " + h.hex() + " missing from the off-chain store");
        }
        batch.push_back(*op);
      }
      tree = apply_opinions(ledger, tree, batch, clients, params_.reputation);
      if (tree.root() != rec->root)
      {
        throw ValidationError("replayed root diverges at roll-up " + ledger::transaction_id(tx).hex());
      }
    }
  }
  return tree.root();
}

}  // namespace anchorsim::rollup
