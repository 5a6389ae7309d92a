#include "anchorsim/sim/simulator.hpp"

#include "anchorsim/channel/channel_registry.hpp"
#include "anchorsim/common/error.hpp"
#include "anchorsim/mwsl/selection.hpp"
#include "anchorsim/os2a/assessment.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>

namespace anchorsim::sim {

std::vector<ForgedOpinion> attack_events(Scenario const &s, std::uint64_t round, Rng &rng)
{
  if (2 * s.attack.attackers > s.masps())
  {
    throw InvalidArgument("attack refused: " + std::to_string(s.attack.attackers) + " attackers exceed half of " +
                          std::to_string(s.masps()) + " MASPs");
  }
  std::vector<ForgedOpinion> out;
  if (!s.attack.active(round))
  {
    return out;
  }
  std::size_t first = 0;
  for (std::size_t l = 0; l < s.attack.target_level; ++l)
  {
    first += s.levels[l].masps;
  }
  double const whole = std::floor(s.attack.rate);
  double const frac  = s.attack.rate - whole;
  for (std::size_t sybil = 0; sybil < s.attack.sybils; ++sybil)
  {
    auto const n = static_cast<std::size_t>(whole) + (frac > 0.0 && rng.bernoulli(frac) ? 1 : 0);
    for (std::size_t k = 0; k < n; ++k)
    {
      out.push_back({sybil, first + sybil % s.attack.attackers, s.attack.satisfied, s.attack.value});
    }
  }
  return out;
}

namespace {

constexpr std::uint8_t kDirectTransfer = 3;
constexpr auto         kUnknownClient  = std::numeric_limits<mwsl::ClientId>::max();

Bytes encode_direct(Tokens amount, Digest const &content)
{
  Writer w;
  w.u8(kDirectTransfer);
  w.i64(amount);
  w.raw(content.view());
  return std::move(w).take();
}

std::optional<Tokens> decode_direct_amount(ByteView payload)
{
  if (payload.size() != 1 + 8 + 32 || payload[0] != kDirectTransfer)
  {
    return std::nullopt;
  }
  Reader r(payload);
  r.u8();
  return r.i64();
}

struct Assignment
{
  std::size_t client;
  std::size_t masp;
  double      reputation;  ///< client's view of the MASP at selection
  double      os2a;
  Tokens      fee;
  bool        opened{false};
};

struct RoundStats
{
  std::size_t committed{0}, rolled_back{0}, stalled{0}, rejected{0};
  std::vector<double> latencies;
  double os2a_sum{0.0}, fee_sum{0.0}, u_sp_sum{0.0}, u_c_sum{0.0};
  std::size_t served{0};
};

class Simulator
{
public:
  explicit Simulator(Scenario s)
    : s_(std::move(s))
    , rng_(s_.seed)
    , select_rng_(rng_.fork(1))
    , outcome_rng_(rng_.fork(2))
    , attack_rng_(rng_.fork(3))
    , anchor_(s_.chain, scheme_, s_.seed)
    , metrics_(s_.id, s_.seed)
  {
    s_.validate();
    s_.rollup.decay.block_rate = s_.chain.block_rate();
    if (!s_.rollup.reputation.ablation.freshness)
    {
      s_.rollup.decay.enabled = false;
    }
    for (std::size_t i = 0; i < s_.clients(); ++i)
    {
      clients_.push_back(scheme_.generate(s_.seed, "client/" + std::to_string(i)));
    }
    for (std::size_t j = 0; j < s_.masps(); ++j)
    {
      masps_.push_back(scheme_.generate(s_.seed, "masp/" + std::to_string(j)));
      masp_addrs_.push_back(masps_.back().address());
    }
    for (std::size_t k = 0; k < s_.attack.sybils; ++k)
    {
      sybils_.push_back(scheme_.generate(s_.seed, "sybil/" + std::to_string(k)));
    }
    // tie-break order among equal reputations, independent of level numbering
    tie_rank_.resize(s_.masps());
    std::iota(tie_rank_.begin(), tie_rank_.end(), std::size_t{0});
    for (std::size_t i = tie_rank_.size(); i > 1; --i)
    {
      std::swap(tie_rank_[i - 1], tie_rank_[select_rng_.below(i)]);
    }

    if (s_.rollup_enabled)
    {
      engine_ = std::make_unique<rollup::RollupEngine>(s_.rollup, scheme_, masp_addrs_, s_.seed);
    }
    else
    {
      base_ledger_ = std::make_unique<mwsl::InteractionLedger>(s_.rollup.decay);
      base_tree_   = rollup::ReputationTree::genesis(masp_addrs_, s_.rollup.reputation.gamma);
    }
    if (s_.channels_enabled)
    {
      registry_ = std::make_unique<channel::ChannelRegistry>(anchor_, s_.channel, mix64(s_.seed ^ 0xc4a77e1));
      for (auto const &c : clients_)
      {
        registry_->credit(c.address(), to_tokens(s_.client_funds));
      }
    }
    else
    {
      for (auto const &c : clients_)
      {
        balances_[c.address()] = to_tokens(s_.client_funds);
      }
      for (auto const &m : masps_)
      {
        balances_[m.address()] = 0;
      }
    }
    supply_ = current_supply();
    anchor_.on_block([this](ledger::Block const &b, double now) { on_block(b, now); });

    setup_contract();
    declare_tables();
  }

  RunResult execute()
  {
    double now = 0.0;
    for (std::uint64_t r = 0; r < s_.rounds; ++r)
    {
      now = step(r, now);
    }
    finish(now);
    return {std::move(metrics_), std::move(summary_)};
  }

private:
  void setup_contract()
  {
    auto params           = s_.contract.assessment;
    params.channel_active = true;
    auto state            = s_.contract.state;
    state.block_capacity  = s_.chain.block_capacity;
    state.block_rate      = s_.chain.block_rate();
    state.participants    = s_.chain.nodes;
    state.neighbors       = s_.chain.avg_neighbors;
    state.honest_broadcast = s_.chain.honest_broadcast();
    assessor_ = std::make_unique<contract::Assessor>(state, s_.contract.actions, params);
    outcome_  = contract::optimize_contract(s_.contract.contracts, *assessor_, s_.contract.threshold);
    if (!outcome_.feasible)
    {
      throw InvariantViolation("contract: no contract on the grid meets the MASP participation threshold");
    }
    summary_.contract = outcome_;
    objective_        = assessor_->objective(outcome_.response.action);
    double const max_fee =
      contract::service_fee(outcome_.contract, 1.0, state.difficulty);
    deposit_ = std::max<Tokens>(to_tokens(static_cast<double>(state.rounds) * max_fee), 1);
  }

  void declare_tables()
  {
    metrics_.declare("reputation", {"masp", "level", "committed", "live"});
    metrics_.declare("level_reputation", {"level", "committed", "live"});
    metrics_.declare("ledger", {"height", "bytes_total", "bytes_reputation", "transactions"});
    metrics_.declare("latency", {"kind", "count", "mean", "max"});
    metrics_.declare("throughput", {"opinions_posted", "forged_posted", "opinions_rolled", "rollups"});
    metrics_.declare("contract", {"bonus", "kappa", "compute", "action_fee", "served", "mean_os2a", "mean_fee",
                                  "mean_masp_utility", "mean_client_utility"});
    metrics_.declare("atomicity", {"committed", "rolled_back", "stalled", "rejected", "supply_ok"});
  }

  Tokens current_supply() const
  {
    if (registry_)
    {
      return registry_->total_supply();
    }
    Tokens t = 0;
    for (auto const &[_, b] : balances_)
    {
      t += b;
    }
    return t;
  }

  mwsl::InteractionLedger const &interactions() const
  {
    return engine_ ? engine_->interactions() : *base_ledger_;
  }

  rollup::ReputationTree const &tree() const { return engine_ ? engine_->tree() : base_tree_; }

  std::optional<mwsl::ClientId> client_id(Address const &a) const
  {
    return engine_ ? engine_->clients().find(a) : base_dir_.find(a);
  }

  mwsl::MaspId masp_id(std::size_t j) const { return static_cast<mwsl::MaspId>(*tree().index_of(masp_addrs_[j])); }

  void on_block(ledger::Block const &block, double now)
  {
    std::vector<ledger::Transaction> opinions;
    for (auto const &tx : block.transactions)
    {
      if (tx.kind == ledger::TxKind::ReputationRollup && engine_)
      {
        summary_.reputation_bytes += ledger::accounting_size(tx);
      }
      else if (tx.kind == ledger::TxKind::OpinionUpdate)
      {
        summary_.reputation_bytes += ledger::accounting_size(tx);
        opinions.push_back(tx);
      }
      else if (tx.kind == ledger::TxKind::TransferChannel && !registry_)
      {
        auto const id = ledger::transaction_id(tx);
        if (auto it = submitted_.find(id); it != submitted_.end())
        {
          round_stats_.latencies.push_back(now - it->second);
          submitted_.erase(it);
        }
        if (auto amount = decode_direct_amount(tx.payload))
        {
          auto &from = balances_.at(tx.sender);
          if (from >= *amount)
          {
            from -= *amount;
            balances_.at(*tx.receiver) += *amount;
            ++round_stats_.committed;
          }
          else
          {
            ++round_stats_.rejected;
          }
        }
      }
    }
    if (!engine_ && !opinions.empty())
    {
      base_tree_ = rollup::apply_opinions(*base_ledger_, base_tree_, opinions, base_dir_, s_.rollup.reputation);
    }
  }

  double produce_blocks_until(double t)
  {
    while (anchor_.next_block_time() <= t)
    {
      anchor_.produce_block(anchor_.next_block_time());
    }
    return t;
  }

  std::vector<Assignment> select(std::uint64_t round, mwsl::ReputationView const &view)
  {
    std::vector<std::size_t> order(s_.clients());
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = order.size(); i > 1; --i)
    {
      std::swap(order[i - 1], order[select_rng_.below(i)]);
    }
    std::vector<std::size_t> load(s_.masps(), 0);
    std::vector<Assignment>  out;
    std::vector<double>      rep(s_.masps());
    for (auto i : order)
    {
      auto const  type = s_.client_types[s_.type_of(i)];
      auto const  cid  = client_id(clients_[i].address()).value_or(kUnknownClient);
      std::vector<mwsl::Candidate> cands;
      cands.reserve(s_.masps());
      for (std::size_t j = 0; j < s_.masps(); ++j)
      {
        // the first round is a random pick: no evidence exists yet
        rep[j] = round == 0 ? select_rng_.uniform() : view.client_reputation(cid, masp_id(j), type.sensitivity);
        cands.push_back({static_cast<mwsl::MaspId>(tie_rank_[j]), rep[j]});
      }
      auto respond = [&](mwsl::MaspId ranked, mwsl::Handshake) {
        auto const j = rank_to_masp(ranked);
        if (s_.selection.policy == AcceptPolicy::Capacity)
        {
          return load[j] < s_.selection.capacity;
        }
        return select_rng_.bernoulli(s_.selection.accept_probability);
      };
      auto sel = mwsl::select_masp(std::move(cands), respond);
      if (!sel.selected)
      {
        ++summary_.unserved;
        continue;
      }
      auto const j = rank_to_masp(*sel.selected);
      ++load[j];
      double const r    = round == 0 ? s_.rollup.reputation.gamma : rep[j];
      double const os2a = os2a::fuse(objective_, r, s_.contract.assessment.alpha, assessor_->objective_bounds(),
                                     s_.contract.assessment.subjective_bounds);
      double const im   = contract::service_fee(outcome_.contract, os2a, assessor_->state().difficulty);
      out.push_back({i, j, r, os2a, std::max<Tokens>(to_tokens(im), 1)});
    }
    return out;
  }

  std::size_t rank_to_masp(mwsl::MaspId ranked)
  {
    if (masp_of_rank_.empty())
    {
      masp_of_rank_.resize(tie_rank_.size());
      for (std::size_t j = 0; j < tie_rank_.size(); ++j)
      {
        masp_of_rank_[tie_rank_[j]] = j;
      }
    }
    return masp_of_rank_.at(ranked);
  }

  void ensure_channel(Assignment &a, double now)
  {
    auto const &client = clients_[a.client];
    auto const &masp   = masps_[a.masp];
    auto       *ch     = registry_->live(client.address(), masp.address());
    if (ch != nullptr && ch->status() == channel::ChannelStatus::Open && ch->current().balance < a.fee)
    {
      registry_->close_channel(ch->id(), now);
      ch = nullptr;
    }
    if (ch == nullptr)
    {
      registry_->open_channel(client, masp, std::max(deposit_, a.fee), now);
      a.opened = true;
      open_requested_[{a.client, a.masp}] = now;
    }
  }

  Digest produce_content(std::uint64_t round, Assignment const &a)
  {
    Writer w;
    w.u64(round);
    w.u64(a.client);
    w.u64(a.masp);
    w.u64(outcome_rng_.next_u64());
    return store_.put(std::move(w).take());
  }

  void serve(std::uint64_t round, Assignment const &a, double now)
  {
    auto const &client  = clients_[a.client];
    auto const  content = produce_content(round, a);
    if (registry_)
    {
      auto *ch = registry_->live(client.address(), masps_[a.masp].address());
      if (ch == nullptr || ch->status() != channel::ChannelStatus::Open)
      {
        ++round_stats_.rejected;
        return;
      }
      auto res = ch->transfer_round(a.fee, content, store_, now);
      switch (res.outcome)
      {
      case channel::RoundOutcome::Committed: ++round_stats_.committed; break;
      case channel::RoundOutcome::RolledBack: ++round_stats_.rolled_back; return;
      case channel::RoundOutcome::Stalled: ++round_stats_.stalled; return;
      case channel::RoundOutcome::Rejected: ++round_stats_.rejected; return;
      }
      double wait = 0.0;
      if (auto it = open_requested_.find({a.client, a.masp}); it != open_requested_.end())
      {
        wait = now - it->second;
        open_requested_.erase(it);
      }
      round_stats_.latencies.push_back(wait + res.latency());
    }
    else
    {
      auto tx = ledger::make_signed(scheme_, client, ledger::TxKind::TransferChannel, masps_[a.masp].address(),
                                    encode_direct(a.fee, content), 0);
      submitted_[ledger::transaction_id(tx)] = now;
      anchor_.submit(std::move(tx), now);
    }
    ++summary_.transfers;

    auto const  type     = s_.client_types[s_.type_of(a.client)];
    double const p_good  = s_.levels[s_.level_of(a.masp)].satisfy_at(round) * (1.0 - type.strictness);
    bool const  satisfied = outcome_rng_.bernoulli(p_good);
    auto       &counts    = local_counts_[{a.client, a.masp}];
    (satisfied ? counts.first : counts.second) += 1;
    post_opinion(client, a.masp, satisfied, a.fee, round, mwsl::local_opinion(counts.first, counts.second), now);
    ++summary_.opinions;
    ++round_opinions_;

    double const u_sp = contract::masp_utility(from_tokens(a.fee), outcome_.response.action, assessor_->state());
    double const u_c  = contract::client_utility(from_tokens(a.fee), a.os2a, assessor_->state().roi,
                                                 s_.contract.assessment.expected_os2a);
    round_stats_.os2a_sum += a.os2a;
    round_stats_.fee_sum += from_tokens(a.fee);
    round_stats_.u_sp_sum += u_sp;
    round_stats_.u_c_sum += u_c;
    ++round_stats_.served;
  }

  void post_opinion(ledger::Identity const &from, std::size_t masp, bool satisfied, Tokens value,
                    std::uint64_t round, mwsl::Opinion local, double now)
  {
    rollup::OpinionPayload p{satisfied, value, anchor_.ledger().height(), round, local};
    if (engine_)
    {
      engine_->collect_opinion(from, masp_addrs_[masp], p, now);
    }
    else
    {
      anchor_.submit(rollup::make_opinion_tx(scheme_, from, masp_addrs_[masp], p), now);
    }
  }

  void inject_attack(std::uint64_t round, double now)
  {
    for (auto const &f : attack_events(s_, round, attack_rng_))
    {
      auto &counts = forged_counts_[{f.sybil, f.masp}];
      (f.satisfied ? counts.first : counts.second) += 1;
      post_opinion(sybils_[f.sybil], f.masp, f.satisfied, to_tokens(f.value), round,
                   mwsl::local_opinion(counts.first, counts.second), now);
      ++summary_.forged;
      ++round_forged_;
    }
  }

  double step(std::uint64_t round, double start)
  {
    round_stats_    = {};
    round_opinions_ = 0;
    round_forged_   = 0;
    double const end = start + s_.chain.block_interval;

    mwsl::ReputationView view(interactions(), s_.rollup.reputation, anchor_.ledger().height());
    auto assignments = select(round, view);
    if (registry_)
    {
      for (auto &a : assignments)
      {
        ensure_channel(a, start);
      }
    }
    double const now = produce_blocks_until(end);
    for (auto const &a : assignments)
    {
      serve(round, a, now);
    }
    inject_attack(round, now);
    std::size_t rollups = 0;
    if (engine_)
    {
      for (auto const &res : engine_->poll(anchor_, now))
      {
        ++rollups;
        summary_.poisoned += res.accepted ? 0 : 1;
      }
      summary_.rollups += rollups;
    }
    record(round, view, rollups);
    return now;
  }

  void record(std::uint64_t round, mwsl::ReputationView const &view, std::size_t rollups)
  {
    auto const supply_ok = current_supply() == supply_;
    if (!supply_ok)
    {
      throw InvariantViolation("conservation: token supply changed in round " + std::to_string(round));
    }
    std::vector<double> committed(s_.levels.size(), 0.0), live(s_.levels.size(), 0.0);
    for (std::size_t j = 0; j < s_.masps(); ++j)
    {
      auto const   l = s_.level_of(j);
      double const c = *tree().value(masp_addrs_[j]);
      double const v = view.aggregate(masp_id(j));
      committed[l] += c;
      live[l] += v;
      metrics_.add("reputation", round,
                   {static_cast<std::int64_t>(j), s_.levels[l].name, c, v});
    }
    for (std::size_t l = 0; l < s_.levels.size(); ++l)
    {
      committed[l] /= static_cast<double>(s_.levels[l].masps);
      live[l] /= static_cast<double>(s_.levels[l].masps);
      metrics_.add("level_reputation", round, {s_.levels[l].name, committed[l], live[l]});
    }
    summary_.level_reputation.push_back(committed);

    std::size_t txs = 0;
    for (auto const &b : anchor_.ledger().blocks())
    {
      txs += b.transactions.size();
    }
    total_txs_ = txs;
    metrics_.add("ledger", round,
                 {static_cast<std::int64_t>(anchor_.ledger().height()),
                  static_cast<std::int64_t>(anchor_.ledger().total_bytes()),
                  static_cast<std::int64_t>(summary_.reputation_bytes), static_cast<std::int64_t>(txs)});

    auto const &lat  = round_stats_.latencies;
    double const sum = std::accumulate(lat.begin(), lat.end(), 0.0);
    double const mx  = lat.empty() ? 0.0 : *std::max_element(lat.begin(), lat.end());
    metrics_.add("latency", round,
                 {std::string(registry_ ? "channel" : "onchain"), static_cast<std::int64_t>(lat.size()),
                  lat.empty() ? 0.0 : sum / static_cast<double>(lat.size()), mx});
    latency_sum_ += sum;
    latency_count_ += lat.size();

    metrics_.add("throughput", round,
                 {static_cast<std::int64_t>(round_opinions_), static_cast<std::int64_t>(round_forged_),
                  static_cast<std::int64_t>(engine_ ? engine_->opinions_rolled() : 0),
                  static_cast<std::int64_t>(rollups)});

    auto const   n    = static_cast<double>(std::max<std::size_t>(round_stats_.served, 1));
    auto const  &act  = outcome_.response.action;
    metrics_.add("contract", round,
                 {outcome_.contract.bonus, outcome_.contract.kappa, act.compute, act.fee,
                  static_cast<std::int64_t>(round_stats_.served), round_stats_.os2a_sum / n,
                  round_stats_.fee_sum / n, round_stats_.u_sp_sum / n, round_stats_.u_c_sum / n});
    metrics_.add("atomicity", round,
                 {static_cast<std::int64_t>(round_stats_.committed), static_cast<std::int64_t>(round_stats_.rolled_back),
                  static_cast<std::int64_t>(round_stats_.stalled), static_cast<std::int64_t>(round_stats_.rejected),
                  static_cast<std::int64_t>(supply_ok)});
    summary_.committed += round_stats_.committed;
    summary_.rolled_back += round_stats_.rolled_back + round_stats_.stalled;
    summary_.rejected += round_stats_.rejected;
  }

  void finish(double now)
  {
    if (engine_ && !engine_->pending().empty())
    {
      auto res = engine_->roll_up(anchor_, now);
      ++summary_.rollups;
      summary_.poisoned += res.accepted ? 0 : 1;
    }
    if (registry_)
    {
      for (std::size_t i = 0; i < clients_.size(); ++i)
      {
        for (std::size_t j = 0; j < masps_.size(); ++j)
        {
          auto *ch = registry_->live(clients_[i].address(), masps_[j].address());
          if (ch != nullptr && ch->status() == channel::ChannelStatus::Open)
          {
            registry_->close_channel(ch->id(), now);
          }
        }
      }
    }
    // drain the pool so every submitted record is anchored
    round_stats_ = RoundStats{};
    while (!anchor_.pool().empty())
    {
      now = anchor_.next_block_time();
      anchor_.produce_block(now);
    }
    summary_.committed += round_stats_.committed;
    summary_.rejected += round_stats_.rejected;
    for (double l : round_stats_.latencies)
    {
      latency_sum_ += l;
      ++latency_count_;
    }
    if (current_supply() != supply_)
    {
      throw InvariantViolation("conservation: token supply changed during settlement");
    }
    if (registry_ && registry_->escrowed() != 0)
    {
      throw InvariantViolation("conservation: escrow not empty after every channel settled");
    }
    summary_.blocks           = anchor_.ledger().height();
    summary_.ledger_bytes     = anchor_.ledger().total_bytes();
    summary_.supply           = supply_;
    summary_.final_root       = tree().root();
    summary_.mean_transfer_latency =
      latency_count_ == 0 ? 0.0 : latency_sum_ / static_cast<double>(latency_count_);
    for (std::size_t j = 0; j < s_.masps(); ++j)
    {
      summary_.final_reputation.push_back(*tree().value(masp_addrs_[j]));
    }
  }

  Scenario                              s_;
  Rng                                   rng_;
  Rng                                   select_rng_;
  Rng                                   outcome_rng_;
  Rng                                   attack_rng_;
  ledger::KeyedHashScheme               scheme_;
  chain::AnchorChain                    anchor_;
  MetricsSink                           metrics_;
  RunSummary                            summary_;

  std::vector<ledger::Identity>         clients_;
  std::vector<ledger::Identity>         masps_;
  std::vector<Address>                  masp_addrs_;
  std::vector<ledger::Identity>         sybils_;
  std::vector<std::size_t>              tie_rank_;
  std::vector<std::size_t>              masp_of_rank_;

  std::unique_ptr<rollup::RollupEngine>       engine_;
  std::unique_ptr<mwsl::InteractionLedger>    base_ledger_;
  rollup::ReputationTree                      base_tree_;
  rollup::ClientDirectory                     base_dir_;
  std::unique_ptr<channel::ChannelRegistry>   registry_;
  std::map<Address, Tokens>                   balances_;
  std::unordered_map<Digest, double, ledger::DigestHash> submitted_;
  channel::ContentStore                       store_;

  std::unique_ptr<contract::Assessor> assessor_;
  contract::Outcome                   outcome_;
  double                              objective_{0.0};
  Tokens                              deposit_{0};
  Tokens                              supply_{0};

  std::map<std::pair<std::size_t, std::size_t>, std::pair<std::uint64_t, std::uint64_t>> local_counts_;
  std::map<std::pair<std::size_t, std::size_t>, std::pair<std::uint64_t, std::uint64_t>> forged_counts_;
  std::map<std::pair<std::size_t, std::size_t>, double>                                   open_requested_;

  RoundStats  round_stats_;
  std::size_t round_opinions_{0};
  std::size_t round_forged_{0};
  std::size_t total_txs_{0};
  double      latency_sum_{0.0};
  std::size_t latency_count_{0};
};

}  // namespace

RunResult run(Scenario const &scenario)
{
  return Simulator(scenario).execute();
}

RunResult baseline_run(Scenario const &scenario)
{
  auto s             = scenario;
  s.rollup_enabled   = false;
  s.channels_enabled = false;
  return Simulator(std::move(s)).execute();
}

}  // namespace anchorsim::sim
