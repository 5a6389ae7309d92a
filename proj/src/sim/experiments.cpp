#include "anchorsim/sim/experiments.hpp"

#include "anchorsim/chain/anchor_chain.hpp"
#include "anchorsim/channel/channel_registry.hpp"
#include "anchorsim/common/error.hpp"
#include "anchorsim/os2a/fee_model.hpp"
#include "anchorsim/rollup/rollup_engine.hpp"
#include "anchorsim/sim/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>
#include <sstream>

namespace anchorsim::sim {

namespace {

using Series = std::vector<std::vector<double>>;

std::string fixed(double v, int digits = 4)
{
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(digits);
  out << v;
  return out.str();
}

std::vector<ledger::Identity> identities(ledger::SignatureScheme &scheme, std::uint64_t seed, std::string const &prefix,
                                         std::size_t n)
{
  std::vector<ledger::Identity> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
  {
    out.push_back(scheme.generate(seed, prefix + "/" + std::to_string(i)));
  }
  return out;
}

std::vector<Address> addresses(std::vector<ledger::Identity> const &ids)
{
  std::vector<Address> out;
  out.reserve(ids.size());
  for (auto const &id : ids)
  {
    out.push_back(id.address());
  }
  return out;
}

Series average_levels(Scenario base, std::vector<std::uint64_t> const &seeds)
{
  Series avg;
  for (auto seed : seeds)
  {
    base.seed = seed;
    auto const res = run(base);
    auto const &lv = res.summary.level_reputation;
    if (avg.empty())
    {
      avg.assign(lv.size(), std::vector<double>(base.levels.size(), 0.0));
    }
    for (std::size_t r = 0; r < lv.size(); ++r)
    {
      for (std::size_t l = 0; l < lv[r].size(); ++l)
      {
        avg[r][l] += lv[r][l] / static_cast<double>(seeds.size());
      }
    }
  }
  return avg;
}

void add_series(MetricsSink &sink, std::string const &table, std::string const &variant, Series const &series,
                Scenario const &s)
{
  for (std::size_t r = 0; r < series.size(); ++r)
  {
    for (std::size_t l = 0; l < series[r].size(); ++l)
    {
      sink.add(table, r, {variant, s.levels[l].name, series[r][l]});
    }
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// storage

StorageReport storage_experiment(std::uint64_t seed, std::size_t opinions)
{
  constexpr std::size_t kClients  = 200;
  constexpr std::size_t kMasps    = 100;
  constexpr std::size_t kPerBlock = 500;

  ledger::KeyedHashScheme scheme;
  auto const              clients = identities(scheme, seed, "client", kClients);
  auto const              masps   = addresses(identities(scheme, seed, "masp", kMasps));

  chain::ChainParams cp;
  chain::AnchorChain base_chain(cp, scheme, seed);
  chain::AnchorChain roll_chain(cp, scheme, seed);

  rollup::RollupParams rp;
  rp.max_count        = kPerBlock;
  rp.max_time         = 1.0e12;
  rp.decay.block_rate = cp.block_rate();
  rollup::RollupEngine engine(rp, scheme, masps, seed);

  mwsl::InteractionLedger  base_ledger(rp.decay);
  auto                     base_tree = rollup::ReputationTree::genesis(masps, rp.reputation.gamma);
  rollup::ClientDirectory  base_dir;

  StorageReport rep;
  rep.metrics = MetricsSink("storage", seed);
  rep.metrics.declare("storage", {"height", "baseline_bytes", "rollup_bytes", "opinions"});

  base_chain.on_block([&](ledger::Block const &b, double) {
    std::vector<ledger::Transaction> batch;
    for (auto const &tx : b.transactions)
    {
      if (tx.kind == ledger::TxKind::OpinionUpdate)
      {
        rep.baseline_bytes += ledger::accounting_size(tx);
        batch.push_back(tx);
      }
    }
    if (!batch.empty())
    {
      base_tree = rollup::apply_opinions(base_ledger, base_tree, batch, base_dir, rp.reputation);
    }
  });
  roll_chain.on_block([&](ledger::Block const &b, double) {
    for (auto const &tx : b.transactions)
    {
      if (tx.kind == ledger::TxKind::ReputationRollup)
      {
        rep.rollup_bytes += ledger::accounting_size(tx);
      }
    }
  });

  Rng                 rng(seed);
  std::vector<double> quality(kMasps);
  for (auto &q : quality)
  {
    q = rng.uniform(0.2, 0.95);
  }
  std::map<std::pair<std::size_t, std::size_t>, std::pair<std::uint64_t, std::uint64_t>> counts;

  double      now  = 0.0;
  std::size_t done = 0;
  while (done < opinions)
  {
    double const      start = now;
    std::size_t const batch = std::min(kPerBlock, opinions - done);
    for (std::size_t k = 0; k < batch; ++k)
    {
      auto const c   = rng.below(kClients);
      auto const m   = rng.below(kMasps);
      bool const sat = rng.bernoulli(quality[m]);
      auto      &pc  = counts[{c, m}];
      (sat ? pc.first : pc.second) += 1;
      rollup::OpinionPayload p{sat, to_tokens(rng.uniform(0.5, 2.0)), base_chain.ledger().height(), done / kPerBlock,
                               mwsl::local_opinion(pc.first, pc.second)};
      double const t = start + cp.block_interval * static_cast<double>(k + 1) / static_cast<double>(batch + 1);
      // the same signed transaction goes to the coordinators and, in the baseline, on-chain
      base_chain.submit(engine.collect_opinion(clients[c], masps[m], p, t), t);
    }
    done += batch;
    engine.roll_up(roll_chain, start + cp.block_interval * 0.999);
    ++rep.rollups;
    now = base_chain.next_block_time();
    base_chain.produce_block(now);
    roll_chain.produce_block(now);
    rep.metrics.add("storage", done / kPerBlock,
                    {static_cast<std::int64_t>(base_chain.ledger().height()),
                     static_cast<std::int64_t>(rep.baseline_bytes), static_cast<std::int64_t>(rep.rollup_bytes),
                     static_cast<std::int64_t>(done)});
  }

  rep.opinions      = done;
  rep.ratio         = static_cast<double>(rep.rollup_bytes) / static_cast<double>(rep.baseline_bytes);
  rep.baseline_root = base_tree.root();
  rep.rollup_root   = engine.last_committed_root();

  double const target = static_cast<double>(ledger::kHashRecordBytes) / static_cast<double>(ledger::kTxRecordBytes);
  bool const   roots  = rep.baseline_root == rep.rollup_root;
  rep.check.pass      = std::abs(rep.ratio - target) <= 0.01 && roots;
  rep.check.detail    = std::to_string(rep.opinions) + " opinions, ratio " + fixed(rep.ratio) + " vs 32/99 = " +
                     fixed(target) + " (" + fixed(100.0 * (1.0 - rep.ratio), 2) + "% saved), roots " +
                     (roots ? "equal" : "differ");
  return rep;
}

// ---------------------------------------------------------------------------
// scaling

ScalingReport scaling_experiment(std::uint64_t seed, std::vector<std::size_t> groups, RcoServiceModel model)
{
  ScalingReport rep;
  rep.metrics = MetricsSink("scaling", seed);
  rep.metrics.declare("scaling", {"groups", "anchored", "throughput", "speedup"});

  for (auto R : groups)
  {
    if (R == 0 || R > model.masps)
    {
      throw InvalidArgument("coordinator group count must lie in [1, MASPs]");
    }
    ledger::KeyedHashScheme scheme;
    auto const              clients = identities(scheme, seed, "client", model.clients);
    auto const              masps   = addresses(identities(scheme, seed, "masp", model.masps));

    chain::ChainParams cp;
    chain::AnchorChain anchor(cp, scheme, seed);
    rollup::RollupParams rp;
    rp.max_time         = 1.0e12;
    rp.decay.block_rate = cp.block_rate();

    std::vector<std::unique_ptr<rollup::RollupEngine>> engines;
    for (std::size_t g = 0; g < R; ++g)
    {
      std::vector<Address> owned;
      for (std::size_t j = g; j < masps.size(); j += R)
      {
        owned.push_back(masps[j]);
      }
      engines.push_back(std::make_unique<rollup::RollupEngine>(rp, scheme, owned, mix64(seed + g),
                                                               "rco" + std::to_string(g)));
    }

    // arrivals: (time, client, masp), partitioned by owning group
    Rng                                                                   rng(seed);
    std::vector<std::deque<std::tuple<double, std::size_t, std::size_t>>> inbox(R);
    for (double t = rng.exponential(model.offered_rate); t < model.duration; t += rng.exponential(model.offered_rate))
    {
      auto const m = rng.below(model.masps);
      inbox[m % R].emplace_back(t, rng.below(model.clients), m);
    }

    std::map<Digest, std::size_t> in_flight;  // roll-up tx -> opinions
    std::size_t                   anchored = 0;
    anchor.on_block([&](ledger::Block const &b, double now) {
      if (now > model.duration)
      {
        return;
      }
      for (auto const &tx : b.transactions)
      {
        if (auto it = in_flight.find(ledger::transaction_id(tx)); it != in_flight.end())
        {
          anchored += it->second;
          in_flight.erase(it);
        }
      }
    });

    std::map<std::pair<std::size_t, std::size_t>, std::pair<std::uint64_t, std::uint64_t>> counts;
    Rng                 outcome = rng.fork(1);
    std::vector<double> free_at(R, 0.0);
    double              clock = 0.0;
    while (clock < model.duration)
    {
      // next coordinator event
      std::size_t g    = 0;
      double      next = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < R; ++k)
      {
        if (inbox[k].empty())
        {
          continue;
        }
        double const ready = std::max(free_at[k], std::get<0>(inbox[k].front()));
        if (ready < next)
        {
          next = ready;
          g    = k;
        }
      }
      if (next >= model.duration)
      {
        break;
      }
      while (anchor.next_block_time() <= next)
      {
        anchor.produce_block(anchor.next_block_time());
      }
      clock = next;
      std::vector<std::tuple<double, std::size_t, std::size_t>> batch;
      while (!inbox[g].empty() && std::get<0>(inbox[g].front()) <= clock && batch.size() < rp.max_count)
      {
        batch.push_back(inbox[g].front());
        inbox[g].pop_front();
      }
      double const finish = clock + model.opinion_cost * static_cast<double>(batch.size());
      while (anchor.next_block_time() <= finish)
      {
        anchor.produce_block(anchor.next_block_time());
      }
      for (auto const &[t, c, m] : batch)
      {
        bool const sat = outcome.bernoulli(0.7);
        auto      &pc  = counts[{c, m}];
        (sat ? pc.first : pc.second) += 1;
        rollup::OpinionPayload p{sat, to_tokens(1.0), anchor.ledger().height(), 0,
                                 mwsl::local_opinion(pc.first, pc.second)};
        engines[g]->collect_opinion(clients[c], masps[m], p, finish);
      }
      auto const res = engines[g]->roll_up(anchor, finish);
      in_flight[res.tx_id] = res.record.hashes.size();
      free_at[g]           = finish;
    }
    while (anchor.next_block_time() <= model.duration)
    {
      anchor.produce_block(anchor.next_block_time());
    }

    double const tput = static_cast<double>(anchored) / model.duration;
    rep.groups.push_back(R);
    rep.throughput.push_back(tput);
  }

  double const base = rep.throughput.empty() ? 0.0 : rep.throughput.front() / static_cast<double>(rep.groups.front());
  bool         ok   = base > 0.0;
  std::string  detail;
  for (std::size_t i = 0; i < rep.groups.size(); ++i)
  {
    double const s = base > 0.0 ? rep.throughput[i] / (base * static_cast<double>(rep.groups[i])) : 0.0;
    rep.speedup.push_back(s);
    ok = ok && std::abs(s - 1.0) <= 0.2;
    rep.metrics.add("scaling", i,
                    {static_cast<std::int64_t>(rep.groups[i]),
                     static_cast<std::int64_t>(std::llround(rep.throughput[i] * model.duration)), rep.throughput[i], s});
    detail += (i ? ", " : "") + std::string("R=") + std::to_string(rep.groups[i]) + " " + fixed(rep.throughput[i], 1) +
              " op/s (" + fixed(s, 3) + "x linear)";
  }
  rep.check = {ok, detail};
  return rep;
}

// ---------------------------------------------------------------------------
// latency

namespace {

std::vector<double> channel_latencies(chain::AnchorChain &anchor, ledger::SignatureScheme &scheme, std::uint64_t seed,
                                      std::size_t channels, std::size_t windows, Rng jitter,
                                      std::function<void(double)> const &advance)
{
  channel::ChannelRegistry registry(anchor, channel::ChannelConfig{}, mix64(seed ^ 0x1a7e));
  channel::ContentStore    store;
  auto const               clients = identities(scheme, seed, "payer", channels);
  auto const               masps   = identities(scheme, seed, "payee", channels);
  std::vector<Digest>      ids;
  for (std::size_t i = 0; i < channels; ++i)
  {
    registry.credit(clients[i].address(), to_tokens(1000.0));
    ids.push_back(registry.open_channel(clients[i], masps[i], to_tokens(500.0), 0.0).id());
  }
  double const interval = anchor.params().block_interval;
  advance(interval);
  for (auto const &id : ids)
  {
    if (registry.find(id)->status() != channel::ChannelStatus::Open)
    {
      throw InvariantViolation("latency: channel did not open before the load started");
    }
  }

  std::vector<double> out;
  for (std::size_t w = 0; w < windows; ++w)
  {
    double const start = interval * static_cast<double>(w + 1);
    for (std::size_t i = 0; i < channels; ++i)
    {
      channel::RoundFaults faults;
      for (auto &f : faults)
      {
        f.delay = jitter.exponential(10.0);  // network jitter, mean 0.1 s per step
      }
      Writer body;
      body.u64(w);
      body.u64(i);
      auto const content = store.put(std::move(body).take());
      auto const res     = registry.find(ids[i])->transfer_round(to_tokens(1.0), content, store, start, faults);
      if (res.outcome != channel::RoundOutcome::Committed)
      {
        throw InvariantViolation("latency: a channel round failed without injected faults");
      }
      out.push_back(res.latency());
    }
    advance(start + interval);
  }
  return out;
}

double mean(std::vector<double> const &v)
{
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

LatencyReport latency_experiment(std::uint64_t seed, LatencyParams params)
{
  LatencyReport rep;
  rep.metrics = MetricsSink("latency", seed);
  rep.metrics.declare("latency", {"kind", "mean_latency"});

  chain::ChainParams cp;
  cp.block_capacity = params.block_capacity;
  ledger::KeyedHashScheme scheme;
  Rng                     rng(seed);

  // baseline: equal-fee direct transfers arriving at overload * capacity per block
  {
    chain::AnchorChain anchor(cp, scheme, seed);
    auto const         payers = identities(scheme, seed, "sender", 64);
    auto const         payee  = scheme.generate(seed, "receiver");
    std::vector<double> sums(params.windows, 0.0);
    std::vector<std::size_t> counts(params.windows, 0);
    std::map<Digest, double> submitted;
    anchor.on_block([&](ledger::Block const &b, double now) {
      auto const w = static_cast<std::size_t>(std::llround(now / cp.block_interval)) - 1;
      for (auto const &tx : b.transactions)
      {
        auto it = submitted.find(ledger::transaction_id(tx));
        if (it != submitted.end() && w < params.windows)
        {
          sums[w] += now - it->second;
          ++counts[w];
          submitted.erase(it);
        }
      }
    });
    auto const per_block =
      static_cast<std::size_t>(std::llround(params.overload * static_cast<double>(params.block_capacity)));
    std::uint64_t nonce = 0;
    for (std::size_t w = 0; w < params.windows; ++w)
    {
      double const start = cp.block_interval * static_cast<double>(w);
      for (std::size_t k = 0; k < per_block; ++k)
      {
        double const t = start + cp.block_interval * (static_cast<double>(k) + rng.uniform()) /
                                   static_cast<double>(per_block);
        Writer body;
        body.u64(nonce++);
        auto tx = ledger::make_signed(scheme, payers[nonce % payers.size()], ledger::TxKind::TransferChannel,
                                      payee.address(), std::move(body).take(), to_tokens(0.01));
        submitted[ledger::transaction_id(tx)] = t;
        anchor.submit(std::move(tx), t);
      }
      anchor.produce_block(anchor.next_block_time());
    }
    std::size_t run = 0;
    for (std::size_t w = 0; w < params.windows; ++w)
    {
      rep.baseline.push_back(counts[w] ? sums[w] / static_cast<double>(counts[w]) : 0.0);
      rep.metrics.add("latency", w, {std::string("onchain"), rep.baseline.back()});
      run             = w > 0 && rep.baseline[w] > rep.baseline[w - 1] ? run + 1 : 0;
      rep.longest_rise = std::max(rep.longest_rise, run);
    }
  }

  // channels over an idle chain and over the same overloaded chain
  {
    chain::AnchorChain idle(cp, scheme, seed);
    auto               advance_idle = [&](double t) {
      while (idle.next_block_time() <= t)
      {
        idle.produce_block(idle.next_block_time());
      }
    };
    auto const idle_lat =
      channel_latencies(idle, scheme, seed, params.channels, params.windows, rng.fork(1), advance_idle);

    chain::AnchorChain busy(cp, scheme, seed);
    auto const         payers    = identities(scheme, seed, "sender", 64);
    auto const         payee     = scheme.generate(seed, "receiver");
    auto const         per_block =
      static_cast<std::size_t>(std::llround(params.overload * static_cast<double>(params.block_capacity)));
    Rng           load_rng = rng.fork(2);
    std::uint64_t nonce    = 0;
    double        loaded_to = cp.block_interval;  // channels anchor in the first block
    auto          advance_busy = [&](double t) {
      // inject the overload up to t, then produce the blocks due
      for (; loaded_to < t; loaded_to += cp.block_interval)
      {
        for (std::size_t k = 0; k < per_block; ++k)
        {
          Writer body;
          body.u64(nonce++);
          busy.submit(ledger::make_signed(scheme, payers[nonce % payers.size()], ledger::TxKind::TransferChannel,
                                          payee.address(), std::move(body).take(), to_tokens(0.01)),
                      loaded_to + cp.block_interval * (static_cast<double>(k) + load_rng.uniform()) /
                                    static_cast<double>(per_block));
        }
      }
      while (busy.next_block_time() <= t)
      {
        busy.produce_block(busy.next_block_time());
      }
    };
    auto const busy_lat =
      channel_latencies(busy, scheme, seed, params.channels, params.windows, rng.fork(3), advance_busy);
    if (busy.pool().size() < params.block_capacity)
    {
      throw InvariantViolation("latency: the loaded chain never built a backlog");
    }
    rep.channel_idle   = mean(idle_lat);
    rep.channel_loaded = mean(busy_lat);
    rep.metrics.add("latency", 0, {std::string("channel_idle"), rep.channel_idle});
    rep.metrics.add("latency", 0, {std::string("channel_loaded"), rep.channel_loaded});
  }

  double const drift = rep.channel_idle > 0.0 ? rep.channel_loaded / rep.channel_idle - 1.0 : 1.0;
  rep.check.pass     = rep.longest_rise >= 20 && std::abs(drift) <= 0.10;
  rep.check.detail   = "on-chain latency rose for " + std::to_string(rep.longest_rise) + " consecutive windows (" +
                     fixed(rep.baseline.front(), 1) + " s -> " + fixed(rep.baseline.back(), 1) +
                     " s); channel latency " + fixed(rep.channel_idle, 3) + " s idle vs " +
                     fixed(rep.channel_loaded, 3) + " s loaded (" + fixed(100.0 * drift, 2) + "%)";
  return rep;
}

// ---------------------------------------------------------------------------
// atomicity

AtomicityReport atomicity_experiment(std::uint64_t seed, AtomicityParams params)
{
  AtomicityReport rep;
  rep.metrics = MetricsSink("atomicity", seed);
  rep.metrics.declare("atomicity",
                      {"delay_probability", "committed", "rolled_back", "stalled", "rejected", "violations"});
  if (params.channels == 0)
  {
    throw InvalidArgument("atomicity: at least one channel is required");
  }

  for (std::size_t pi = 0; pi < params.delay_probabilities.size(); ++pi)
  {
    double const            p = params.delay_probabilities[pi];
    ledger::KeyedHashScheme scheme;
    chain::ChainParams      cp;
    chain::AnchorChain      anchor(cp, scheme, seed);
    channel::ChannelConfig  config = params.channel;
    channel::ChannelRegistry registry(anchor, config, mix64(seed + pi));
    channel::ContentStore    store;
    Rng                      rng = Rng(seed).fork(pi + 1);

    auto const clients = identities(scheme, seed, "client", params.channels);
    auto const masps   = identities(scheme, seed, "masp", params.channels);
    auto const per_ch  = (params.rounds + params.channels - 1) / params.channels;
    Tokens const deposit = to_tokens(2.0 * static_cast<double>(per_ch));
    std::vector<Digest> ids;
    for (std::size_t i = 0; i < params.channels; ++i)
    {
      registry.credit(clients[i].address(), deposit);
      ids.push_back(registry.open_channel(clients[i], masps[i], deposit, 0.0).id());
    }
    Tokens const supply = registry.total_supply();
    double       now    = anchor.next_block_time();
    anchor.produce_block(now);

    AtomicityRow row;
    row.delay_probability = p;
    std::vector<Tokens> paid(params.channels, 0);
    for (std::size_t r = 0; r < params.rounds; ++r)
    {
      auto const i  = r % params.channels;
      auto      &ch = *registry.find(ids[i]);

      channel::RoundFaults faults;
      for (auto &f : faults)
      {
        if (rng.bernoulli(p))
        {
          f.delay = rng.exponential(1.0 / params.mean_delay);
        }
      }
      if (rng.bernoulli(params.halt_probability))
      {
        faults[rng.below(channel::kSteps)].halt = true;
      }
      if (rng.bernoulli(params.wrong_preimage_probability))
      {
        faults[rng.bernoulli(0.5) ? 3 : 4].wrong_preimage = true;
      }
      Writer body;
      body.u64(r);
      auto const   content = store.put(std::move(body).take());
      Tokens const fee     = to_tokens(rng.uniform(0.1, 1.0));

      auto const before = ch.current();
      auto const length = ch.log().size();
      auto const res    = ch.transfer_round(fee, content, store, now, faults);
      auto const after  = ch.current();

      bool atomic = false;
      switch (res.outcome)
      {
      case channel::RoundOutcome::Committed:
        ++row.committed;
        paid[i] += fee;
        atomic = ch.log().size() == length + 1 && after.balance == before.balance - fee && after.owns(content) &&
                 after.ownership.size() == before.ownership.size() + 1;
        break;
      case channel::RoundOutcome::RolledBack:
        ++row.rolled_back;
        atomic = ch.log().size() == length && after == before;
        break;
      case channel::RoundOutcome::Stalled:
        ++row.stalled;
        atomic = ch.log().size() == length && after == before;
        ch.release_stalled();
        break;
      case channel::RoundOutcome::Rejected:
        ++row.rejected;
        atomic = ch.log().size() == length && after == before;
        break;
      }
      if (!atomic)
      {
        ++row.violations;
      }
      now = std::max(now, res.finished) + 0.1;
    }

    // settle everything and check conservation and the anchored outcome
    for (std::size_t i = 0; i < params.channels; ++i)
    {
      auto &ch = *registry.find(ids[i]);
      if (!channel::verify_state_log(ch.log(), ch.id(), ch.deposit(), ch.client(), ch.masp(), scheme))
      {
        ++row.violations;
      }
      registry.close_channel(ids[i], now);
    }
    now = anchor.next_block_time();
    anchor.produce_block(now);
    for (std::size_t i = 0; i < params.channels; ++i)
    {
      auto const &settle = registry.settlements().at(i);
      if (!settle.anchored || !settle.accepted || settle.fees != paid[i] ||
          registry.balance(masps[i].address()) != paid[i])
      {
        ++row.violations;
      }
    }
    bool const conserved = registry.total_supply() == supply && registry.escrowed() == 0;
    rep.supply_conserved = rep.supply_conserved && conserved;

    rep.metrics.add("atomicity", pi,
                    {p, static_cast<std::int64_t>(row.committed), static_cast<std::int64_t>(row.rolled_back),
                     static_cast<std::int64_t>(row.stalled), static_cast<std::int64_t>(row.rejected),
                     static_cast<std::int64_t>(row.violations)});
    rep.rows.push_back(row);
  }

  bool        ok = rep.supply_conserved;
  std::string detail;
  for (auto const &row : rep.rows)
  {
    ok = ok && row.violations == 0 && (!params.channel.timers || row.stalled == 0);
    auto const total = row.committed + row.rolled_back + row.stalled + row.rejected;
    detail += (detail.empty() ? "" : "; ") + std::string("p=") + fixed(row.delay_probability, 2) + ": " +
              std::to_string(row.committed) + " committed, " + std::to_string(row.rolled_back) + " rolled back, " +
              std::to_string(row.violations) + " partial of " + std::to_string(total);
  }
  detail += rep.supply_conserved ? "; supply conserved" : "; supply changed";
  rep.check = {ok, detail};
  return rep;
}

// ---------------------------------------------------------------------------
// reputation semantics

ReputationReport explicit_experiment(std::vector<std::uint64_t> const &seeds)
{
  if (seeds.empty())
  {
    throw InvalidArgument("explicit experiment needs at least one seed");
  }
  auto const       base = explicit_scenario(seeds.front());
  ReputationReport rep;
  rep.metrics = MetricsSink(base.id, seeds.front());
  rep.metrics.declare("level_mean", {"variant", "level", "reputation"});
  rep.mean = average_levels(base, seeds);
  add_series(rep.metrics, "level_mean", "mean", rep.mean, base);

  constexpr std::size_t kOrderedFrom = 50;
  constexpr std::size_t kSmoothing   = 30;
  for (std::size_t r = kOrderedFrom; r < rep.mean.size(); ++r)
  {
    for (std::size_t l = 1; l < base.levels.size(); ++l)
    {
      if (!(rep.mean[r][l - 1] > rep.mean[r][l]))
      {
        ++rep.order_violations;
        break;
      }
    }
  }
  auto smoothed = [&](std::size_t r, std::size_t l) {
    double a = 0.0;
    for (std::size_t k = r + 1 - kSmoothing; k <= r; ++k)
    {
      a += rep.mean[k][l];
    }
    return a / static_cast<double>(kSmoothing);
  };
  std::string detail = std::to_string(rep.order_violations) + " ordering violations from round 50";
  bool        ok     = rep.order_violations == 0;
  for (std::size_t l = 0; l < base.levels.size(); ++l)
  {
    auto const &lv = base.levels[l];
    if (!lv.drop_round)
    {
      continue;
    }
    // first window lying entirely after the drop, then every later step
    std::size_t const from = *lv.drop_round + kSmoothing;
    if (from >= rep.mean.size())
    {
      ok = false;
      detail += "; " + lv.name + " has no full smoothing window after its drop";
      continue;
    }
    std::size_t bad = 0;
    for (std::size_t r = from; r < rep.mean.size(); ++r)
    {
      bad += smoothed(r, l) < smoothed(r - 1, l) ? 0 : 1;
    }
    rep.non_decreasing.push_back(bad);
    ok = ok && bad == 0;
    detail += "; " + lv.name + " smoothed " + fixed(smoothed(from - 1, l)) + " -> " +
              fixed(smoothed(rep.mean.size() - 1, l)) + " with " + std::to_string(bad) + " non-falling steps";
  }
  rep.check = {ok, detail};
  return rep;
}

// ---------------------------------------------------------------------------
// attacks

void set_defense(Scenario &s, bool on)
{
  auto &ab = s.rollup.reputation.ablation;
  switch (s.attack.kind)
  {
  case AttackKind::None: break;
  case AttackKind::Flooding: ab.familiarity = on; break;
  case AttackKind::LongRange: ab.freshness = on; break;
  case AttackKind::Dusting: ab.market_worth = on; break;
  }
}

AttackReport attack_experiment(Scenario const &base, std::vector<std::uint64_t> const &seeds)
{
  if (base.attack.kind == AttackKind::None)
  {
    throw InvalidArgument("attack experiment needs an attack scenario");
  }
  if (seeds.empty())
  {
    throw InvalidArgument("attack experiment needs at least one seed");
  }
  AttackReport rep;
  rep.kind    = base.attack.kind;
  rep.metrics = MetricsSink(base.id, seeds.front());
  rep.metrics.declare("level_mean", {"variant", "level", "reputation"});

  auto variant = [&](bool defended, bool attacked) {
    Scenario s = base;
    set_defense(s, defended);
    if (!attacked)
    {
      s.attack.kind      = AttackKind::None;
      s.attack.attackers = 0;
    }
    return average_levels(s, seeds);
  };
  rep.undefended = variant(false, true);
  rep.defended   = variant(true, true);
  add_series(rep.metrics, "level_mean", "undefended", rep.undefended, base);
  add_series(rep.metrics, "level_mean", "defended", rep.defended, base);

  auto const  target = base.attack.target_level;
  auto const &a      = base.attack;
  switch (base.attack.kind)
  {
  case AttackKind::Flooding:
  {
    if (target == 0)
    {
      throw InvalidArgument("flooding check needs a higher level above the target");
    }
    constexpr std::size_t kWindow = 10;
    std::vector<double>   diff;  // target minus next-higher level, per window
    for (std::size_t w = 0; (w + 1) * kWindow <= rep.undefended.size(); ++w)
    {
      double d = 0.0;
      for (std::size_t r = w * kWindow; r < (w + 1) * kWindow; ++r)
      {
        d += rep.undefended[r][target] - rep.undefended[r][target - 1];
      }
      diff.push_back(d / kWindow);
    }
    auto const above = std::find_if(diff.begin(), diff.end(), [](double d) { return d > 0.0; });
    auto const below = above == diff.end() ? diff.end() : std::find_if(above, diff.end(), [](double d) { return d < 0.0; });
    rep.check.pass   = above != diff.end() && below != diff.end();
    rep.check.detail = above == diff.end()
                         ? "target never exceeded the next-higher level"
                         : "target above the next-higher level in window " +
                             std::to_string(above - diff.begin()) + " (by " + fixed(*above) + ")" +
                             (below == diff.end() ? ", never fell back below"
                                                  : ", below it from window " + std::to_string(below - diff.begin()));
    break;
  }
  case AttackKind::LongRange:
  {
    std::size_t const probe = std::min<std::size_t>(150, rep.undefended.size() - 1);
    std::size_t const peak_to = std::min<std::size_t>(a.end + 5, rep.undefended.size() - 1);
    double            peak    = 0.0;
    for (std::size_t r = 0; r <= peak_to; ++r)
    {
      peak = std::max(peak, rep.undefended[r][target]);
    }
    double const at = rep.undefended[probe][target];
    rep.check.pass  = probe == 150 && at >= 0.9 * peak;
    rep.check.detail = "round-" + std::to_string(probe) + " reputation " + fixed(at) + " vs peak " + fixed(peak) +
                       " up to round " + std::to_string(peak_to) + " (" + fixed(100.0 * at / peak, 1) +
                       "%); defended " + fixed(rep.defended[probe][target]);
    break;
  }
  case AttackKind::Dusting:
  {
    rep.quiet_undefended = variant(false, false);
    rep.quiet_defended   = variant(true, false);
    add_series(rep.metrics, "level_mean", "quiet_undefended", rep.quiet_undefended, base);
    add_series(rep.metrics, "level_mean", "quiet_defended", rep.quiet_defended, base);
    std::size_t n = 0;
    for (std::size_t r = a.start; r <= a.end && r < rep.undefended.size(); ++r, ++n)
    {
      rep.gain_undefended += rep.undefended[r][target] - rep.quiet_undefended[r][target];
      rep.gain_defended += rep.defended[r][target] - rep.quiet_defended[r][target];
    }
    if (n > 0)
    {
      rep.gain_undefended /= static_cast<double>(n);
      rep.gain_defended /= static_cast<double>(n);
    }
    double const ratio = rep.gain_defended > 0.0 ? rep.gain_undefended / rep.gain_defended
                                                 : std::numeric_limits<double>::infinity();
    rep.check.pass   = rep.gain_undefended > 0.0 && ratio >= 3.0;
    rep.check.detail = "mean gain " + fixed(rep.gain_undefended) + " undefended vs " + fixed(rep.gain_defended) +
                       " defended (ratio " + fixed(ratio, 2) + ", need 3)";
    break;
  }
  case AttackKind::None: break;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// contracts

namespace {

contract::MarketState random_state(Rng &rng)
{
  contract::MarketState e;
  e.output_bytes      = rng.uniform(1.0e5, 5.0e6);
  e.bandwidth         = rng.uniform(5.0e5, 5.0e6);
  e.difficulty        = rng.uniform(10.0, 100.0);
  e.block_capacity    = 500 + rng.below(3000);
  e.participants      = 4 + rng.below(29);
  e.neighbors         = rng.uniform(2.0, 8.0);
  e.honest_broadcast  = rng.uniform(0.6, 1.0);
  e.mean_queue_length = rng.uniform(20.0, 200.0);
  e.block_rate        = rng.uniform(0.1, 1.0);
  e.roi               = rng.uniform(0.05, 0.5);
  e.unit_cost         = rng.uniform(0.01, 0.5);
  e.rounds            = 1 + rng.below(20);
  return e;
}

// Flat enumeration of every (contract, action) pair with precomputed OS2A.
contract::Outcome flat_oracle(contract::ContractGrid const &cg, contract::Assessor const &as, double threshold)
{
  auto const          contracts = cg.contracts();
  auto const          actions   = as.grid().actions();
  auto const         &e         = as.state();
  auto const         &ap        = as.params();
  std::vector<double> os2a(actions.size());
  for (std::size_t k = 0; k < actions.size(); ++k)
  {
    os2a[k] = as.os2a(actions[k]);
  }

  contract::Outcome best;
  std::size_t       cur = contracts.size();
  std::size_t       arg = 0;
  double            top = -std::numeric_limits<double>::infinity();
  auto              close = [&](std::size_t ci) {
    auto const  &c   = contracts[ci];
    double const fee = contract::service_fee(c, os2a[arg], e.difficulty);
    double const usp = top;
    double const uc  = contract::client_utility(fee, os2a[arg], e.roi, ap.expected_os2a);
    ++best.evaluated;
    if (!(usp >= threshold))
    {
      ++best.rejected_ir;
      return;
    }
    if (!best.feasible || uc > best.response.client_utility)
    {
      best.feasible = true;
      best.contract = c;
      best.response = {actions[arg], os2a[arg], fee, usp, uc};
    }
  };
  std::size_t const total = contracts.size() * actions.size();
  for (std::size_t flat = 0; flat < total; ++flat)
  {
    std::size_t const ci = flat / actions.size();
    std::size_t const ai = flat % actions.size();
    if (ci != cur)
    {
      if (cur != contracts.size())
      {
        close(cur);
      }
      cur = ci;
      top = -std::numeric_limits<double>::infinity();
    }
    double const fee = contract::service_fee(contracts[ci], os2a[ai], e.difficulty);
    double const usp = contract::masp_utility(fee, actions[ai], e);
    if (usp > top)
    {
      top = usp;
      arg = ai;
    }
  }
  if (cur != contracts.size())
  {
    close(cur);
  }
  return best;
}

}  // namespace

ContractReport contract_experiment(std::uint64_t seed, ContractParams params)
{
  ContractReport rep;
  rep.metrics = MetricsSink("contract", seed);
  rep.metrics.declare("contract", {"bonus", "kappa", "compute", "action_fee", "os2a", "service_fee", "client_utility",
                                   "masp_utility", "oracle_match", "max_deviation_gain"});
  Rng rng(seed);
  contract::ActionGrid   ag{{1.0, 20.0, params.grid}, {0.1, 2.0, params.grid}};
  contract::ContractGrid cg{{0.0, 10.0, params.grid}, {0.0, 0.2, params.grid}};
  double const           threshold = 0.0;

  for (std::size_t i = 0; i < params.states; ++i)
  {
    contract::Assessor as(random_state(rng), ag);
    auto const         opt    = contract::optimize_contract(cg, as, threshold);
    auto const         oracle = flat_oracle(cg, as, threshold);
    bool const match = opt.feasible == oracle.feasible &&
                       (!opt.feasible || (opt.contract == oracle.contract && opt.response.action == oracle.response.action &&
                                          opt.response.fee == oracle.response.fee &&
                                          opt.response.masp_utility == oracle.response.masp_utility &&
                                          opt.response.client_utility == oracle.response.client_utility));
    ++rep.states;
    rep.mismatches += match ? 0 : 1;
    if (!opt.feasible)
    {
      ++rep.infeasible;
      continue;
    }
    rep.ir_failures += opt.response.masp_utility >= threshold ? 0 : 1;
    auto const audit = contract::moral_hazard_audit(opt.contract, as);
    rep.profitable += audit.profitable;
    rep.metrics.add("contract", i,
                    {opt.contract.bonus, opt.contract.kappa, opt.response.action.compute, opt.response.action.fee,
                     opt.response.os2a, opt.response.fee, opt.response.client_utility, opt.response.masp_utility,
                     static_cast<std::int64_t>(match), audit.max_delta});
  }
  rep.check.pass   = rep.mismatches == 0 && rep.ir_failures == 0 && rep.profitable == 0;
  rep.check.detail = std::to_string(rep.states) + " states at " + std::to_string(params.grid) + "^4: " +
                     std::to_string(rep.mismatches) + " oracle mismatches, " + std::to_string(rep.ir_failures) +
                     " IR failures, " + std::to_string(rep.profitable) + " profitable deviations, " +
                     std::to_string(rep.infeasible) + " infeasible";
  return rep;
}

MetricsSink contract_sweep(Scenario const &s)
{
  s.validate();
  MetricsSink sink(s.id, s.seed);
  sink.declare("contract_sweep", {"state", "bonus", "fixed_fee", "compute", "action_fee", "client_utility",
                                  "masp_utility", "feasible", "optimal"});
  contract::Assessor as(s.contract.state, s.contract.actions, s.contract.assessment);
  auto const         opt = contract::optimize_contract(s.contract.contracts, as, s.contract.threshold);
  std::size_t        row = 0;
  for (auto const &c : s.contract.contracts.contracts())
  {
    auto const r = contract::best_response(c, as);
    bool const ok = r.masp_utility >= s.contract.threshold;
    sink.add("contract_sweep", row++,
             {s.id, c.bonus, c.fixed_fee(s.contract.state.difficulty), r.action.compute, r.action.fee,
              r.client_utility, r.masp_utility, static_cast<std::int64_t>(ok),
              static_cast<std::int64_t>(opt.feasible && opt.contract == c)});
  }
  return sink;
}

// ---------------------------------------------------------------------------
// queuing

QueueReport queue_experiment(std::uint64_t seed, QueueOracleParams params)
{
  params.seed = seed;
  QueueReport rep;
  rep.metrics = MetricsSink("queue", seed);
  rep.metrics.declare("queue", {"band", "served", "simulated", "analytic", "relative_error"});
  rep.oracle       = run_queue_oracle(params);
  rep.density_mass = os2a::chi2_mass(0.0, 1000.0, params.dof);

  double worst = 0.0;
  for (std::size_t b = 0; b < params.bands; ++b)
  {
    worst = std::max(worst, rep.oracle.relative_error[b]);
    rep.metrics.add("queue", b,
                    {static_cast<std::int64_t>(b + 1), static_cast<std::int64_t>(rep.oracle.served[b]),
                     rep.oracle.simulated[b], rep.oracle.analytic[b], rep.oracle.relative_error[b]});
  }
  bool const mass_ok = std::abs(rep.density_mass - 1.0) <= 1.0e-3;
  rep.check.pass     = worst <= 0.15 && mass_ok;
  std::string bands;
  for (std::size_t b = 0; b < params.bands; ++b)
  {
    bands += (b ? ", " : "") + fixed(rep.oracle.simulated[b], 1) + "/" + fixed(rep.oracle.analytic[b], 1);
  }
  rep.check.detail = "density mass " + fixed(rep.density_mass, 6) + "; per-band simulated/analytic seconds " + bands +
                     "; worst relative error " + fixed(worst, 2) + " at E(L) " + fixed(rep.oracle.mean_queue_length, 1);
  return rep;
}

}  // namespace anchorsim::sim
