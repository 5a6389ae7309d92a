#include "anchorsim/sim/queue_oracle.hpp"

#include "anchorsim/chain/event_loop.hpp"
#include "anchorsim/chain/pool.hpp"
#include "anchorsim/common/error.hpp"
#include "anchorsim/common/rng.hpp"
#include "anchorsim/os2a/latency.hpp"

#include <cmath>
#include <functional>
#include <limits>

namespace anchorsim::sim {

void QueueOracleParams::validate() const
{
  if (!(block_rate > 0.0) || block_capacity == 0 || !(load > 0.0) || bands == 0)
  {
    throw InvalidArgument("queue oracle: rates, capacity and band count must be positive");
  }
  if (!(fee_max > fee_min) || !(dof > 0.0) || !(warmup >= 0.0) || !(horizon > 0.0))
  {
    throw InvalidArgument("queue oracle: invalid fee range or time window");
  }
}

QueueOracleResult run_queue_oracle(QueueOracleParams const &p)
{
  p.validate();
  os2a::FeeModel const fees(p.fee_min, p.fee_max, p.bands, p.dof);
  double const         arrival_rate = p.load * p.block_rate * static_cast<double>(p.block_capacity);
  double const         measure_end  = p.warmup + p.horizon;

  Rng                    rng(p.seed);
  chain::EventLoop       loop;
  chain::TransactionPool pool;

  QueueOracleResult out;
  out.simulated.assign(p.bands, 0.0);
  out.served.assign(p.bands, 0);

  std::size_t outstanding = 0;  // measured arrivals not yet packed
  double      area        = 0.0;
  double      last        = p.warmup;
  auto        integrate   = [&](double now) {
    double const t = std::min(now, measure_end);
    if (t > last)
    {
      area += static_cast<double>(pool.size()) * (t - last);
      last = t;
    }
  };

  std::function<void()> arrive = [&] {
    double const now = loop.now();
    integrate(now);
    ledger::Transaction tx;
    tx.kind = ledger::TxKind::TransferChannel;
    tx.fee  = to_tokens(rng.chi_square(p.dof));
    if (now >= p.warmup && now < measure_end)
    {
      ++out.arrivals;
      ++outstanding;
    }
    pool.push(std::move(tx), ledger::Digest{}, now);
    if (now < measure_end)
    {
      loop.schedule_in(rng.exponential(arrival_rate), arrive);
    }
  };

  double const          interval = 1.0 / p.block_rate;
  std::function<void()> block    = [&] {
    double const now = loop.now();
    integrate(now);
    for (auto const &e : pool.pop_front(p.block_capacity, now))
    {
      if (e.submitted_at >= p.warmup && e.submitted_at < measure_end)
      {
        auto const band = fees.band_of(from_tokens(e.tx.fee)) - 1;
        out.simulated[band] += now - e.submitted_at;
        ++out.served[band];
        --outstanding;
      }
    }
    if (now < measure_end || outstanding > 0)
    {
      loop.schedule_in(interval, block);
    }
  };

  loop.schedule_at(rng.exponential(arrival_rate), arrive);
  loop.schedule_at(interval, block);
  loop.run();

  for (std::size_t b = 0; b < p.bands; ++b)
  {
    out.simulated[b] = out.served[b] > 0 ? out.simulated[b] / static_cast<double>(out.served[b]) : 0.0;
  }
  out.mean_queue_length = area / p.horizon;
  out.analytic          = os2a::queue_latencies(fees, p.block_rate, out.mean_queue_length);
  for (std::size_t b = 0; b < p.bands; ++b)
  {
    double const sim = out.simulated[b];
    out.relative_error.push_back(sim > 0.0 ? std::abs(out.analytic[b] - sim) / sim
                                           : std::numeric_limits<double>::infinity());
  }
  return out;
}

}  // namespace anchorsim::sim
