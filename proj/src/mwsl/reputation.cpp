#include "anchorsim/mwsl/reputation.hpp"

#include "anchorsim/common/error.hpp"

#include <algorithm>
#include <cmath>

namespace anchorsim::mwsl {

Opinion reference_opinion(std::span<ReferenceInput const> refs, std::array<double, 3> const &mu,
                          double sensitivity)
{
  if (refs.empty())
  {
    throw InvalidArgument("reference opinion needs at least one reference client");
  }
  if (!(sensitivity >= 0.0 && sensitivity <= 1.0))
  {
    throw InvalidArgument("sensitivity must lie in [0, 1]");
  }
  double total = 0.0;
  double s = 0.0, u = 0.0, c = 0.0;
  for (auto const &r : refs)
  {
    double const a = mu[0] * r.familiarity;
    double const f = mu[1] * r.freshness;
    double const w = mu[2] * r.worth;
    double const k = std::sqrt(a * a + f * f + w * w);
    if (!std::isfinite(k))
    {
      throw InvalidArgument("reference weight is not finite");
    }
    total += k;
    s += k * r.opinion.s;
    u += k * r.opinion.u;
    c += k * r.opinion.c;
  }
  if (!(total > 0.0))
  {
    throw InvalidArgument("all reference weights are zero");
  }
  return Opinion{(1.0 - sensitivity) * s / total, sensitivity * u / total, c / total};
}

std::array<double, 3> ReputationParams::effective_mu() const
{
  return {ablation.familiarity ? mu[0] : 0.0, ablation.freshness ? mu[1] : 0.0,
          ablation.market_worth ? mu[2] : 0.0};
}

void ReputationParams::validate() const
{
  if (!(gamma >= 0.0 && gamma <= 1.0) || !(default_sensitivity >= 0.0 && default_sensitivity <= 1.0))
  {
    throw InvalidArgument("gamma and sensitivity must lie in [0, 1]");
  }
  if (std::any_of(mu.begin(), mu.end(), [](double m) { return !(m >= 0.0); }))
  {
    throw InvalidArgument("factor weights must be non-negative");
  }
  auto const eff = effective_mu();
  if (eff[0] + eff[1] + eff[2] <= 0.0)
  {
    throw InvalidArgument("at least one calibration factor must be enabled with positive weight");
  }
}

std::vector<ReferenceInput> reference_inputs(InteractionLedger const &ledger, MaspId masp,
                                             std::optional<ClientId> exclude, std::uint64_t latest_block)
{
  auto const                 &clients = ledger.clients_of(masp);
  double const                total   = static_cast<double>(ledger.total_interactions(masp));
  std::vector<ReferenceInput> out;
  out.reserve(clients.size());
  for (auto k : clients)
  {
    if (exclude && *exclude == k)
    {
      continue;
    }
    auto const *rec = ledger.find(k, masp);
    out.push_back(ReferenceInput{rec->opinion(), static_cast<double>(rec->interactions()) / total,
                                 ledger.decay().factor(rec->latest_block(), latest_block),
                                 ledger.worth(*rec, latest_block)});
  }
  if (out.empty())
  {
    return out;
  }
  auto [lo, hi] = std::minmax_element(out.begin(), out.end(),
                                      [](auto const &a, auto const &b) { return a.worth < b.worth; });
  double const wmin = lo->worth;
  double const wmax = hi->worth;
  for (auto &r : out)
  {
    r.worth = wmax > wmin ? (r.worth - wmin) / (wmax - wmin) : 0.0;
  }
  return out;
}

namespace {

// Aged-out references can underflow every weight to zero; they then carry no evidence.
bool has_weight(std::span<ReferenceInput const> refs, std::array<double, 3> const &mu)
{
  return std::any_of(refs.begin(), refs.end(), [&](ReferenceInput const &r) {
    return mu[0] * r.familiarity > 0.0 || mu[1] * r.freshness > 0.0 || mu[2] * r.worth > 0.0;
  });
}

}  // namespace

double client_reputation(InteractionLedger const &ledger, ReputationParams const &params, ClientId client,
                         MaspId masp, double sensitivity, std::uint64_t latest_block)
{
  auto       refs = reference_inputs(ledger, masp, client, latest_block);
  auto const *own  = ledger.find(client, masp);
  if (!has_weight(refs, params.effective_mu()))
  {
    refs.clear();
  }

  Opinion fused;  // no evidence at all: full uncertainty
  if (own != nullptr && !refs.empty())
  {
    fused = fuse_opinions(own->opinion(), reference_opinion(refs, params.effective_mu(), sensitivity));
  }
  else if (own != nullptr)
  {
    fused = own->opinion();
  }
  else if (!refs.empty())
  {
    fused = reference_opinion(refs, params.effective_mu(), sensitivity);
  }
  return reputation(fused, params.gamma);
}

double aggregate_reputation(InteractionLedger const &ledger, ReputationParams const &params, MaspId masp,
                            std::uint64_t latest_block)
{
  auto const refs = reference_inputs(ledger, masp, std::nullopt, latest_block);
  if (refs.empty() || !has_weight(refs, params.effective_mu()))
  {
    return reputation(Opinion{}, params.gamma);
  }
  return reputation(reference_opinion(refs, params.effective_mu(), params.default_sensitivity), params.gamma);
}

}  // namespace anchorsim::mwsl

namespace anchorsim::mwsl {

ReputationView::ReputationView(InteractionLedger const &ledger, ReputationParams params, std::uint64_t latest_block)
  : ledger_(ledger)
  , params_(std::move(params))
  , mu_(params_.effective_mu())
  , latest_(latest_block)
{
  params_.validate();
}

ReputationView::Summary const &ReputationView::summary(MaspId masp) const
{
  auto it = cache_.find(masp);
  if (it != cache_.end())
  {
    return it->second;
  }
  Summary sm;
  sm.clients = ledger_.clients_of(masp);
  for (auto k : sm.clients)
  {
    sm.raw_worth.push_back(ledger_.worth(*ledger_.find(k, masp), latest_));
  }
  sm.refs = reference_inputs(ledger_, masp, std::nullopt, latest_);
  if (!sm.refs.empty())
  {
    auto [lo, hi] = std::minmax_element(sm.raw_worth.begin(), sm.raw_worth.end());
    sm.wmin       = *lo;
    sm.wmax       = *hi;
    sm.at_min     = static_cast<std::size_t>(std::count(sm.raw_worth.begin(), sm.raw_worth.end(), sm.wmin));
    sm.at_max     = static_cast<std::size_t>(std::count(sm.raw_worth.begin(), sm.raw_worth.end(), sm.wmax));
  }
  for (auto const &r : sm.refs)
  {
    double const a = mu_[0] * r.familiarity;
    double const f = mu_[1] * r.freshness;
    double const w = mu_[2] * r.worth;
    double const k = std::sqrt(a * a + f * f + w * w);
    sm.weights.push_back(k);
    sm.positive += k > 0.0 ? 1 : 0;
    sm.total += k;
    sm.s += k * r.opinion.s;
    sm.u += k * r.opinion.u;
    sm.c += k * r.opinion.c;
  }
  return cache_.emplace(masp, std::move(sm)).first->second;
}

double ReputationView::aggregate(MaspId masp) const
{
  auto const &sm = summary(masp);
  if (sm.positive == 0)
  {
    return params_.gamma;
  }
  double const th = params_.default_sensitivity;
  return reputation(Opinion{(1.0 - th) * sm.s / sm.total, th * sm.u / sm.total, sm.c / sm.total}, params_.gamma);
}

double ReputationView::client_reputation(ClientId client, MaspId masp, double sensitivity) const
{
  if (!(sensitivity >= 0.0 && sensitivity <= 1.0))
  {
    throw InvalidArgument("sensitivity must lie in [0, 1]");
  }
  auto const &sm  = summary(masp);
  auto const  pos = std::lower_bound(sm.clients.begin(), sm.clients.end(), client);
  bool const  own = pos != sm.clients.end() && *pos == client;

  double s = sm.s, u = sm.u, c = sm.c, total = sm.total;
  std::size_t positive = sm.positive;
  if (own)
  {
    auto const i = static_cast<std::size_t>(pos - sm.clients.begin());
    double const w = sm.raw_worth[i];
    bool const moves_range = sm.wmax > sm.wmin && ((w == sm.wmin && sm.at_min == 1) || (w == sm.wmax && sm.at_max == 1));
    if (moves_range)
    {
      return mwsl::client_reputation(ledger_, params_, client, masp, sensitivity, latest_);
    }
    // removing a dominant term would leave the rest to cancellation error
    if (sm.weights[i] > 1e6 * (sm.total - sm.weights[i]))
    {
      return mwsl::client_reputation(ledger_, params_, client, masp, sensitivity, latest_);
    }
    s -= sm.weights[i] * sm.refs[i].opinion.s;
    u -= sm.weights[i] * sm.refs[i].opinion.u;
    c -= sm.weights[i] * sm.refs[i].opinion.c;
    total -= sm.weights[i];
    positive -= sm.weights[i] > 0.0 ? 1 : 0;
  }

  Opinion fused;
  bool const have_ref = positive > 0;
  Opinion    ref;
  if (have_ref)
  {
    ref = Opinion{(1.0 - sensitivity) * s / total, sensitivity * u / total, c / total};
  }
  if (own && have_ref)
  {
    fused = fuse_opinions(ledger_.find(client, masp)->opinion(), ref);
  }
  else if (own)
  {
    fused = ledger_.find(client, masp)->opinion();
  }
  else if (have_ref)
  {
    fused = ref;
  }
  return reputation(fused, params_.gamma);
}

}  // namespace anchorsim::mwsl
