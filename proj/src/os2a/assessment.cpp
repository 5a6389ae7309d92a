#include "anchorsim/os2a/assessment.hpp"

#include "anchorsim/common/error.hpp"

#include <algorithm>
#include <string>

namespace anchorsim::os2a {

double normalize(double x, double lo, double hi)
{
  if (!(lo < hi))
  {
    throw InvalidArgument("normalisation bounds must satisfy lo < hi");
  }
  double const clamped = std::clamp(x, lo, hi);
  return (clamped - lo) / (hi - lo);
}

double fuse(double objective, double subjective, double alpha, Bounds objective_bounds,
            Bounds subjective_bounds)
{
  if (!(alpha >= 0.0 && alpha <= 1.0))
  {
    throw InvalidArgument("alpha must lie in [0, 1]");
  }
  return alpha * normalize(objective, objective_bounds) +
         (1.0 - alpha) * normalize(subjective, subjective_bounds);
}

double heaviside(double x)
{
  return x > 0.0 ? 1.0 : 0.0;
}

KpiSpec KpiSpec::reciprocal_latency()
{
  return KpiSpec{{Kpi{1.0, 0.0}}};
}

double objective_score(KpiSpec const &spec, std::span<double const> values)
{
  if (values.size() != spec.kpis.size())
  {
    throw InvalidArgument("expected " + std::to_string(spec.kpis.size()) + " KPI values, got " +
                          std::to_string(values.size()));
  }
  double score = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i)
  {
    auto const &k = spec.kpis[i];
    if (k.weight < 0.0)
    {
      throw InvalidArgument("KPI weights must be non-negative");
    }
    score += k.weight * heaviside(values[i] - k.threshold) * values[i];
  }
  return score;
}

}  // namespace anchorsim::os2a
