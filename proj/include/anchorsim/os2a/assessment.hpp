#pragma once

#include <span>
#include <vector>

namespace anchorsim::os2a {

struct Bounds
{
  double lo{0.0};
  double hi{1.0};
};

/// Min-max normalisation onto [0, 1]. Inputs outside the bounds are clamped.
double normalize(double x, double lo, double hi);
inline double normalize(double x, Bounds b)
{
  return normalize(x, b.lo, b.hi);
}

/// alpha * Omega(objective) + (1 - alpha) * Omega(subjective).
double fuse(double objective, double subjective, double alpha, Bounds objective_bounds,
            Bounds subjective_bounds);

/// 1 when x > 0, else 0.
double heaviside(double x);

struct Kpi
{
  double weight{1.0};
  double threshold{0.0};
};

struct KpiSpec
{
  std::vector<Kpi> kpis;

  /// The default objective: one KPI, the reciprocal service latency.
  static KpiSpec reciprocal_latency();
};

/// sum_i w_i * S(KPI_i - t_i) * KPI_i
double objective_score(KpiSpec const &spec, std::span<double const> values);

}  // namespace anchorsim::os2a
