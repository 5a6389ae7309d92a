#include "anchorsim/os2a/fee_model.hpp"

#include "anchorsim/common/error.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

namespace anchorsim::os2a {

double chi2_pdf(double x, double dof, Chi2Form form)
{
  if (!(x > 0.0))
  {
    return 0.0;
  }
  double const k    = 0.5 * dof;
  double const norm = std::pow(2.0, k) * std::tgamma(k);
  double const sign = form == Chi2Form::Standard ? -1.0 : 1.0;
  return std::pow(x, k - 1.0) * std::exp(sign * 0.5 * x) / norm;
}

double chi2_cdf(double x, double dof)
{
  if (!(x > 0.0))
  {
    return 0.0;
  }
  return boost::math::gamma_p(0.5 * dof, 0.5 * x);
}

double chi2_mass(double a, double b, double dof, Chi2Form form)
{
  a = std::max(a, 0.0);
  if (!(b > a))
  {
    return 0.0;
  }
  boost::math::quadrature::tanh_sinh<double> integrator;
  return integrator.integrate([&](double x) { return chi2_pdf(x, dof, form); }, a, b);
}

FeeModel::FeeModel(double fee_min, double fee_max, std::size_t bands, double dof, BandWeight weight,
                   Chi2Form form)
  : fee_min_(fee_min)
  , fee_max_(fee_max)
  , dof_(dof)
{
  if (bands == 0)
  {
    throw InvalidArgument("fee model needs at least one band");
  }
  if (!(fee_min >= 0.0 && fee_min < fee_max))
  {
    throw InvalidArgument("fee bounds must satisfy 0 <= f_m < f_M");
  }
  if (!(dof > 0.0))
  {
    throw InvalidArgument("degrees of freedom must be positive");
  }
  double const width = (fee_max - fee_min) / static_cast<double>(bands);
  for (std::size_t z = 0; z < bands; ++z)
  {
    double const lo = fee_min + width * static_cast<double>(z);
    double const hi = lo + width;
    means_.push_back(0.5 * (lo + hi));
    weights_.push_back(weight == BandWeight::Integral ? chi2_mass(lo, hi, dof, form)
                                                      : chi2_pdf(means_.back(), dof, form));
  }
}

std::size_t FeeModel::band_of(double fee) const
{
  double const width = (fee_max_ - fee_min_) / static_cast<double>(bands());
  if (fee <= fee_min_)
  {
    return 1;
  }
  auto const z = static_cast<std::size_t>((fee - fee_min_) / width);
  return std::min(z, bands() - 1) + 1;
}

namespace {

double kolmogorov_q(double lambda)
{
  if (lambda < 1e-3)
  {
    return 1.0;
  }
  double sum  = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k)
  {
    double const term = sign * std::exp(-2.0 * k * k * lambda * lambda);
    sum += term;
    if (std::abs(term) < 1e-12)
    {
      break;
    }
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

}  // namespace

FitReport fit_report(std::span<double const> fees, double dof)
{
  FitReport report;
  report.samples = fees.size();
  if (fees.empty())
  {
    throw InvalidArgument("fee corpus is empty");
  }
  std::vector<double> sorted(fees.begin(), fees.end());
  std::sort(sorted.begin(), sorted.end());
  double const n = static_cast<double>(sorted.size());
  double       d = 0.0;
  double       s = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i)
  {
    double const f = chi2_cdf(sorted[i], dof);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    s += sorted[i];
  }
  report.mean         = s / n;
  report.ks_statistic = d;
  double const sq     = std::sqrt(n);
  report.p_value      = kolmogorov_q((sq + 0.12 + 0.11 / sq) * d);
  return report;
}

std::vector<double> read_fee_csv(std::istream &in)
{
  std::vector<double> fees;
  std::string         line;
  std::size_t         lineno = 0;
  while (std::getline(in, line))
  {
    ++lineno;
    auto const first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#')
    {
      continue;
    }
    auto const field = line.substr(first, line.find_first_of(",\r", first) - first);
    try
    {
      std::size_t used = 0;
      double      fee  = std::stod(field, &used);
      if (!(fee >= 0.0))
      {
        throw ParseError(lineno, "fee", "fees must be non-negative");
      }
      fees.push_back(fee);
    }
    catch (std::logic_error const &)
    {
      throw ParseError(lineno, "fee", "not a number: '" + field + "'");
    }
  }
  return fees;
}

}  // namespace anchorsim::os2a
