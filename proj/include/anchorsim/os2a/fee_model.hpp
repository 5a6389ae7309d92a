#pragma once

#include <cstddef>
#include <istream>
#include <span>
#include <vector>

namespace anchorsim::os2a {

/// Degrees of freedom of the fitted transaction-fee distribution.
inline constexpr double kFeeDof = 0.59;

enum class Chi2Form
{
  Standard,   ///< exp(-x/2): a proper density
  AsPrinted,  ///< exp(+x/2): does not normalise, kept for comparison only
};

/// Chi-square density; zero for x <= 0.
double chi2_pdf(double x, double dof = kFeeDof, Chi2Form form = Chi2Form::Standard);
double chi2_cdf(double x, double dof = kFeeDof);
/// Integral of chi2_pdf over [a, b] by tanh-sinh quadrature.
double chi2_mass(double a, double b, double dof = kFeeDof, Chi2Form form = Chi2Form::Standard);

enum class BandWeight
{
  Integral,       ///< probability mass of the sub-range
  DensityAtMean,  ///< density evaluated at the band mean
};

/// Fee range [f_m, f_M] split into Z equal sub-ranges, each represented by its mean.
class FeeModel
{
public:
  FeeModel(double fee_min, double fee_max, std::size_t bands, double dof = kFeeDof,
           BandWeight weight = BandWeight::Integral, Chi2Form form = Chi2Form::Standard);

  std::size_t                bands() const { return means_.size(); }
  double                     fee_min() const { return fee_min_; }
  double                     fee_max() const { return fee_max_; }
  double                     dof() const { return dof_; }
  std::vector<double> const &means() const { return means_; }
  /// Per-band weight chi2(f_k; dof) under the configured BandWeight.
  std::vector<double> const &weights() const { return weights_; }

  /// 1-based band index containing `fee`; fees outside the range map to the end bands.
  std::size_t band_of(double fee) const;

private:
  double              fee_min_;
  double              fee_max_;
  double              dof_;
  std::vector<double> means_;
  std::vector<double> weights_;
};

/// Goodness of fit of a fee corpus against chi2(dof).
struct FitReport
{
  std::size_t samples{0};
  double      mean{0.0};
  double      ks_statistic{0.0};
  /// Asymptotic Kolmogorov p-value.
  double      p_value{0.0};
};

FitReport           fit_report(std::span<double const> fees, double dof = kFeeDof);
/// One fee per line; blank lines and lines starting with '#' are skipped.
std::vector<double> read_fee_csv(std::istream &in);

}  // namespace anchorsim::os2a
