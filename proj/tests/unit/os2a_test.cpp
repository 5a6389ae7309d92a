#include "anchorsim/common/error.hpp"
#include "anchorsim/common/rng.hpp"
#include "anchorsim/os2a/assessment.hpp"
#include "anchorsim/os2a/latency.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace anchorsim;
using namespace anchorsim::os2a;

namespace {

// Independent quadrature oracle: the substitution x = t^(1/k), k = dof/2,
// turns the density into the smooth integrand exp(-x/2) / (k 2^k Gamma(k)),
// integrated by composite Simpson on [0, upper^k].
double simpson_chi2_mass(double upper, double dof, int n = 20000)
{
  double const k = dof / 2.0;
  auto         f = [k](double t) {
    double x = std::pow(t, 1.0 / k);
    return std::exp(-x / 2.0) / (k * std::pow(2.0, k) * std::tgamma(k));
  };
  double const b = std::pow(upper, k);
  double const h = b / n;
  double       s = f(0.0) + f(b);
  for (int i = 1; i < n; ++i)
  {
    s += f(i * h) * (i % 2 ? 4.0 : 2.0);
  }
  return s * h / 3.0;
}

}  // namespace

TEST_CASE("normalisation")
{
  CHECK(normalize(0.0, 0.0, 10.0) == 0.0);
  CHECK(normalize(10.0, 0.0, 10.0) == 1.0);
  CHECK(normalize(5.0, 0.0, 10.0) == 0.5);
  CHECK(normalize(12.0, 0.0, 10.0) == 1.0);
  CHECK(normalize(-3.0, 0.0, 10.0) == 0.0);
  CHECK_THROWS_AS(normalize(1.0, 2.0, 2.0), InvalidArgument);

  // monotone non-decreasing across and beyond the range
  double prev = -1.0;
  for (double x = -5.0; x <= 15.0; x += 0.25)
  {
    double y = normalize(x, 0.0, 10.0);
    CHECK(y >= prev);
    prev = y;
  }
}

TEST_CASE("fusion")
{
  Bounds unit{0.0, 1.0};
  CHECK(fuse(0.8, 0.4, 1.0, unit, unit) == doctest::Approx(0.8));
  CHECK(fuse(0.8, 0.4, 0.0, unit, unit) == doctest::Approx(0.4));
  CHECK(fuse(0.8, 0.4, 0.5, unit, unit) == doctest::Approx(0.6));
  CHECK_THROWS_AS(fuse(0.8, 0.4, 1.5, unit, unit), InvalidArgument);

  Rng rng(8);
  for (int i = 0; i < 1000; ++i)
  {
    double a  = rng.uniform();
    double o  = rng.uniform(-1.0, 2.0);
    double s  = rng.uniform(-1.0, 2.0);
    double v  = fuse(o, s, a, unit, unit);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    CHECK(fuse(o + 0.1, s, a, unit, unit) >= v);
    CHECK(fuse(o, s + 0.1, a, unit, unit) >= v);
  }
}

TEST_CASE("T1 and T2")
{
  CHECK(latency_t1(10e6, 5e6) == 2.0);
  CHECK(latency_t2(50.0, 10.0) == 5.0);
  CHECK(latency_t2(50.0, 20.0) == 2.5);
  CHECK_THROWS_AS(latency_t1(1.0, 0.0), InvalidArgument);
  CHECK_THROWS_AS(latency_t2(1.0, -1.0), InvalidArgument);
}

TEST_CASE("chi-square density")
{
  CHECK(chi2_pdf(-1.0) == 0.0);
  CHECK(chi2_pdf(0.0) == 0.0);
  CHECK(chi2_pdf(1.0, 2.0, Chi2Form::AsPrinted) == doctest::Approx(std::exp(0.5) / 2.0));
  CHECK(chi2_pdf(1.0, 2.0) == doctest::Approx(std::exp(-0.5) / 2.0));
  for (double x = 0.01; x < 30.0; x += 0.37)
  {
    CHECK(chi2_pdf(x) >= 0.0);
  }

  SUBCASE("standard form integrates to one")
  {
    double boost_mass = chi2_mass(0.0, 200.0);
    double oracle     = simpson_chi2_mass(200.0, kFeeDof);
    CHECK(std::abs(boost_mass - 1.0) < 1e-3);
    CHECK(std::abs(oracle - 1.0) < 1e-3);
    CHECK(chi2_cdf(3.0) == doctest::Approx(simpson_chi2_mass(3.0, kFeeDof)).epsilon(1e-4));
    CHECK(chi2_mass(0.5, 3.0) == doctest::Approx(chi2_cdf(3.0) - chi2_cdf(0.5)).epsilon(1e-6));
  }
  SUBCASE("printed form does not normalise")
  {
    CHECK(chi2_mass(0.0, 20.0, 2.0, Chi2Form::AsPrinted) > 10.0);
  }
}

TEST_CASE("fee model bands")
{
  FeeModel m(0.0, 10.0, 5);
  REQUIRE(m.bands() == 5);
  CHECK(m.means().front() > m.fee_min());
  CHECK(m.means().back() < m.fee_max());
  for (std::size_t i = 1; i < m.bands(); ++i)
  {
    CHECK(m.means()[i] > m.means()[i - 1]);
  }
  double total = 0.0;
  for (double w : m.weights())
  {
    total += w;
  }
  CHECK(total == doctest::Approx(chi2_cdf(10.0)).epsilon(1e-6));
  CHECK(m.band_of(0.5) == 1);
  CHECK(m.band_of(9.9) == 5);
  CHECK(m.band_of(100.0) == 5);

  FeeModel at_mean(0.0, 10.0, 5, kFeeDof, BandWeight::DensityAtMean);
  CHECK(at_mean.weights()[0] == doctest::Approx(chi2_pdf(1.0)));
}

TEST_CASE("broadcast latency")
{
  CHECK(broadcast_latency(198000.0, 1, 4.0, 1e6, 1.0) == 0.0);
  CHECK(broadcast_latency(198000.0, 8, 4.0, 1e6, 1.0) == doctest::Approx(0.1029).epsilon(1e-3));
  CHECK(broadcast_latency(198000.0, 8, 4.0, 2e6, 1.0) ==
        doctest::Approx(broadcast_latency(198000.0, 8, 4.0, 1e6, 1.0) / 2.0));
  CHECK(broadcast_latency(198000.0, 8, 4.0, 1e6, 1.0, LogBase::Two) == doctest::Approx(3.0 * 198000.0 / 4e6));
  CHECK_THROWS_AS(broadcast_latency(198000.0, 8, 4.0, 1e6, 0.0), InvalidArgument);
}

TEST_CASE("queue latency recursion")
{
  SUBCASE("single band")
  {
    std::vector<double> p{0.3};
    CHECK(queue_latencies(p, 0.2, 50.0)[0] == doctest::Approx(50.0 / (0.3 * 0.2)));
  }
  SUBCASE("two bands by hand")
  {
    std::vector<double> p{0.4, 0.1};
    auto                t = queue_latencies(p, 0.2, 50.0);
    CHECK(t[1] == doctest::Approx(2500.0));
    CHECK(t[0] == doctest::Approx(625.0));
  }
  SUBCASE("weighted tails reproduce tau")
  {
    FeeModel m(0.0, 10.0, 5);
    auto     t = queue_latencies(m, 0.2, 80.0);
    auto     p = m.weights();
    CHECK(t[4] == doctest::Approx(80.0 / (0.2 * p[4])));
    for (std::size_t z = 0; z + 1 < 5; ++z)
    {
      double tail_p = 0.0, tail_tp = 0.0;
      for (std::size_t k = z; k < 5; ++k)
      {
        tail_p += p[k];
        tail_tp += p[k] * t[k];
      }
      CHECK(tail_tp == doctest::Approx(80.0 / (0.2 * tail_p)));
    }
  }
  SUBCASE("zero band weight is an error")
  {
    std::vector<double> p{0.4, 0.0};
    CHECK_THROWS_AS(queue_latencies(p, 0.2, 50.0), InvalidArgument);
  }
}

TEST_CASE("T3")
{
  FeeModel      m(0.0, 10.0, 5);
  ServiceParams p;
  double const  tb = broadcast_latency(p.block_capacity * p.tx_bytes, p.nodes, p.neighbors, p.bandwidth,
                                       p.honest_broadcast);
  CHECK(latency_t3(p, m, 3) == doctest::Approx(tb + queue_latency(3, m, p.block_rate, p.mean_queue_length)));
  p.channel_active = true;
  CHECK(latency_t3(p, m, 3) == 0.0);
  p.nodes = 1000;
  p.mean_queue_length = 1e9;
  CHECK(latency_t3(p, m, 1) == 0.0);
  CHECK(total_latency(p, m, 1) == doctest::Approx(latency_t1(p.output_bytes, p.bandwidth) +
                                                  latency_t2(p.difficulty, p.compute)));
}

TEST_CASE("objective score")
{
  KpiSpec two{{{0.5, 3.0}, {0.5, 3.0}}};
  std::vector<double> v{4.0, 2.0};
  CHECK(objective_score(two, v) == doctest::Approx(2.0));

  auto   one = KpiSpec::reciprocal_latency();
  std::vector<double> x{0.125};
  CHECK(objective_score(one, x) == doctest::Approx(0.125));

  KpiSpec gate{{{1.0, 5.0}}};
  std::vector<double> low{4.0};
  CHECK(objective_score(gate, low) == 0.0);

  std::vector<double> missing{1.0};
  CHECK_THROWS_AS(objective_score(two, missing), InvalidArgument);
}

TEST_CASE("fee corpus fitting")
{
  Rng                 rng(21);
  std::vector<double> fees;
  for (int i = 0; i < 20000; ++i)
  {
    fees.push_back(rng.chi_square(kFeeDof));
  }
  auto r = fit_report(fees);
  CHECK(r.samples == 20000);
  CHECK(r.mean == doctest::Approx(kFeeDof).epsilon(0.05));
  CHECK(r.ks_statistic < 0.015);
  CHECK(r.p_value > 0.01);

  std::vector<double> shifted;
  for (double f : fees)
  {
    shifted.push_back(f + 1.0);
  }
  CHECK(fit_report(shifted).p_value < 1e-6);

  std::istringstream ok("# fees\n0.5\n\n1.25\n");
  CHECK(read_fee_csv(ok) == std::vector<double>{0.5, 1.25});
  std::istringstream bad("0.5\nabc\n");
  try
  {
    read_fee_csv(bad);
    FAIL("expected a parse error");
  }
  catch (ParseError const &e)
  {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}
