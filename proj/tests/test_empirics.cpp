#include "frc/empirics.hpp"
#include "frc/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace frc;

namespace {

constexpr TimestampUs kSecond = 1000000;
constexpr TimestampUs kDay = 86400 * kSecond;

Errc ingest_error(const std::string& text, std::string* message = nullptr) {
  std::istringstream in(text);
  try {
    ingest_csv(in);
  } catch (const Error& e) {
    if (message) *message = e.what();
    return e.code();
  }
  FAIL("ingest accepted bad input");
  return Errc::InvalidArgument;
}

}  // namespace

TEST_CASE("timestamps") {
  CHECK(parse_timestamp("1970-01-02") == kDay);
  CHECK(parse_timestamp("2000-03-01T00:00:00Z") == 951868800LL * kSecond);
  CHECK(parse_timestamp("2000-03-01 00:00:01.25") == 951868801LL * kSecond + 250000);
  CHECK(parse_timestamp("2000-03-01T00:00:01+00:00") == 951868801LL * kSecond);
  CHECK(format_timestamp(parse_timestamp("2023-06-30T12:34:56.000001Z")).rfind("2023-06-30T12:34:56", 0) == 0);
  CHECK(parse_timestamp(format_timestamp(123456789)) == 123456789);
  CHECK_THROWS_AS(parse_timestamp("2000-02-30"), Error);
  CHECK_THROWS_AS(parse_timestamp("2000-01-01T00:00:00+01:00"), Error);
  CHECK_THROWS_AS(parse_timestamp("yesterday"), Error);
}

TEST_CASE("csv ingestion") {
  std::istringstream in(
      "timestamp,tenor_months,price\n"
      "2020-01-01,3,99.5\n"
      "2020-01-01,6,99.1\n"
      "2020-01-02,3,99.6\n");
  const PriceSeries s = ingest_csv(in);
  CHECK(s.record_count() == 3);
  CHECK(s.tenors() == std::vector<int>{1, 2});
  CHECK(s.observations(1)[1].price == 99.6);

  std::ostringstream out;
  write_price_csv(out, s);
  std::istringstream again(out.str());
  CHECK(ingest_csv(again).record_count() == 3);

  std::string msg;
  CHECK(ingest_error("time,tenor,price\n") == Errc::ParseError);
  CHECK(ingest_error("timestamp,tenor_months,price\n2020-01-01,4,99\n", &msg) == Errc::ParseError);
  CHECK(msg.find("line 2") != std::string::npos);
  CHECK(ingest_error("timestamp,tenor_months,price\n2020-01-01,3,abc\n") == Errc::ParseError);
  CHECK(ingest_error("timestamp,tenor_months,price\n2020-01-01,3,99\n2020-01-01,3,98\n") == Errc::DuplicateRecord);
  CHECK(ingest_error("timestamp,tenor_months,price\n2020-01-02,3,99\n2020-01-01,3,98\n") == Errc::NonMonotoneTime);
}

TEST_CASE("previous-tick increments") {
  PriceSeries s;
  s.add(1, 1 * kSecond, 10.0);
  s.add(1, 5 * kSecond, 11.0);
  s.add(1, 12 * kSecond, 13.0);
  s.add(1, 14 * kSecond, 12.0);
  s.add(2, 3 * kSecond, 20.0);
  s.add(2, 15 * kSecond, 21.0);
  const IncrementTable t = increments(s, 10.0);
  REQUIRE(t.values.rows() == 2);
  const auto c1 = t.column(1), c2 = t.column(2);
  CHECK(std::isnan(t.values(0, c1)));  // no quote before the first bin
  CHECK(t.values(1, c1) == 1.0);       // 12 - 11
  CHECK(std::isnan(t.values(0, c2)));
  CHECK(t.values(1, c2) == 1.0);
  CHECK(t.column(7) < 0);
}

TEST_CASE("pearson correlations") {
  Eigen::VectorXd x(5), y(5);
  x << 1, 2, 3, 4, 5;
  y << 2, 4, 6, 8, 11;
  const double mx = 3.0, my = 6.2;
  double sxy = 0, sxx = 0, syy = 0;
  for (int i = 0; i < 5; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  long count = 0;
  CHECK(pairwise_pearson(x, y, 3, &count) == doctest::Approx(sxy / std::sqrt(sxx * syy)));
  CHECK(count == 5);
  CHECK(std::isnan(pairwise_pearson(x, y, 6)));
  y[2] = std::nan("");
  pairwise_pearson(x, y, 3, &count);
  CHECK(count == 4);

  // independent white noise
  PriceSeries s;
  NormalStream g(9, 0);
  double p[3] = {100, 100, 100};
  for (int k = 0; k < 10001; ++k) {
    for (int t = 1; t <= 3; ++t) {
      p[t - 1] += g.next();
      s.add(t, k * kDay, p[t - 1]);
    }
  }
  const CorrelationSurface c = pearson_surface(increments(s, 86400.0), TenorGrid::contiguous(3));
  CHECK(c(0, 0) == 1.0);
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) CHECK(std::abs(c(i, j)) < 0.05);
  }
  const CorrelationSurface sparse = pearson_surface(increments(s, 86400.0), TenorGrid::contiguous(4));
  CHECK(std::isnan(sparse(0, 3)));

  const auto stats = descriptive_stats(s, TenorGrid::contiguous(4));
  CHECK(stats[0].volatility == doctest::Approx(std::sqrt(252.0)).epsilon(0.03));
  CHECK(stats[0].n_increments == 10000);
  CHECK_FALSE(stats[3].defined());
}

TEST_CASE("epps curve") {
  PriceSeries s;
  NormalStream g(4, 0);
  double common = 0.0, a = 0.0, b = 0.0;
  for (int k = 0; k < 50000; ++k) {
    common += g.next();
    a += g.next();
    b += g.next();
    s.add(1, k * kSecond, common + a);
    s.add(2, k * kSecond, common + b);
  }
  const std::vector<double> scales = {0.5, 1.0, 10.0, 100.0};
  const EppsCurve curve = epps_curve(s, {1, 2}, scales);
  CHECK(std::isnan(curve.correlations[0]));
  CHECK(curve.insufficient_scales() == std::vector<double>{0.5});
  CHECK(std::abs(curve.correlations[1] - 0.5) < 0.03);
  const CorrelationSurface direct = pearson_surface(increments(s, 100.0), TenorGrid::contiguous(2));
  CHECK(std::abs(curve.correlations[3] - direct(0, 1)) < 1e-12);

  PriceSeries noise;
  for (int k = 0; k < 20000; ++k) {
    noise.add(1, k * kSecond, g.next());
    noise.add(2, k * kSecond, g.next());
  }
  const EppsCurve flat = epps_curve(noise, {1, 2}, {1.0, 10.0, 100.0});
  for (double r : flat.correlations) CHECK(std::abs(r) < 0.15);
  CHECK_THROWS_AS(epps_curve(s, {1, 2}, {10.0, 1.0}), Error);

  std::ostringstream out;
  write_epps_csv(out, curve);
  CHECK(out.str().rfind("scale_seconds,correlation\n", 0) == 0);
}

TEST_CASE("anti-diagonal curvature recovers an exact parabola") {
  const int n = 39;
  const TenorGrid grid = TenorGrid::contiguous(n);
  Eigen::MatrixXd v(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double big = grid[i] + grid[j], x = grid[i] - grid[j];
      v(i, j) = 1.0 - x * x / (big * big * 5.0);
    }
  }
  const CurvatureResult r = antidiagonal_curvature(CorrelationSurface(grid, v));
  REQUIRE_FALSE(r.points.empty());
  CHECK(r.points.front().big_theta == 11);
  CHECK(r.points.back().big_theta == 69);
  for (const auto& p : r.points) {
    CHECK(p.curvature == doctest::Approx(1.0 / (p.big_theta * p.big_theta * 5.0)).epsilon(1e-8));
  }
  CHECK(r.skipped.front() == 2);
  CHECK(r.skipped.size() == 18);

  std::ostringstream out;
  write_curvature_csv(out, r);
  CHECK(out.str().rfind("big_theta,curvature\n", 0) == 0);
  CHECK_THROWS_AS(antidiagonal_curvature(CorrelationSurface(TenorGrid::contiguous(3), Eigen::Matrix3d::Identity())),
                  Error);
}
