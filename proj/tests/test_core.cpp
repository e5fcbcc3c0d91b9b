#include "frc/core.hpp"
#include "frc/psytime.hpp"
#include "frc/surface_io.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <sstream>

using namespace frc;

namespace {

template <class F>
Errc code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no frc::Error thrown");
  return Errc::InvalidArgument;
}

}  // namespace

TEST_CASE("tenor grid parsing") {
  const TenorGrid g = TenorGrid::parse_months("3,6,12");
  CHECK(g.tenors() == std::vector<int>{1, 2, 4});
  CHECK(g.months(2) == 12);
  CHECK(g.to_months_string() == "3,6,12");
  CHECK(g.index_of(2).value() == 1);
  CHECK_FALSE(g.index_of(3).has_value());
  CHECK(TenorGrid::contiguous(39).max_tenor() == 39);
  CHECK(code_of([] { TenorGrid::parse_months("3,5"); }) == Errc::InvalidGrid);
  CHECK(code_of([] { TenorGrid::parse_months("6,3"); }) == Errc::InvalidGrid);
  CHECK(code_of([] { TenorGrid::parse_months("3,3"); }) == Errc::InvalidGrid);
}

TEST_CASE("parameter validation") {
  CHECK_NOTHROW(validate_params(ModelParams::bbdl(0.92)));
  ModelParams p = ModelParams::bbdl(0.92);
  p.mu = 1.0;
  CHECK(code_of([&] { validate_params(p); }) == Errc::InactiveFieldSet);
  CHECK(code_of([] { validate_params(ModelParams::bbd3(2.0, -1.0, 1.0)); }) == Errc::NonPositiveParameter);
  CHECK(code_of([] { validate_params(ModelParams::bbdl(0.0)); }) == Errc::NonPositiveParameter);
  CHECK(std::isinf(ModelParams::bbd2(2.0, 1.0).nu_or_inf()));
  CHECK(ModelParams::bbd3(2.0, 1.0, 3.0).nu_or_inf() == 3.0);
}

TEST_CASE("active vector round trip") {
  for (const auto& p : {ModelParams::bb04(0.5, 1.0, 2.0), ModelParams::bbl3(6.0, 1.0, 2.0),
                        ModelParams::bbd2(2.0, 1.01), ModelParams::bbdl(0.92)}) {
    const Eigen::VectorXd x = active_vector(p);
    CHECK(static_cast<std::size_t>(x.size()) == active_parameter_names(p.variant).size());
    const ModelParams q = from_active_vector(p.variant, x);
    CHECK(active_vector(q) == x);
  }
  CHECK(parse_variant("BBD3") == Variant::BBD3);
  CHECK(code_of([] { parse_variant("bbx"); }) == Errc::InvalidArgument);
}

TEST_CASE("correlation surface checks") {
  const TenorGrid g = TenorGrid::contiguous(2);
  Eigen::Matrix2d ok;
  ok << 1.0, 0.5, 0.5, 1.0;
  CHECK_NOTHROW(CorrelationSurface(g, ok));
  Eigen::Matrix2d asym = ok;
  asym(0, 1) = 0.4;
  CHECK(code_of([&] { CorrelationSurface(g, asym); }) == Errc::InvalidSurface);
  Eigen::Matrix2d big = ok;
  big(0, 1) = big(1, 0) = 1.5;
  CHECK(code_of([&] { CorrelationSurface(g, big); }) == Errc::InvalidSurface);
  Eigen::Matrix2d missing = ok;
  missing(0, 1) = missing(1, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK(CorrelationSurface(g, missing).has_missing());
  CHECK(code_of([&] { CorrelationSurface(TenorGrid::contiguous(3), ok); }) == Errc::InvalidSurface);

  Eigen::Matrix2d cov;
  cov << 4.0, 1.0, 1.0, 1.0;
  CHECK(CorrelationSurface::from_covariance(g, cov)(0, 1) == doctest::Approx(0.5));
}

TEST_CASE("surface serialization round trip") {
  const TenorGrid g = TenorGrid::parse_months("3,9,12");
  Eigen::Matrix3d v;
  v << 1.0, 0.3, std::numeric_limits<double>::quiet_NaN(), 0.3, 1.0, 0.123456789012345678,
      std::numeric_limits<double>::quiet_NaN(), 0.123456789012345678, 1.0;
  const CorrelationSurface s(g, v);

  std::stringstream csv;
  write_surface_csv(csv, s);
  const CorrelationSurface back = read_surface_csv(csv);
  CHECK(back.grid() == g);
  CHECK(back(1, 2) == s(1, 2));
  CHECK(std::isnan(back(0, 2)));

  const CorrelationSurface j = surface_from_json(surface_to_json(s));
  CHECK(j(0, 1) == s(0, 1));
  CHECK(std::isnan(j(2, 0)));

  const auto dir = std::filesystem::temp_directory_path();
  save_surface(dir / "frc_roundtrip.json", s);
  CHECK(load_surface(dir / "frc_roundtrip.json")(1, 2) == s(1, 2));

  std::stringstream bad("3,6\n1,0.2\n");
  CHECK(code_of([&] { read_surface_csv(bad); }) == Errc::ParseError);
}

TEST_CASE("perceived time") {
  const double psi = 2.0;
  CHECK(perceived_time(PsyTimeSpec::identity(), 7.0) == 7.0);
  CHECK(perceived_time(PsyTimeSpec::log_hyperbolic(psi), 10.0) == doctest::Approx(2.0 * std::log(6.0)));
  CHECK(perceived_time(PsyTimeSpec::regularized(psi, 1e-8), 10.0) ==
        doctest::Approx(2.0 * std::log(6.0)).epsilon(1e-6));
  CHECK(perceived_time(PsyTimeSpec::power_law(0.5), 9.0) == doctest::Approx(3.0));
  const double z = perceived_time(PsyTimeSpec::log_hyperbolic(psi), 10.0);
  CHECK(std::abs(hyperbolic_discount(psi, 0.05, 10.0) - std::exp(-0.05 * z)) < 1e-12);
  CHECK(psi_months_to_tenor_units(6.0) == 2.0);
}
