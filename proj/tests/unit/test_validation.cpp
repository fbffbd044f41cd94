#include "edfm/errors.hpp"
#include "edfm/validation/validation.hpp"

#include <doctest.h>

#include <cmath>

using namespace edfm;
using namespace edfm::validation;

TEST_CASE("analytical references at the crack centre")
{
  // 4 (1 - nu^2) / E * S sin a (cos a - mu sin a) * l
  CHECK(analytical_slip(5.0, SlipReference{}) == doctest::Approx(0.0530608).epsilon(1e-5));
  // (1 - nu) / G * S * l
  CHECK(analytical_aperture(5.0, ApertureReference{}) == doctest::Approx(0.09375));
  CHECK(analytical_slip(0.0, SlipReference{}) == 0.0);
  CHECK(analytical_aperture(10.0, ApertureReference{}) == 0.0);
  // elliptical profile: sqrt(l^2 - (x - l)^2) / l at x = l/2
  CHECK(analytical_aperture(2.5, ApertureReference{}) / analytical_aperture(5.0, ApertureReference{}) ==
        doctest::Approx(std::sqrt(0.75)));
}

TEST_CASE("analytical references reject points off the crack")
{
  CHECK_THROWS_AS(analytical_slip(-0.1, SlipReference{}), DomainError);
  CHECK_THROWS_AS(analytical_aperture(10.5, ApertureReference{}), DomainError);
}

TEST_CASE("weighted L2 error")
{
  const auto ref = [](double x) { return 2.0 * x; };
  // constant offset 0.1 over the profile, normalised by max |ref| = 3 at the samples
  const std::vector<ProfileSample> offset{{0.5, 1.0, 1.1}, {1.5, 1.0, 3.1}};
  CHECK(l2_error(offset, ref) == doctest::Approx(0.1 / 3.0));
  // three points, the middle one wrong by 1 with weight 1/2
  const std::vector<ProfileSample> three{{0.5, 1.0, 1.0}, {1.0, 2.0, 3.0}, {2.0, 1.0, 4.0}};
  CHECK(l2_error(three, ref) == doctest::Approx(std::sqrt(0.5) / 4.0));
  CHECK_THROWS_AS(l2_error({}, ref), DomainError);
  CHECK_THROWS_AS(l2_error({{1.0, 0.0, 1.0}}, ref), DomainError);
  CHECK_THROWS_AS(l2_error({{1.0, 1.0, 1.0}}, [](double) { return 0.0; }), DomainError);
}

TEST_CASE("fitted convergence exponent recovers power laws")
{
  auto series = [](double rate) {
    std::vector<ConvergencePoint> p;
    for (double h : {4.0, 2.0, 1.0, 0.5}) {
      ConvergencePoint c;
      c.h = h;
      c.error = 0.3 * std::pow(h, rate);
      p.push_back(c);
    }
    return p;
  };
  CHECK(fit_convergence(series(1.0)) == doctest::Approx(1.0));
  CHECK(fit_convergence(series(2.0)) == doctest::Approx(2.0));
  auto two = series(1.0);
  two.resize(2);
  CHECK_THROWS_AS(fit_convergence(two), DomainError);
  auto zero = series(1.0);
  zero[1].error = 0.0;
  CHECK_THROWS_AS(fit_convergence(zero), DomainError);
}
