#include <catch_amalgamated.hpp>

#include <boost/math/special_functions/erf.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "labelscape/maurer.hpp"

namespace {
double lerfc(double x) { return labelscape::erfc(x); }
}  // namespace

TEST_CASE("erfc basic values") {
  CHECK(lerfc(0.0) == 1.0);
  CHECK(lerfc(-0.5) == Catch::Approx(2.0 - lerfc(0.5)).epsilon(1e-15));
  // erfc(1) = 0.157299207050285130658779364917...
  CHECK(std::fabs(lerfc(1.0) - 0.15729920705028513) / 0.15729920705028513 < 1e-14);
}

TEST_CASE("erfc matches 50-digit reference over |x| <= 6") {
  using big = boost::multiprecision::cpp_bin_float_50;
  double worst = 0.0;
  for (int i = -600; i <= 600; ++i) {
    const double x = i / 100.0 + 0.003;
    const double ref = static_cast<double>(boost::math::erfc(big(x)));
    worst = std::max(worst, std::fabs(lerfc(x) - ref) / ref);
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("erfc tails underflow cleanly") {
  CHECK(lerfc(30.0) == 0.0);
  CHECK(lerfc(-30.0) == 2.0);
  CHECK(lerfc(1e300) == 0.0);
  double prev = 2.0;
  for (double x = -8; x < 30; x += 0.25) {
    REQUIRE(lerfc(x) <= prev);
    prev = lerfc(x);
  }
}
