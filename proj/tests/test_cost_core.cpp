#include <doctest.h>

#include <cmath>
#include <vector>

#include "acecost/cost_core.hpp"
#include "test_support.hpp"

using namespace acecost;

namespace {

NumericFormat I(int bits) { return NumericFormat::fixed(bits); }

// Reference forms written out longhand, independent of the library.
double ref_multiply(int i, int j) { return double(i) * j - std::max(i, j); }
double ref_shift(int i, double range) { return i * std::ceil(std::log2(range)) / 5.0; }

}  // namespace

TEST_CASE("multiply cells of the cost table") {
  CHECK(ace_multiply(NumericFormat::fp32(), NumericFormat::fp32()).bitadders() == 992);
  CHECK(ace_multiply(NumericFormat::fp16(), NumericFormat::fp16()).bitadders() == 240);
  CHECK(ace_multiply(I(32), I(32)).bitadders() == 992);
  CHECK(ace_multiply(I(16), I(16)).bitadders() == 240);
  CHECK(ace_multiply(I(8), I(8)).bitadders() == 56);
  CHECK(ace_multiply(I(4), I(4)).bitadders() == 12);
  CHECK(ace_multiply(I(2), I(2)).bitadders() == 2);
}

TEST_CASE("add cells of the cost table") {
  CHECK(ace_add(NumericFormat::fp32(), NumericFormat::fp32()).bitadders() == 192);
  CHECK(ace_add(NumericFormat::fp16(), NumericFormat::fp16()).bitadders() == 96);
  CHECK(ace_add(I(32), I(32)).bitadders() == 32);
  CHECK(ace_add(I(16), I(16)).bitadders() == 16);
  CHECK(ace_add(I(8), I(8)).bitadders() == 8);
  CHECK(ace_add(I(4), I(4)).bitadders() == 4);
  CHECK(ace_add(I(2), I(2)).bitadders() == 2);
  CHECK(ace_add(NumericFormat::binary(), NumericFormat::binary()).bitadders() == 1);
}

TEST_CASE("shift cells are exact fifths") {
  CHECK(ace_shift(I(32), 32).to_decimal() == "32");
  CHECK(ace_shift(I(16), 16).to_decimal() == "12.8");
  CHECK(ace_shift(I(8), 8).to_decimal() == "4.8");
  CHECK(ace_shift(I(4), 4).to_decimal() == "1.6");
  CHECK(ace_shift(I(2), 2).to_decimal() == "0.4");
  CHECK(ace_shift(I(16), 16).fifths() == 64);
}

TEST_CASE("closed forms agree with longhand references over a grid") {
  for (int i = 1; i <= 32; ++i) {
    for (int j = 1; j <= 32; ++j) {
      CHECK(ace_multiply(I(i), I(j)).bitadders() == ref_multiply(i, j));
      CHECK(ace_mac(I(i), I(j)).bitadders() == double(i) * j);
      CHECK(ace_add(I(i), I(j)).bitadders() == std::max(i, j));
    }
    for (std::int64_t r : {2, 3, 5, 8, 9, 31, 32, 33, 1000}) {
      CHECK(testing::within_abs(ace_shift(I(i), r).bitadders(), ref_shift(i, double(r)), 1e-12));
    }
  }
}

TEST_CASE("shift stages") {
  CHECK(shift_stages(2) == 1);
  CHECK(shift_stages(3) == 2);
  CHECK(shift_stages(4) == 2);
  CHECK(shift_stages(5) == 3);
  CHECK(shift_stages(std::int64_t{1} << 40) == 40);
  CHECK(shift_stages((std::int64_t{1} << 40) + 1) == 41);
  CHECK_THROWS_AS(shift_stages(1), OutOfRange);
  CHECK_THROWS_AS(ace_shift(NumericFormat::fp32(), 8), InvalidFormat);
}

TEST_CASE("float add carries the overhead factor, mixed kinds are refused") {
  const auto bf16 = NumericFormat::floating(8, 7);
  CHECK(ace_add(bf16, bf16).bitadders() == 6 * 16);
  CHECK(ace_add(NumericFormat::fp32(), NumericFormat::fp16()).bitadders() == 192);
  CHECK_THROWS_AS(ace_add(NumericFormat::fp32(), I(8)), MixedKindError);
  CHECK_THROWS_AS(ace_add(I(8), NumericFormat::fp16()), MixedKindError);
  // Binary is an integer kind for addition purposes.
  CHECK(ace_add(NumericFormat::binary(), I(4)).bitadders() == 4);
}

TEST_CASE("binary multiply and MAC") {
  const auto b = NumericFormat::binary();
  CHECK(ace_mac(b, b).bitadders() == 1);
  CHECK(ace_multiply(b, b).bitadders() == 0);
  CHECK(ace_mac(I(4), b).bitadders() == 4);
}

TEST_CASE("format validation") {
  CHECK_NOTHROW(NumericFormat::fp32().validate());
  CHECK_THROWS_AS(I(0).validate(), InvalidFormat);
  CHECK_THROWS_AS(I(65).validate(), InvalidFormat);
  NumericFormat broken = NumericFormat::fp32();
  broken.total_bits = 31;
  CHECK_THROWS_AS(broken.validate(), InvalidFormat);
  CHECK_THROWS_AS(ace_multiply(I(0), I(8)), InvalidFormat);
  CHECK(NumericFormat::fp16().to_string() == "FP16(e5m10)");
  CHECK(I(8).to_string() == "INT8");
  CHECK(NumericFormat::binary().to_string() == "BIN1");
}

TEST_CASE("AceCost arithmetic stays exact") {
  AceCost sum;
  for (int k = 0; k < 1000; ++k) sum += ace_shift(I(3), 2);  // 0.6 each
  CHECK(sum.to_decimal() == "600");
  CHECK((AceCost::from_fifths(7)).to_decimal() == "1.4");
  CHECK((AceCost::from_fifths(-3)).to_decimal() == "-0.6");
  CHECK(AceCost::from_bitadders(3) * 4 == AceCost::from_bitadders(12));
  CHECK(AceCost::from_fifths(4) < AceCost::from_bitadders(1));
}

TEST_CASE("tabulated energies come back verbatim") {
  auto e = energy_of_op(OpClass::Multiply, NumericFormat::fp32(), NumericFormat::fp32());
  CHECK(e.picojoules == doctest::Approx(3.7));
  CHECK_FALSE(e.extrapolated);
  CHECK(energy_of_op(OpClass::Multiply, NumericFormat::fp16(), NumericFormat::fp16()).picojoules ==
        doctest::Approx(1.1));
  CHECK(energy_of_op(OpClass::Multiply, I(32), I(32)).picojoules == doctest::Approx(3.1));
  CHECK(energy_of_op(OpClass::Multiply, I(8), I(8)).picojoules == doctest::Approx(0.2));
  CHECK(energy_of_op(OpClass::Add, NumericFormat::fp32(), NumericFormat::fp32()).picojoules ==
        doctest::Approx(0.9));
  CHECK(energy_of_op(OpClass::Add, NumericFormat::fp16(), NumericFormat::fp16()).picojoules ==
        doctest::Approx(0.4));
  CHECK(energy_of_op(OpClass::Add, I(32), I(32)).picojoules == doctest::Approx(0.1));
  CHECK(energy_of_op(OpClass::Add, I(8), I(8)).picojoules == doctest::Approx(0.03));
  CHECK(shift_energy(I(32), 32).picojoules == doctest::Approx(0.13));
  CHECK(shift_energy(I(16), 16).picojoules == doctest::Approx(0.057));
  CHECK(shift_energy(I(8), 8).picojoules == doctest::Approx(0.024));
  // A 3-bit shift amount addresses 8 positions.
  CHECK(energy_of_op(OpClass::Shift, I(8), I(3)).picojoules == doctest::Approx(0.024));
}

TEST_CASE("untabulated integer widths scale from the INT8 anchor") {
  // 0.2 pJ * (4*4)/(8*8)
  auto e = energy_of_op(OpClass::Multiply, I(4), I(4));
  CHECK(e.picojoules == doctest::Approx(0.05));
  CHECK(e.extrapolated);
  CHECK(energy_of_op(OpClass::MAC, I(4), I(8)).picojoules == doctest::Approx(0.1));
  CHECK(energy_of_op(OpClass::Add, I(16), I(16)).picojoules == doctest::Approx(0.06));
  CHECK(shift_energy(I(4), 4).picojoules == doctest::Approx(0.024 * 4 * 2 / 24.0));
  CHECK_THROWS_AS(
      energy_of_op(OpClass::Multiply, NumericFormat::floating(8, 7), NumericFormat::floating(8, 7)),
      UnsupportedExtrapolation);
  CHECK_THROWS_AS(energy_of_op(OpClass::Shift, NumericFormat::fp32(), I(3)), UnsupportedExtrapolation);
}

TEST_CASE("pearson correlation") {
  const std::vector<double> x{1, 2, 3, 4, 5};
  const std::vector<double> up{2, 4, 6, 8, 10};
  const std::vector<double> down{5, 4, 3, 2, 1};
  CHECK(pearson_correlation(x, up) == doctest::Approx(1.0));
  CHECK(pearson_correlation(x, down) == doctest::Approx(-1.0));
  const std::vector<double> flat{3, 3, 3, 3, 3};
  CHECK_THROWS_AS(pearson_correlation(x, flat), DegenerateInput);
  const std::vector<double> shorter{1, 2};
  CHECK_THROWS_AS(pearson_correlation(x, shorter), DegenerateInput);
}
