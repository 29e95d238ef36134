#pragma once

// Closed-form ACE_v2 bit-adder costs for multiply, add, shift and MAC
// operations, plus the 45nm per-operation energy table.

#include <compare>
#include <cstdint>
#include <span>
#include <string>

#include "acecost/error.hpp"

namespace acecost {

enum class FormatKind { Fixed, Float, Binary };

/// Representation of one tensor element.
///
/// Float formats carry exponent and mantissa widths (mantissa excludes the
/// sign bit), so `exponent_bits + mantissa_bits + 1 == total_bits`.
struct NumericFormat {
  FormatKind kind = FormatKind::Float;
  int total_bits = 32;
  int exponent_bits = 8;
  int mantissa_bits = 23;

  static NumericFormat fixed(int bits) { return {FormatKind::Fixed, bits, 0, 0}; }
  static NumericFormat binary() { return {FormatKind::Binary, 1, 0, 0}; }
  static NumericFormat floating(int exponent, int mantissa) {
    return {FormatKind::Float, exponent + mantissa + 1, exponent, mantissa};
  }
  static NumericFormat fp32() { return floating(8, 23); }
  static NumericFormat fp16() { return floating(5, 10); }

  bool is_float() const { return kind == FormatKind::Float; }
  bool is_fixed_like() const { return kind != FormatKind::Float; }

  /// Throws InvalidFormat when an invariant does not hold.
  void validate() const;
  std::string to_string() const;

  friend bool operator==(const NumericFormat&, const NumericFormat&) = default;
};

/// Equivalent bit-adder count, held exactly in units of 1/5 bit-adder.
///
/// Every closed form in the model is an integer or an integer divided by the
/// mux-to-adder ratio of 5, so a fixed denominator keeps sums exact.
class AceCost {
 public:
  static constexpr std::int64_t kDenominator = 5;

  constexpr AceCost() = default;
  static constexpr AceCost from_bitadders(std::int64_t whole) {
    return AceCost(whole * kDenominator);
  }
  static constexpr AceCost from_fifths(std::int64_t fifths) { return AceCost(fifths); }

  constexpr std::int64_t fifths() const { return fifths_; }
  double bitadders() const { return static_cast<double>(fifths_) / kDenominator; }

  /// Exact decimal rendering, e.g. "12.8" or "992".
  std::string to_decimal() const;

  constexpr AceCost& operator+=(AceCost o) {
    fifths_ += o.fifths_;
    return *this;
  }
  friend constexpr AceCost operator+(AceCost a, AceCost b) { return a += b; }
  friend constexpr AceCost operator-(AceCost a, AceCost b) { return AceCost(a.fifths_ - b.fifths_); }
  friend constexpr AceCost operator*(AceCost a, std::int64_t n) { return AceCost(a.fifths_ * n); }
  friend constexpr AceCost operator*(std::int64_t n, AceCost a) { return a * n; }
  friend constexpr auto operator<=>(AceCost, AceCost) = default;

 private:
  constexpr explicit AceCost(std::int64_t fifths) : fifths_(fifths) {}
  std::int64_t fifths_ = 0;
};

struct EnergyCost {
  double picojoules = 0.0;
  /// True when the value was scaled from an anchor instead of looked up.
  bool extrapolated = false;
};

enum class OpClass { MAC, Multiply, Add, Shift };

std::string to_string(OpClass op);

/// Cost of one 2:1 multiplexer relative to a full adder.
inline constexpr int kMuxesPerAdder = 5;
/// Floating-point adder overhead over a fixed-point adder of equal width.
inline constexpr int kFloatAddFactor = 6;

/// Elementwise multiply including the completion adder: i*j - max(i, j).
AceCost ace_multiply(const NumericFormat& a, const NumericFormat& b);

/// max(i, j) for fixed/binary operands, 6*max(i, j) for floats.
/// Throws MixedKindError when one operand is float and the other is not.
AceCost ace_add(const NumericFormat& a, const NumericFormat& b);

/// Barrel shift of a fixed-point value over `shift_range` positions:
/// i * ceil(log2(j)) / 5.
AceCost ace_shift(const NumericFormat& value, std::int64_t shift_range);

/// Multiply-accumulate with a carry-save accumulator: i * j.
AceCost ace_mac(const NumericFormat& weight, const NumericFormat& act);

/// Number of whole mux stages a barrel shifter over `shift_range`
/// positions needs, i.e. ceil(log2(shift_range)).
int shift_stages(std::int64_t shift_range);

/// Per-operation energy on 45nm CMOS. Tabulated pairs are returned verbatim;
/// other fixed-point widths are scaled from the smallest tabulated integer
/// entry of the class. For Shift, `b` is the shift-amount operand: a k-bit
/// amount selects among 2^k positions.
EnergyCost energy_of_op(OpClass op, const NumericFormat& a, const NumericFormat& b);

/// Energy of a shift over an explicit range.
EnergyCost shift_energy(const NumericFormat& value, std::int64_t shift_range);

/// Sample Pearson correlation coefficient.
double pearson_correlation(std::span<const double> xs, std::span<const double> ys);

}  // namespace acecost
