#include "acecost/cost_core.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace acecost {

void NumericFormat::validate() const {
  if (total_bits < 1 || total_bits > 64) {
    throw InvalidFormat("total_bits must be in [1, 64], got " + std::to_string(total_bits));
  }
  switch (kind) {
    case FormatKind::Binary:
      if (total_bits != 1) throw InvalidFormat("binary format must be 1 bit");
      break;
    case FormatKind::Float:
      if (exponent_bits < 1 || mantissa_bits < 1 ||
          exponent_bits + mantissa_bits + 1 != total_bits) {
        throw InvalidFormat("float format needs exponent + mantissa + 1 == total bits (" +
                            to_string() + ")");
      }
      break;
    case FormatKind::Fixed:
      break;
  }
}

std::string NumericFormat::to_string() const {
  switch (kind) {
    case FormatKind::Fixed: return "INT" + std::to_string(total_bits);
    case FormatKind::Binary: return "BIN1";
    case FormatKind::Float:
      return "FP" + std::to_string(total_bits) + "(e" + std::to_string(exponent_bits) + "m" +
             std::to_string(mantissa_bits) + ")";
  }
  return "?";
}

std::string AceCost::to_decimal() const {
  // One fifth is exactly 0.2, so a single decimal digit always suffices.
  const bool negative = fifths_ < 0;
  const std::uint64_t mag = negative ? static_cast<std::uint64_t>(-fifths_)
                                     : static_cast<std::uint64_t>(fifths_);
  const std::uint64_t whole = mag / kDenominator;
  const std::uint64_t tenths = (mag % kDenominator) * 2;
  std::string out = negative ? "-" : "";
  out += std::to_string(whole);
  if (tenths != 0) out += "." + std::to_string(tenths);
  return out;
}

std::string to_string(OpClass op) {
  switch (op) {
    case OpClass::MAC: return "MAC";
    case OpClass::Multiply: return "Multiply";
    case OpClass::Add: return "Add";
    case OpClass::Shift: return "Shift";
  }
  return "?";
}

AceCost ace_multiply(const NumericFormat& a, const NumericFormat& b) {
  a.validate();
  b.validate();
  const std::int64_t i = a.total_bits;
  const std::int64_t j = b.total_bits;
  return AceCost::from_bitadders(i * j - std::max(i, j));
}

AceCost ace_add(const NumericFormat& a, const NumericFormat& b) {
  a.validate();
  b.validate();
  if (a.is_float() != b.is_float()) {
    throw MixedKindError("cannot add " + a.to_string() + " and " + b.to_string());
  }
  const std::int64_t widest = std::max(a.total_bits, b.total_bits);
  return AceCost::from_bitadders(a.is_float() ? kFloatAddFactor * widest : widest);
}

int shift_stages(std::int64_t shift_range) {
  if (shift_range < 2) throw OutOfRange("shift range must be >= 2");
  int stages = 0;
  while ((std::int64_t{1} << stages) < shift_range) ++stages;
  return stages;
}

AceCost ace_shift(const NumericFormat& value, std::int64_t shift_range) {
  value.validate();
  if (value.is_float()) {
    throw InvalidFormat("shift cost is defined for fixed-point values only (" +
                        value.to_string() + ")");
  }
  // i * stages muxes, five muxes per bit-adder: the result is already in fifths.
  return AceCost::from_fifths(static_cast<std::int64_t>(value.total_bits) *
                              shift_stages(shift_range));
}

AceCost ace_mac(const NumericFormat& weight, const NumericFormat& act) {
  weight.validate();
  act.validate();
  return AceCost::from_bitadders(static_cast<std::int64_t>(weight.total_bits) * act.total_bits);
}

namespace {

// 45nm CMOS energy table (pJ).
constexpr double kFp32Mul = 3.7, kFp16Mul = 1.1, kInt32Mul = 3.1, kInt8Mul = 0.2;
constexpr double kFp32Add = 0.9, kFp16Add = 0.4, kInt32Add = 0.1, kInt8Add = 0.03;
constexpr double kInt32Shift = 0.13, kInt16Shift = 0.057, kInt8Shift = 0.024;

bool same_float(const NumericFormat& a, const NumericFormat& b, const NumericFormat& ref) {
  return a == ref && b == ref;
}

EnergyCost float_energy(OpClass op, const NumericFormat& a, const NumericFormat& b) {
  const auto fp32 = NumericFormat::fp32();
  const auto fp16 = NumericFormat::fp16();
  const bool is32 = same_float(a, b, fp32);
  const bool is16 = same_float(a, b, fp16);
  if (is32 || is16) {
    switch (op) {
      case OpClass::MAC:
      case OpClass::Multiply: return {is32 ? kFp32Mul : kFp16Mul, false};
      case OpClass::Add: return {is32 ? kFp32Add : kFp16Add, false};
      case OpClass::Shift: break;
    }
  }
  throw UnsupportedExtrapolation("no energy figure for " + to_string(op) + " on " +
                                 a.to_string() + " x " + b.to_string());
}

}  // namespace

EnergyCost shift_energy(const NumericFormat& value, std::int64_t shift_range) {
  value.validate();
  if (value.is_float()) {
    throw UnsupportedExtrapolation("no shift energy for " + value.to_string());
  }
  const int bits = value.total_bits;
  if (value.kind == FormatKind::Fixed && bits == shift_range) {
    if (bits == 32) return {kInt32Shift, false};
    if (bits == 16) return {kInt16Shift, false};
    if (bits == 8) return {kInt8Shift, false};
  }
  // Linear in i*log2(j), anchored at the INT8 shift over 8 positions.
  const double units = static_cast<double>(bits) * shift_stages(shift_range);
  return {kInt8Shift * units / (8.0 * 3.0), true};
}

EnergyCost energy_of_op(OpClass op, const NumericFormat& a, const NumericFormat& b) {
  a.validate();
  b.validate();
  if (op == OpClass::Shift) {
    if (b.is_float()) throw UnsupportedExtrapolation("shift amount must be an integer operand");
    return shift_energy(a, std::int64_t{1} << std::min(b.total_bits, 62));
  }
  if (a.is_float() || b.is_float()) return float_energy(op, a, b);

  const double i = a.total_bits;
  const double j = b.total_bits;
  const bool both_int = a.kind == FormatKind::Fixed && b.kind == FormatKind::Fixed;
  switch (op) {
    case OpClass::MAC:
    case OpClass::Multiply:
      if (both_int && i == j && i == 32) return {kInt32Mul, false};
      if (both_int && i == j && i == 8) return {kInt8Mul, false};
      // Quadratic in operand width, anchored at INT8 x INT8.
      return {kInt8Mul * (i * j) / 64.0, true};
    case OpClass::Add: {
      const double widest = std::max(i, j);
      if (both_int && i == j && i == 32) return {kInt32Add, false};
      if (both_int && i == j && i == 8) return {kInt8Add, false};
      // Linear in the wider operand, anchored at INT8 + INT8.
      return {kInt8Add * widest / 8.0, true};
    }
    case OpClass::Shift: break;
  }
  return {};
}

double pearson_correlation(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw DegenerateInput("length mismatch");
  if (xs.size() < 2) throw DegenerateInput("need at least two samples");
  const double n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    mx += xs[k];
    my += ys[k];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double dx = xs[k] - mx;
    const double dy = ys[k] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw DegenerateInput("zero variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

}  // namespace acecost
