#pragma once

// Gate-level constructions used to cross-check the closed-form costs:
// a Dadda multiplier with ripple completion, the floating-point adder
// component model, and a log-stage barrel shifter.

#include <cstdint>
#include <vector>

#include "acecost/cost_core.hpp"

namespace acecost {

struct CircuitTally {
  std::int64_t full_adders = 0;
  std::int64_t half_adders = 0;
  std::int64_t mux21 = 0;
  // Adders spent in the final carry-propagate stage; also included in the
  // full/half totals above.
  std::int64_t completion_adders = 0;

  std::int64_t adder_total() const { return full_adders + half_adders; }
  std::int64_t reduction_adders() const { return adder_total() - completion_adders; }
  AceCost bitadder_equivalent() const {
    return AceCost::from_bitadders(adder_total()) + AceCost::from_fifths(mux21);
  }
};

CircuitTally dadda_adder_count(int i, int j);

/// Evaluates the same Dadda netlist on concrete operands, bit by bit, and
/// returns the product. Needs i + j <= 64. The tally of the adders actually
/// instantiated is written to `tally` when given.
std::uint64_t dadda_evaluate(int i, int j, std::uint64_t a, std::uint64_t b,
                             CircuitTally* tally = nullptr);

struct MultiplyMismatch {
  int i = 0;
  int j = 0;
  std::int64_t constructed = 0;
  std::int64_t predicted = 0;
};

/// Every (i, j) in [1, max_bits]^2 whose Dadda count differs from i*j - max(i, j).
std::vector<MultiplyMismatch> verify_multiply_formula(int max_bits);

struct FpAdderBreakdown {
  double exponent_subtraction = 0;
  double operand_swapping = 0;
  double alignment_limit = 0;
  double alignment_shift = 0;
  double significand_negation = 0;
  double significand_addition = 0;
  double significand_conversion = 0;
  double normalization = 0;
  double rounding_postnorm = 0;
  double total = 0;
};

/// Component costs in bit-adders. log2 terms use the real logarithm.
FpAdderBreakdown fp_adder_breakdown(int exponent_bits, int mantissa_bits);

CircuitTally barrel_mux_count(int i, std::int64_t shift_range);

/// Logical left shift of an i-bit value through the mux stages, truncated
/// to i bits. Needs 1 <= i <= 64 and amount < shift_range.
std::uint64_t barrel_shift_evaluate(int i, std::int64_t shift_range, std::uint64_t value,
                                    std::int64_t amount, CircuitTally* tally = nullptr);

}  // namespace acecost
