#include "acecost/adder_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <string>
#include <thread>

namespace acecost {

namespace {

// Dadda height targets below the tallest column, largest first.
std::vector<int> stage_targets(int tallest) {
  std::vector<int> targets{2};
  while (targets.back() < tallest) targets.push_back(targets.back() * 3 / 2);
  targets.erase(std::remove_if(targets.begin(), targets.end(),
                               [&](int d) { return d >= tallest; }),
                targets.end());
  std::reverse(targets.begin(), targets.end());
  return targets;
}

}  // namespace

CircuitTally dadda_adder_count(int i, int j) {
  if (i < 1 || i > 64 || j < 1 || j > 64) {
    throw OutOfRange("operand widths must be in [1, 64], got " + std::to_string(i) + "x" +
                     std::to_string(j));
  }
  std::vector<int> cols(static_cast<std::size_t>(i + j + 1), 0);
  for (int a = 0; a < i; ++a)
    for (int b = 0; b < j; ++b) ++cols[static_cast<std::size_t>(a + b)];
  const int tallest = *std::max_element(cols.begin(), cols.end());

  CircuitTally t;
  for (int d : stage_targets(tallest)) {
    int carry = 0;
    for (int& h : cols) {
      h += carry;
      carry = 0;
      while (h > d) {
        if (h - d >= 2) {
          ++t.full_adders;
          h -= 2;
        } else {
          ++t.half_adders;
          h -= 1;
        }
        ++carry;
      }
    }
  }

  // Ripple completion over the two surviving rows.
  int carry = 0;
  for (int h : cols) {
    if (h + carry >= 2) {
      if (h + carry == 3) ++t.full_adders; else ++t.half_adders;
      ++t.completion_adders;
      carry = 1;
    } else {
      carry = 0;
    }
  }
  return t;
}


std::uint64_t dadda_evaluate(int i, int j, std::uint64_t a, std::uint64_t b, CircuitTally* tally) {
  if (i < 1 || j < 1 || i + j > 64) throw OutOfRange("dadda_evaluate needs i, j >= 1 and i + j <= 64");
  using Bits = std::vector<std::uint8_t>;
  std::vector<Bits> cols(static_cast<std::size_t>(i + j + 1));
  for (int x = 0; x < i; ++x)
    for (int y = 0; y < j; ++y)
      cols[static_cast<std::size_t>(x + y)].push_back(((a >> x) & 1U) & ((b >> y) & 1U));
  std::size_t tallest = 0;
  for (const auto& c : cols) tallest = std::max(tallest, c.size());

  CircuitTally t;
  auto take = [](Bits& pool) {
    const auto v = pool.back();
    pool.pop_back();
    return v;
  };
  for (int d : stage_targets(static_cast<int>(tallest))) {
    const auto target = static_cast<std::size_t>(d);
    Bits incoming;
    for (auto& col : cols) {
      col.insert(col.end(), incoming.begin(), incoming.end());
      incoming.clear();
      while (col.size() > target) {
        if (col.size() - target >= 2) {
          const auto x = take(col), y = take(col), z = take(col);
          col.insert(col.begin(), static_cast<std::uint8_t>(x ^ y ^ z));
          incoming.push_back(static_cast<std::uint8_t>((x & y) | (x & z) | (y & z)));
          ++t.full_adders;
        } else {
          const auto x = take(col), y = take(col);
          col.insert(col.begin(), static_cast<std::uint8_t>(x ^ y));
          incoming.push_back(static_cast<std::uint8_t>(x & y));
          ++t.half_adders;
        }
      }
    }
  }

  std::uint64_t product = 0;
  std::uint8_t carry = 0;
  bool carry_wire = false;
  for (std::size_t c = 0; c < cols.size(); ++c) {
    Bits bits = cols[c];
    if (carry_wire) bits.push_back(carry);
    std::uint8_t sum = 0;
    if (bits.size() >= 2) {
      std::uint8_t ones = 0;
      for (auto v : bits) ones = static_cast<std::uint8_t>(ones + v);
      sum = ones & 1U;
      carry = static_cast<std::uint8_t>(ones >> 1);
      carry_wire = true;
      if (bits.size() == 3) ++t.full_adders; else ++t.half_adders;
      ++t.completion_adders;
    } else {
      sum = bits.empty() ? 0 : bits.front();
      carry = 0;
      carry_wire = false;
    }
    if (sum && c < 64) product |= std::uint64_t{1} << c;
  }
  if (tally) *tally = t;
  return product;
}

std::vector<MultiplyMismatch> verify_multiply_formula(int max_bits) {
  if (max_bits < 1 || max_bits > 64) throw OutOfRange("max_bits must be in [1, 64]");
  const unsigned workers = std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
  std::vector<std::future<std::vector<MultiplyMismatch>>> jobs;
  for (unsigned w = 0; w < workers; ++w) {
    jobs.push_back(std::async(std::launch::async, [=] {
      std::vector<MultiplyMismatch> bad;
      for (int i = 1 + static_cast<int>(w); i <= max_bits; i += static_cast<int>(workers)) {
        for (int j = 1; j <= max_bits; ++j) {
          const std::int64_t got = dadda_adder_count(i, j).adder_total();
          const std::int64_t want = std::int64_t{i} * j - std::max(i, j);
          if (got != want) bad.push_back({i, j, got, want});
        }
      }
      return bad;
    }));
  }
  std::vector<MultiplyMismatch> all;
  for (auto& f : jobs) {
    auto part = f.get();
    all.insert(all.end(), part.begin(), part.end());
  }
  std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
    return a.i != b.i ? a.i < b.i : a.j < b.j;
  });
  return all;
}

FpAdderBreakdown fp_adder_breakdown(int e, int m) {
  if (e < 2 || m < 2) throw OutOfRange("fp adder needs e >= 2 and m >= 2");
  const double ed = e, md = m;
  const double mux_ratio = kMuxesPerAdder;
  FpAdderBreakdown b;
  b.exponent_subtraction = ed;
  b.operand_swapping = 0;
  b.alignment_limit = md;
  b.alignment_shift = md * std::log2(md) / mux_ratio;
  b.significand_negation = 1;
  b.significand_addition = md;
  b.significand_conversion = 2 * md;
  b.normalization = ed * std::log2(ed) / mux_ratio;
  b.rounding_postnorm = md;
  b.total = b.exponent_subtraction + b.operand_swapping + b.alignment_limit +
            b.alignment_shift + b.significand_negation + b.significand_addition +
            b.significand_conversion + b.normalization + b.rounding_postnorm;
  return b;
}

CircuitTally barrel_mux_count(int i, std::int64_t shift_range) {
  if (i < 1) throw OutOfRange("shifter width must be >= 1");
  CircuitTally t;
  // One 2:1 mux per bit per stage; stage s moves by 2^s positions.
  const int stages = shift_stages(shift_range);
  for (int s = 0; s < stages; ++s) t.mux21 += i;
  return t;
}

std::uint64_t barrel_shift_evaluate(int i, std::int64_t shift_range, std::uint64_t value,
                                    std::int64_t amount, CircuitTally* tally) {
  if (i < 1 || i > 64) throw OutOfRange("shifter width must be in [1, 64]");
  if (amount < 0 || amount >= shift_range) throw OutOfRange("shift amount outside the range");
  const int stages = shift_stages(shift_range);
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(i));
  for (int k = 0; k < i; ++k) bits[static_cast<std::size_t>(k)] = (value >> k) & 1U;

  CircuitTally t;
  for (int s = 0; s < stages; ++s) {
    const bool select = (amount >> s) & 1;
    const int by = 1 << std::min(s, 62);
    std::vector<std::uint8_t> next(bits.size());
    for (int k = 0; k < i; ++k) {
      // 2:1 mux: pass bit k or take bit k - 2^s (zero fill below).
      const std::uint8_t shifted = k >= by ? bits[static_cast<std::size_t>(k - by)] : 0;
      next[static_cast<std::size_t>(k)] = select ? shifted : bits[static_cast<std::size_t>(k)];
      ++t.mux21;
    }
    bits.swap(next);
  }
  std::uint64_t out = 0;
  for (int k = 0; k < i; ++k)
    if (bits[static_cast<std::size_t>(k)]) out |= std::uint64_t{1} << k;
  if (tally) *tally = t;
  return out;
}

}  // namespace acecost
