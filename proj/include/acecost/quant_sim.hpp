#pragma once

// Numeric reference implementations of the quantizers and the quantized
// normalisation / activation layers. Tensors are flat vectors; per-channel
// operations take a ChannelTensor laid out channel-major.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "acecost/error.hpp"

namespace acecost::quant {

struct LinearQuantizer {
  int bits = 8;
  double scale = 1.0;
  std::int64_t zero_point = 0;
  bool symmetric = true;

  /// Symmetric: [-(2^(b-1)-1), 2^(b-1)-1]. Asymmetric: [0, 2^b - 1].
  std::int64_t qmin() const;
  std::int64_t qmax() const;
  void validate() const;
};

struct LinearResult {
  std::vector<std::int64_t> codes;
  std::vector<double> values;
  std::size_t saturated = 0;
};

/// codes = clamp(round(x/S) + Z), values = S * (codes - Z). Rounds half
/// away from zero.
LinearResult linear_quantize(std::span<const double> x, const LinearQuantizer& q);

struct PoTQuantizer {
  int bits = 4;
  int max_exponent = 0;

  /// One bit is the sign; the remaining codes give 2^(b-1) - 1 magnitudes
  /// 2^(max_exponent - k) plus zero.
  std::vector<double> magnitudes() const;
  void validate() const;
};

/// Nearest level by absolute distance, ties toward the larger magnitude,
/// saturating at the largest level.
std::vector<double> pot_quantize(std::span<const double> x, const PoTQuantizer& q);

/// 2^round(log2(S)). Throws NonPositiveScale for S <= 0.
double double_quantize_scale(double scale);

/// Dequantise integer codes against a PoT scale 2^k by bit shifting.
std::vector<double> shift_dequantize(std::span<const std::int64_t> codes, std::int64_t zero_point,
                                     double pot_scale);

struct BatchNormParams {
  std::vector<double> mu, gamma, sigma, beta;
  double epsilon = 1e-3;

  std::size_t channels() const { return mu.size(); }
  void validate() const;
};

struct ChannelTensor {
  std::size_t channels = 0;
  std::size_t per_channel = 0;
  std::vector<double> data;  // data[c * per_channel + k]

  double at(std::size_t c, std::size_t k) const { return data[c * per_channel + k]; }
};

/// Applies a quantizer to a parameter vector.
using ParamQuantizer = std::function<std::vector<double>(std::span<const double>)>;

ParamQuantizer identity_quantizer();
ParamQuantizer linear_param_quantizer(LinearQuantizer q);

ChannelTensor fp_batchnorm(const ChannelTensor& x, const BatchNormParams& p);
ChannelTensor vanilla_qbn(const ChannelTensor& x, const BatchNormParams& p, const ParamQuantizer& Q);

struct FoldedNorm {
  std::vector<double> scale;
  std::vector<double> bias;
};

/// s = Q(gamma / sqrt(sigma^2 + eps)), b = Q(beta) - Q(mu) * s.
FoldedNorm quantnorm_fold(const BatchNormParams& p, const ParamQuantizer& Q);
/// out = x * s + b per channel.
ChannelTensor quantnorm(const ChannelTensor& x, const BatchNormParams& p, const ParamQuantizer& Q);

struct DPReLUParams {
  // Size 1 broadcasts over every channel.
  std::vector<double> eta{1.0}, alpha{0.0}, beta{0.0}, gamma{0.0};
};

ChannelTensor dprelu(const ChannelTensor& x, const DPReLUParams& p);
double dprelu_scalar(double x, double eta, double alpha, double beta, double gamma);

double quantization_mse(std::span<const double> reference, std::span<const double> candidate);

struct NormTrial {
  double vanilla_mse = 0;
  double quantnorm_mse = 0;
};

struct NormSuiteConfig {
  std::size_t trials = 1000;
  std::size_t channels = 64;
  std::size_t per_channel = 64;
  std::uint64_t seed = 20240601;
  double sigma_log_sd = 0.25;
  LinearQuantizer param_quantizer{8, 1.0 / 16.0, 0, true};
};

/// Random BN parameter sets, each trial seeded from the root seed and its
/// index so results do not depend on scheduling.
std::vector<NormTrial> run_norm_suite(const NormSuiteConfig& cfg);

}  // namespace acecost::quant
