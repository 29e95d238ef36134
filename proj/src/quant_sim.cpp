#include "acecost/quant_sim.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <random>
#include <string>
#include <thread>

namespace acecost::quant {

std::int64_t LinearQuantizer::qmin() const {
  return symmetric ? -((std::int64_t{1} << (bits - 1)) - 1) : 0;
}

std::int64_t LinearQuantizer::qmax() const {
  return symmetric ? (std::int64_t{1} << (bits - 1)) - 1 : (std::int64_t{1} << bits) - 1;
}

void LinearQuantizer::validate() const {
  if (bits < 2 || bits > 32) throw OutOfRange("linear quantizer bits must be in [2, 32]");
  if (!(scale > 0) || !std::isfinite(scale)) throw NonPositiveScale("scale must be positive");
  if (zero_point < qmin() || zero_point > qmax())
    throw OutOfRange("zero point outside the code range");
}

LinearResult linear_quantize(std::span<const double> x, const LinearQuantizer& q) {
  q.validate();
  LinearResult r;
  r.codes.reserve(x.size());
  r.values.reserve(x.size());
  const double lo = static_cast<double>(q.qmin());
  const double hi = static_cast<double>(q.qmax());
  for (double v : x) {
    double code = std::round(v / q.scale) + static_cast<double>(q.zero_point);
    if (code < lo || code > hi) {
      ++r.saturated;
      code = std::clamp(code, lo, hi);
    }
    const auto c = static_cast<std::int64_t>(code);
    r.codes.push_back(c);
    r.values.push_back(q.scale * static_cast<double>(c - q.zero_point));
  }
  return r;
}

void PoTQuantizer::validate() const {
  if (bits < 2 || bits > 16) throw OutOfRange("PoT quantizer bits must be in [2, 16]");
}

std::vector<double> PoTQuantizer::magnitudes() const {
  validate();
  const int levels = (1 << (bits - 1)) - 1;
  std::vector<double> m;
  for (int k = levels - 1; k >= 0; --k) m.push_back(std::ldexp(1.0, max_exponent - k));
  return m;  // ascending
}

std::vector<double> pot_quantize(std::span<const double> x, const PoTQuantizer& q) {
  const auto mags = q.magnitudes();
  std::vector<double> out;
  out.reserve(x.size());
  for (double v : x) {
    const double a = std::fabs(v);
    double best = 0.0;
    double best_err = a;
    for (double m : mags) {
      const double err = std::fabs(a - m);
      if (err <= best_err) {  // ascending scan: ties go to the larger level
        best = m;
        best_err = err;
      }
    }
    out.push_back(best == 0.0 ? 0.0 : std::copysign(best, v));
  }
  return out;
}

double double_quantize_scale(double scale) {
  if (!(scale > 0) || !std::isfinite(scale))
    throw NonPositiveScale("scale must be positive, got " + std::to_string(scale));
  return std::ldexp(1.0, static_cast<int>(std::round(std::log2(scale))));
}

std::vector<double> shift_dequantize(std::span<const std::int64_t> codes, std::int64_t zero_point,
                                     double pot_scale) {
  int exp = 0;
  const double mant = std::frexp(pot_scale, &exp);
  if (mant != 0.5) throw NonPositiveScale("scale is not a power of two");
  const int shift = exp - 1;
  std::vector<double> out;
  out.reserve(codes.size());
  for (auto c : codes) out.push_back(std::ldexp(static_cast<double>(c - zero_point), shift));
  return out;
}

void BatchNormParams::validate() const {
  const auto n = mu.size();
  if (gamma.size() != n || sigma.size() != n || beta.size() != n)
    throw DegenerateInput("batch-norm parameter vectors differ in length");
  for (double s : sigma)
    if (s < 0) throw DegenerateInput("sigma must be non-negative");
  if (!(epsilon > 0)) throw DegenerateInput("epsilon must be positive");
}

ParamQuantizer identity_quantizer() {
  return [](std::span<const double> v) { return std::vector<double>(v.begin(), v.end()); };
}

ParamQuantizer linear_param_quantizer(LinearQuantizer q) {
  q.validate();
  return [q](std::span<const double> v) { return linear_quantize(v, q).values; };
}

namespace {

void check_channels(const ChannelTensor& x, std::size_t channels) {
  if (x.channels != channels || x.data.size() != x.channels * x.per_channel)
    throw DegenerateInput("tensor channel layout does not match the parameters");
}

ChannelTensor affine(const ChannelTensor& x, const std::vector<double>& s,
                     const std::vector<double>& b) {
  ChannelTensor out = x;
  for (std::size_t c = 0; c < x.channels; ++c)
    for (std::size_t k = 0; k < x.per_channel; ++k)
      out.data[c * x.per_channel + k] = x.at(c, k) * s[c] + b[c];
  return out;
}

ChannelTensor eq4(const ChannelTensor& x, const std::vector<double>& mu,
                  const std::vector<double>& gamma, const std::vector<double>& sigma,
                  const std::vector<double>& beta, double eps) {
  ChannelTensor out = x;
  for (std::size_t c = 0; c < x.channels; ++c) {
    const double denom = std::sqrt(sigma[c] * sigma[c] + eps);
    for (std::size_t k = 0; k < x.per_channel; ++k)
      out.data[c * x.per_channel + k] = (x.at(c, k) - mu[c]) * gamma[c] / denom + beta[c];
  }
  return out;
}

}  // namespace

ChannelTensor fp_batchnorm(const ChannelTensor& x, const BatchNormParams& p) {
  p.validate();
  check_channels(x, p.channels());
  return eq4(x, p.mu, p.gamma, p.sigma, p.beta, p.epsilon);
}

ChannelTensor vanilla_qbn(const ChannelTensor& x, const BatchNormParams& p, const ParamQuantizer& Q) {
  p.validate();
  check_channels(x, p.channels());
  return eq4(x, Q(p.mu), Q(p.gamma), Q(p.sigma), Q(p.beta), p.epsilon);
}

FoldedNorm quantnorm_fold(const BatchNormParams& p, const ParamQuantizer& Q) {
  p.validate();
  const auto n = p.channels();
  std::vector<double> ratio(n);
  for (std::size_t c = 0; c < n; ++c)
    ratio[c] = p.gamma[c] / std::sqrt(p.sigma[c] * p.sigma[c] + p.epsilon);
  FoldedNorm f;
  f.scale = Q(ratio);
  const auto qb = Q(p.beta);
  const auto qm = Q(p.mu);
  f.bias.resize(n);
  for (std::size_t c = 0; c < n; ++c) f.bias[c] = qb[c] - qm[c] * f.scale[c];
  return f;
}

ChannelTensor quantnorm(const ChannelTensor& x, const BatchNormParams& p, const ParamQuantizer& Q) {
  check_channels(x, p.channels());
  const auto f = quantnorm_fold(p, Q);
  return affine(x, f.scale, f.bias);
}

double dprelu_scalar(double x, double eta, double alpha, double beta, double gamma) {
  const double d = x - alpha;
  return (d > 0 ? eta : gamma) * d - beta;
}

ChannelTensor dprelu(const ChannelTensor& x, const DPReLUParams& p) {
  auto pick = [&](const std::vector<double>& v, std::size_t c) {
    if (v.size() == 1) return v[0];
    if (v.size() != x.channels) throw DegenerateInput("DPReLU parameter length mismatch");
    return v[c];
  };
  ChannelTensor out = x;
  for (std::size_t c = 0; c < x.channels; ++c) {
    const double eta = pick(p.eta, c), alpha = pick(p.alpha, c), beta = pick(p.beta, c),
                 gamma = pick(p.gamma, c);
    for (std::size_t k = 0; k < x.per_channel; ++k)
      out.data[c * x.per_channel + k] = dprelu_scalar(x.at(c, k), eta, alpha, beta, gamma);
  }
  return out;
}

double quantization_mse(std::span<const double> reference, std::span<const double> candidate) {
  if (reference.size() != candidate.size())
    throw ShapeMismatch("", "mse operands differ in length");
  if (reference.empty()) return 0.0;
  double acc = 0;
  for (std::size_t k = 0; k < reference.size(); ++k) {
    const double d = reference[k] - candidate[k];
    acc += d * d;
  }
  return acc / static_cast<double>(reference.size());
}

namespace {

NormTrial one_trial(const NormSuiteConfig& cfg, std::size_t index, const ParamQuantizer& Q) {
  std::seed_seq seq{cfg.seed, static_cast<std::uint64_t>(index)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> gamma_d(1.0, 0.2), unit(0.0, 1.0);
  std::lognormal_distribution<double> sigma_d(0.0, cfg.sigma_log_sd);

  BatchNormParams p;
  const auto C = cfg.channels;
  p.mu.resize(C);
  p.gamma.resize(C);
  p.sigma.resize(C);
  p.beta.resize(C);
  for (std::size_t c = 0; c < C; ++c) {
    p.gamma[c] = gamma_d(rng);
    p.sigma[c] = sigma_d(rng);
    p.mu[c] = unit(rng);
    p.beta[c] = unit(rng);
  }
  ChannelTensor x{C, cfg.per_channel, std::vector<double>(C * cfg.per_channel)};
  for (std::size_t c = 0; c < C; ++c)
    for (std::size_t k = 0; k < cfg.per_channel; ++k)
      x.data[c * cfg.per_channel + k] = p.mu[c] + p.sigma[c] * unit(rng);

  const auto ref = fp_batchnorm(x, p);
  return {quantization_mse(ref.data, vanilla_qbn(x, p, Q).data),
          quantization_mse(ref.data, quantnorm(x, p, Q).data)};
}

}  // namespace

std::vector<NormTrial> run_norm_suite(const NormSuiteConfig& cfg) {
  const auto Q = linear_param_quantizer(cfg.param_quantizer);
  std::vector<NormTrial> trials(cfg.trials);
  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(8, std::thread::hardware_concurrency()));
  std::vector<std::future<void>> jobs;
  for (std::size_t w = 0; w < workers; ++w) {
    jobs.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t t = w; t < cfg.trials; t += workers) trials[t] = one_trial(cfg, t, Q);
    }));
  }
  for (auto& j : jobs) j.get();
  return trials;
}

}  // namespace acecost::quant
