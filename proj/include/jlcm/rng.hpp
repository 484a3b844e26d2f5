#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>

namespace jlcm {

// SplitMix64 finalizer, used to spread correlated seed inputs.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Deterministic per-unit substream seed (subjects in simulation, K values in
// model selection). index+1 keeps index 0 distinct from the base stream.
inline std::uint64_t substream_seed(std::uint64_t base, std::uint64_t index) {
  return splitmix64(base + 0x9e3779b97f4a7c15ULL * (index + 1));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }
  double normal(double mean, double sd) { return mean + sd * normal(); }
  int bernoulli(double p) { return uniform() < p ? 1 : 0; }

  // Gamma(shape, rate), mean shape/rate.
  double gamma(double shape, double rate) {
    return std::gamma_distribution<double>(shape, 1.0 / rate)(engine_);
  }
  // IG(shape, scale): if X ~ IG then 1/X ~ Gamma(shape, rate=scale).
  double inverse_gamma(double shape, double scale) { return 1.0 / gamma(shape, scale); }

  Eigen::VectorXd standard_normal_vector(int n) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = normal();
    return v;
  }

  // Categorical draw from unnormalized log weights; log-sum-exp keeps extreme
  // weights from collapsing to 0/0.
  int categorical_log(const Eigen::VectorXd& log_w) {
    const double shift = log_w.maxCoeff();
    Eigen::VectorXd w = (log_w.array() - shift).exp();
    const double u = uniform() * w.sum();
    double acc = 0.0;
    for (int k = 0; k < w.size(); ++k) {
      acc += w[k];
      if (u <= acc) return k;
    }
    return static_cast<int>(w.size()) - 1;
  }

  std::uint64_t raw() { return engine_(); }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace jlcm
