#pragma once

#include "jlcm/types.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

namespace testsupport {

inline double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / v.size();
}

inline double variance_of(const std::vector<double>& v) {
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return ss / (v.size() - 1);
}

// recursive adaptive Simpson; independent oracle for closed-form integrals
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol = 1e-10, int depth = 30) {
  auto simpson = [&](double lo, double hi) {
    const double mid = 0.5 * (lo + hi);
    return (hi - lo) / 6.0 * (f(lo) + 4.0 * f(mid) + f(hi));
  };
  std::function<double(double, double, double, int)> rec = [&](double lo, double hi, double whole,
                                                               int d) {
    const double mid = 0.5 * (lo + hi);
    const double left = simpson(lo, mid);
    const double right = simpson(mid, hi);
    if (d <= 0 || std::abs(left + right - whole) < 15.0 * tol)
      return left + right + (left + right - whole) / 15.0;
    return rec(lo, mid, left, d - 1) + rec(mid, hi, right, d - 1);
  };
  return rec(a, b, simpson(a, b), depth);
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// asymptotic Kolmogorov tail probability
inline double kolmogorov_q(double lambda) {
  if (lambda < 1e-10) return 1.0;
  double sum = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += (j % 2 == 1 ? term : -term);
    if (term < 1e-12) break;
  }
  return std::max(0.0, std::min(1.0, 2.0 * sum));
}

// one-sample KS test p-value against a continuous CDF
inline double ks_test_p(std::vector<double> sample, const std::function<double(double)>& cdf) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max(d, std::abs(f - double(i) / n));
    d = std::max(d, std::abs(f - double(i + 1) / n));
  }
  const double sqrt_n = std::sqrt(n);
  return kolmogorov_q((sqrt_n + 0.12 + 0.11 / sqrt_n) * d);
}

// unique scratch directory removed on destruction
struct TempDir {
  std::filesystem::path path;

  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path = std::filesystem::temp_directory_path() /
           ("jlcm_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

struct CliResult {
  int exit_code;
  std::string output;  // stdout + stderr
};

inline CliResult run_cli(const std::string& args) {
  static int counter = 0;
  const std::string capture = (std::filesystem::temp_directory_path() /
                               ("jlcm_cli_out_" + std::to_string(::getpid()) + "_" +
                                std::to_string(counter++)))
                                  .string();
  const std::string cmd = std::string(JLCM_CLI_PATH) + " " + args + " > " + capture + " 2>&1";
  const int status = std::system(cmd.c_str());
  CliResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.output = read_file(capture);
  std::filesystem::remove(capture);
  return result;
}

// small fully specified dataset builders used across test files
inline jlcm::Subject make_subject(const std::string& id, const std::vector<double>& times,
                                  const std::vector<double>& y, double x1, double x3,
                                  double event_time, int event) {
  jlcm::Subject s;
  s.id = id;
  const int m = static_cast<int>(times.size());
  s.times = Eigen::Map<const Eigen::VectorXd>(times.data(), m);
  s.y = Eigen::Map<const Eigen::VectorXd>(y.data(), m);
  s.x1.resize(m, 2);
  s.x2.resize(m, 2);
  s.z.resize(m, 2);
  for (int j = 0; j < m; ++j) {
    s.x1.row(j) << x1, times[j];
    s.x2.row(j) << x1, times[j];
    s.z.row(j) << 1.0, times[j];
  }
  s.x3 = Eigen::VectorXd::Constant(1, x3);
  s.a_design.resize(2);
  s.a_design << 1.0, x3;
  s.b_design.resize(2);
  s.b_design << 1.0, x3;
  s.event_time = event_time;
  s.event = event;
  return s;
}

// dataset in the default simulated shape (p1=p2=q=2, p3=1, designs (1,x3))
inline jlcm::Dataset make_dataset(std::vector<jlcm::Subject> subjects) {
  jlcm::Dataset data;
  data.dims.membership = 2;
  data.dims.longitudinal = 2;
  data.dims.random = 2;
  data.dims.survival = 1;
  data.dims.phi_design = 2;
  data.dims.logd_design = 2;
  data.membership_names = {"x1", "time"};
  data.longitudinal_names = {"x1", "time"};
  data.random_names = {"intercept", "time"};
  data.survival_names = {"x3"};
  data.phi_design_names = {"intercept", "x3"};
  data.logd_design_names = {"intercept", "x3"};
  data.subjects = std::move(subjects);
  return data;
}

}  // namespace testsupport
