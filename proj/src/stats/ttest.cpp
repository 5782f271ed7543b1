#include "layerlens/stats/ttest.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "layerlens/error.hpp"
#include "layerlens/stats/correlation.hpp"
#include "layerlens/stats/tdist.hpp"

namespace layerlens::stats {
namespace {

bool constant(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(), [&](double v) { return v == x.front(); });
}

}  // namespace

std::string_view test_kind_name(TestKind kind) noexcept {
  return kind == TestKind::paired_t ? "paired_t" : "unpaired_t";
}

TestResult t_test_paired(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(ErrorCategory::shape, "t_test_paired: length mismatch");
  const auto n = a.size();
  if (n < 2) throw Error(ErrorCategory::validation, "t_test_paired: need n >= 2");
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = a[i] - b[i];
  const double sd = sample_sd(d);
  if (constant(d) || !(sd > 0.0)) throw DegenerateError("t_test_paired: differences have zero variance");
  const double t = mean(d) / (sd / std::sqrt(static_cast<double>(n)));
  const double df = static_cast<double>(n - 1);
  return {t, student_t_two_sided_p(t, df), df, TestKind::paired_t};
}

TestResult t_test_unpaired(std::span<const double> a, std::span<const double> b) {
  const auto na = a.size();
  const auto nb = b.size();
  if (na < 2 || nb < 2) throw Error(ErrorCategory::validation, "t_test_unpaired: need >= 2 per sample");
  const double ma = mean(a);
  const double mb = mean(b);
  double ssa = 0.0;
  double ssb = 0.0;
  for (double x : a) ssa += (x - ma) * (x - ma);
  for (double x : b) ssb += (x - mb) * (x - mb);
  const double df = static_cast<double>(na + nb - 2);
  const double pooled = (ssa + ssb) / df;
  if ((constant(a) && constant(b)) || !(pooled > 0.0)) {
    throw DegenerateError("t_test_unpaired: pooled variance is zero (means " + std::to_string(ma) +
                          " vs " + std::to_string(mb) + ")");
  }
  const double se = std::sqrt(pooled * (1.0 / static_cast<double>(na) + 1.0 / static_cast<double>(nb)));
  const double t = (ma - mb) / se;
  return {t, student_t_two_sided_p(t, df), df, TestKind::unpaired_t};
}

std::string_view stars(double p) noexcept {
  if (p < 0.001) return "***";
  if (p < 0.01) return "**";
  if (p < 0.05) return "*";
  return "";
}

}  // namespace layerlens::stats
