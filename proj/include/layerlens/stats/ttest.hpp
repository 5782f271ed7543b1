#pragma once

#include <span>
#include <string_view>

namespace layerlens::stats {

enum class TestKind { paired_t, unpaired_t };

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  double df = 0.0;
  TestKind kind = TestKind::paired_t;
};

std::string_view test_kind_name(TestKind kind) noexcept;

/// Paired Student's t on d = a - b, df = n - 1, two-sided.
/// Throws DegenerateError when the differences have zero variance.
TestResult t_test_paired(std::span<const double> a, std::span<const double> b);

/// Equal-variance (pooled) Student's t, df = na + nb - 2, two-sided.
/// Throws DegenerateError when the pooled variance is zero.
TestResult t_test_unpaired(std::span<const double> a, std::span<const double> b);

/// Significance stars at 0.05 / 0.01 / 0.001.
std::string_view stars(double p) noexcept;

}  // namespace layerlens::stats
