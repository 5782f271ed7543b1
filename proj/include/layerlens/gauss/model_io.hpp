#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "layerlens/gauss/gaussian.hpp"
#include "layerlens/gauss/gmm.hpp"

namespace layerlens::gauss {

// Gaussian model file:
//   bytes 0-3   "LLGM"
//   bytes 4-7   u32 LE version = 1
//   bytes 8-15  u64 LE header length
//   header      UTF-8 JSON {"layer", "kind", "dim", "ridge", "log_det", "factor_rows", "factor_cols"}
//   mean        dim float32 LE
//   factor      factor_rows * factor_cols float32 LE, row-major
// The factor is the lower Cholesky factor (full), per-dimension standard
// deviations (diag) or one standard deviation (spherical). log_det is
// recomputed from the stored factor on load.

std::uint64_t write_gaussian(const GaussianModeld& model, std::ostream& sink);
GaussianModeld read_gaussian(std::istream& source);
void save_gaussian(const GaussianModeld& model, const std::string& path);
GaussianModeld load_gaussian(const std::string& path);

/// Mixtures are written as JSON: weights, means and Cholesky factors in full
/// double precision, plus the log-likelihood trace.
void save_gmm(const GmmModel<double>& model, const std::string& path);
GmmModel<double> load_gmm(const std::string& path);

}  // namespace layerlens::gauss
