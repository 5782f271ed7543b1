#include "layerlens/cxn/congruence.hpp"

#include <algorithm>

#include "layerlens/error.hpp"

namespace layerlens::cxn {

std::string_view frequency_name(FrequencyCondition f) noexcept { return f == FrequencyCondition::high ? "high" : "low"; }

FrequencyCondition parse_frequency(std::string_view name) {
  if (name == "high") return FrequencyCondition::high;
  if (name == "low") return FrequencyCondition::low;
  throw Error(ErrorCategory::config, "unknown prototype set '" + std::string(name) + "' (high|low)");
}

const std::array<std::string, 4>& prototype_verbs(FrequencyCondition f) {
  static const std::array<std::string, 4> high = {"gave", "made", "put", "took"};
  static const std::array<std::string, 4> low = {"handed", "turned", "placed", "removed"};
  return f == FrequencyCondition::high ? high : low;
}

int CongruenceResult::congruent_rank(int construction) const {
  const double own = mean_distance(construction, pairing[construction]);
  int rank = 1;
  for (int v = 0; v < 4; ++v) {
    if (v != pairing[construction] && mean_distance(construction, v) < own) ++rank;
  }
  return rank;
}

CongruenceResult congruence_matrix(std::span<const MatrixXd> verbs_by_construction,
                                   std::span<const VectorXd> prototypes, std::array<int, 4> pairing,
                                   const StandardizationCalibration* calibration, FrequencyCondition frequency) {
  if (verbs_by_construction.size() != 4 || prototypes.size() != 4) {
    throw Error(ErrorCategory::validation, "congruence_matrix: need 4 constructions and 4 prototypes");
  }
  std::array<bool, 4> seen{};
  for (int p : pairing) {
    if (p < 0 || p > 3 || seen[p]) throw Error(ErrorCategory::validation, "congruence_matrix: pairing is not a bijection");
    seen[p] = true;
  }
  const auto dim = prototypes[0].size();
  MatrixXd protos(4, dim);
  for (int v = 0; v < 4; ++v) {
    if (prototypes[v].size() != dim) throw Error(ErrorCategory::shape, "congruence_matrix: prototype dimension mismatch");
    protos.row(v) = prototypes[v].transpose();
  }
  if (calibration) protos = standardize(protos, *calibration);

  CongruenceResult out;
  out.pairing = pairing;
  out.frequency_condition = frequency;
  std::vector<double> congruent, incongruent;
  for (int c = 0; c < 4; ++c) {
    const auto& raw = verbs_by_construction[c];
    if (raw.rows() < 1) throw Error(ErrorCategory::empty, "congruence_matrix: construction " + std::to_string(c) + " has no sentences");
    if (raw.cols() != dim) throw Error(ErrorCategory::shape, "congruence_matrix: verb embedding dimension mismatch");
    const MatrixXd verbs = calibration ? standardize(raw, *calibration) : raw;
    for (int v = 0; v < 4; ++v) {
      const VectorXd d = (verbs.rowwise() - protos.row(v)).rowwise().norm();
      out.mean_distance(c, v) = d.mean();
      auto& pool = v == pairing[c] ? congruent : incongruent;
      pool.insert(pool.end(), d.begin(), d.end());
    }
  }
  double diag = 0.0, off = 0.0;
  for (int c = 0; c < 4; ++c) {
    for (int v = 0; v < 4; ++v) (v == pairing[c] ? diag : off) += out.mean_distance(c, v);
  }
  out.congruent_mean = diag / 4.0;
  out.incongruent_mean = off / 12.0;
  try {
    out.test = stats::t_test_unpaired(congruent, incongruent);
    out.p_value = out.test->p_value;
  } catch (const Error& e) {
    out.diagnostics.emplace_back(e.what());
  }
  return out;
}

}  // namespace layerlens::cxn
