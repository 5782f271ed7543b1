#include "layerlens/cxn/standardize.hpp"

#include <fstream>
#include <vector>

#include "json.hpp"

namespace layerlens::cxn {

void StandardizationCalibration::validate() const {
  if (mean.size() != std.size()) throw Error(ErrorCategory::validation, "calibration: mean/std size mismatch");
  for (Eigen::Index j = 0; j < std.size(); ++j) {
    if (!(std(j) > 0.0)) {
      throw Error(ErrorCategory::validation,
                  "calibration: std of dimension " + std::to_string(j) + " is not positive");
    }
  }
}

void save_calibration(const StandardizationCalibration& cal, const std::string& path) {
  const nlohmann::json doc = {{"source_id", cal.source_id},
                              {"mean", std::vector<double>(cal.mean.begin(), cal.mean.end())},
                              {"std", std::vector<double>(cal.std.begin(), cal.std.end())}};
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCategory::io, "cannot create calibration '" + path + "'");
  out << doc.dump() << '\n';
}

StandardizationCalibration load_calibration(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCategory::io, "cannot open calibration '" + path + "'");
  StandardizationCalibration cal;
  try {
    const auto doc = nlohmann::json::parse(in);
    const auto mean = doc.at("mean").get<std::vector<double>>();
    const auto std = doc.at("std").get<std::vector<double>>();
    cal.mean = Eigen::Map<const VectorXd>(mean.data(), static_cast<Eigen::Index>(mean.size()));
    cal.std = Eigen::Map<const VectorXd>(std.data(), static_cast<Eigen::Index>(std.size()));
    cal.source_id = doc.value("source_id", std::string{});
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(e.byte, std::string("calibration JSON: ") + e.what());
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(0, std::string("calibration schema: ") + e.what());
  }
  cal.validate();
  return cal;
}

}  // namespace layerlens::cxn
