#include "layerlens/gauss/model_io.hpp"

#include <array>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <vector>

#include "json.hpp"

namespace layerlens::gauss {
namespace {

using json = nlohmann::json;

constexpr std::array<char, 4> kMagic = {'L', 'L', 'G', 'M'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint64_t kPreamble = 16;

template <typename T>
void put_le(std::string& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xFF));
  }
}

template <typename T>
T get_le(const unsigned char* bytes) {
  std::uint64_t value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) value |= std::uint64_t{bytes[i]} << (8 * i);
  return static_cast<T>(value);
}

void put_float(std::string& out, double value) {
  put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(static_cast<float>(value)));
}

std::vector<double> read_floats(std::istream& in, std::size_t count, std::uint64_t offset) {
  std::string blob(count * 4, '\0');
  in.read(blob.data(), static_cast<std::streamsize>(blob.size()));
  if (static_cast<std::size_t>(in.gcount()) != blob.size()) {
    throw FormatError(offset + in.gcount(), "truncated float block: expected " + std::to_string(blob.size()) +
                                                " bytes");
  }
  std::vector<double> out(count);
  const auto* bytes = reinterpret_cast<const unsigned char*>(blob.data());
  for (std::size_t i = 0; i < count; ++i) out[i] = std::bit_cast<float>(get_le<std::uint32_t>(bytes + 4 * i));
  return out;
}

json matrix_json(const MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

MatrixXd json_matrix(const json& j) {
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows == 0 ? Eigen::Index{0} : static_cast<Eigen::Index>(j.at(0).size());
  MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = j.at(i).at(k).get<double>();
  }
  return m;
}

}  // namespace

std::uint64_t write_gaussian(const GaussianModeld& model, std::ostream& sink) {
  const MatrixXd factor = model.factor();
  const json header = {{"layer", model.layer()},
                       {"kind", kind_name(model.kind())},
                       {"dim", model.dim()},
                       {"ridge", model.ridge()},
                       {"log_det", model.log_det()},
                       {"factor_rows", factor.rows()},
                       {"factor_cols", factor.cols()}};
  const std::string text = header.dump();
  std::string out(kMagic.begin(), kMagic.end());
  put_le<std::uint32_t>(out, kVersion);
  put_le<std::uint64_t>(out, text.size());
  out += text;
  for (Eigen::Index i = 0; i < model.dim(); ++i) put_float(out, model.mean()(i));
  for (Eigen::Index i = 0; i < factor.rows(); ++i) {
    for (Eigen::Index j = 0; j < factor.cols(); ++j) put_float(out, factor(i, j));
  }
  sink.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!sink) throw Error(ErrorCategory::io, "failed writing Gaussian model");
  return out.size();
}

GaussianModeld read_gaussian(std::istream& source) {
  std::array<unsigned char, kPreamble> pre{};
  source.read(reinterpret_cast<char*>(pre.data()), kPreamble);
  if (source.gcount() < 4 || std::memcmp(pre.data(), kMagic.data(), 4) != 0) {
    throw FormatError(0, "bad magic, expected \"LLGM\"");
  }
  if (source.gcount() < static_cast<std::streamsize>(kPreamble)) throw FormatError(source.gcount(), "truncated preamble");
  if (get_le<std::uint32_t>(pre.data() + 4) != kVersion) throw FormatError(4, "unsupported model version");
  const auto header_len = get_le<std::uint64_t>(pre.data() + 8);
  std::string text(header_len, '\0');
  source.read(text.data(), static_cast<std::streamsize>(header_len));
  if (static_cast<std::uint64_t>(source.gcount()) != header_len) {
    throw FormatError(kPreamble + source.gcount(), "truncated header");
  }
  json header;
  try {
    header = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(kPreamble + e.byte, std::string("header JSON: ") + e.what());
  }
  std::int64_t layer = 0, dim = 0, rows = 0, cols = 0;
  double ridge = 0;
  CovarianceKind kind{};
  try {
    layer = header.at("layer").get<std::int64_t>();
    dim = header.at("dim").get<std::int64_t>();
    rows = header.at("factor_rows").get<std::int64_t>();
    cols = header.at("factor_cols").get<std::int64_t>();
    ridge = header.at("ridge").get<double>();
    kind = parse_kind(header.at("kind").get<std::string>());
  } catch (const json::exception& e) {
    throw FormatError(kPreamble, std::string("header schema: ") + e.what());
  } catch (const Error& e) {
    throw FormatError(kPreamble, e.what());
  }
  if (dim < 1 || rows < 1 || cols < 1) throw FormatError(kPreamble, "nonpositive dimensions in header");
  auto offset = kPreamble + header_len;
  const auto mean_values = read_floats(source, static_cast<std::size_t>(dim), offset);
  offset += 4 * static_cast<std::uint64_t>(dim);
  const auto factor_values = read_floats(source, static_cast<std::size_t>(rows * cols), offset);
  offset += 4 * static_cast<std::uint64_t>(rows * cols);
  if (source.peek() != std::char_traits<char>::eof()) throw FormatError(offset, "trailing bytes after factor");

  VectorXd mean = Eigen::Map<const VectorXd>(mean_values.data(), dim);
  const MatrixXd factor =
      Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(factor_values.data(),
                                                                                                 rows, cols);
  try {
    return GaussianModeld::from_factor(layer, kind, std::move(mean), factor, ridge);
  } catch (const Error& e) {
    throw FormatError(kPreamble + header_len, e.what());
  }
}

void save_gaussian(const GaussianModeld& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCategory::io, "cannot create model file '" + path + "'");
  write_gaussian(model, out);
}

GaussianModeld load_gaussian(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCategory::io, "cannot open model file '" + path + "'");
  return read_gaussian(in);
}

void save_gmm(const GmmModel<double>& model, const std::string& path) {
  json comps = json::array();
  for (const auto& c : model.components) {
    comps.push_back({{"weight", c.weight},
                     {"mean", std::vector<double>(c.gaussian.mean().begin(), c.gaussian.mean().end())},
                     {"ridge", c.gaussian.ridge()},
                     {"cholesky", matrix_json(c.gaussian.cholesky_factor())}});
  }
  const json doc = {{"k", model.k()},
                    {"layer", model.components.empty() ? -1 : model.components.front().gaussian.layer()},
                    {"converged", model.converged},
                    {"final_loglik", model.final_loglik},
                    {"loglik_trace", model.loglik_trace},
                    {"reseeded_at", model.reseeded_at},
                    {"diagnostics", model.diagnostics},
                    {"components", comps}};
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCategory::io, "cannot create model file '" + path + "'");
  out << doc.dump(1) << '\n';
  if (!out) throw Error(ErrorCategory::io, "failed writing '" + path + "'");
}

GmmModel<double> load_gmm(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCategory::io, "cannot open model file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError(e.byte, std::string("mixture JSON: ") + e.what());
  }
  GmmModel<double> model;
  try {
    const auto layer = doc.at("layer").get<std::int64_t>();
    model.converged = doc.at("converged").get<bool>();
    model.final_loglik = doc.at("final_loglik").get<double>();
    model.loglik_trace = doc.at("loglik_trace").get<std::vector<double>>();
    for (const auto& c : doc.at("components")) {
      const auto mean = c.at("mean").get<std::vector<double>>();
      model.components.push_back(
          {c.at("weight").get<double>(),
           GaussianModeld::from_factor(layer, CovarianceKind::full,
                                       Eigen::Map<const VectorXd>(mean.data(), static_cast<Eigen::Index>(mean.size())),
                                       json_matrix(c.at("cholesky")), c.at("ridge").get<double>())});
    }
  } catch (const json::exception& e) {
    throw FormatError(0, std::string("mixture schema: ") + e.what());
  }
  return model;
}

}  // namespace layerlens::gauss
