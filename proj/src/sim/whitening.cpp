#include "snl/sim/whitening.hpp"

#include <cmath>
#include <stdexcept>

namespace snl::sim {

namespace {

constexpr double kMaxCondition = 1e6;

double condition_number(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  const Vector& s = svd.singularValues();
  return s(s.size() - 1) > 0.0 ? s(0) / s(s.size() - 1) : std::numeric_limits<double>::infinity();
}

}  // namespace

DataVector Whitening::apply(const DataVector& x) const {
  if (x.size() != shift.size()) throw std::invalid_argument("Whitening: dimension mismatch");
  if (mode == WhiteningMode::diagonal) return map.diagonal().cwiseProduct(x - shift);
  return map * (x - shift);
}

DataVector Whitening::unapply(const DataVector& z) const {
  if (z.size() != shift.size()) throw std::invalid_argument("Whitening: dimension mismatch");
  if (mode == WhiteningMode::diagonal) return z.cwiseQuotient(map.diagonal()) + shift;
  return map.triangularView<Eigen::Lower>().solve(z) + shift;
}

Whitening fit_whitening(const std::vector<DataVector>& points, WhiteningMode mode) {
  if (points.empty()) throw std::invalid_argument("fit_whitening: no points");
  const Eigen::Index d = points.front().size();
  if (static_cast<Eigen::Index>(points.size()) < d + 2)
    throw std::invalid_argument("fit_whitening: need at least d + 2 points");
  const Matrix x = stack_columns(points);
  if (!all_finite(x)) throw std::invalid_argument("fit_whitening: non-finite pilot data");

  Whitening w;
  w.mode = mode;
  w.shift = x.rowwise().mean();
  const Matrix centered = x.colwise() - w.shift;
  Matrix cov = centered * centered.transpose() / static_cast<double>(x.cols() - 1);

  const double mean_var = cov.diagonal().mean();
  if (!(mean_var > 0.0)) throw std::runtime_error("fit_whitening: pilot data has zero variance");
  if (mode == WhiteningMode::diagonal) {
    Vector sd = cov.diagonal().cwiseSqrt();
    if ((sd.array() <= 0.0).any()) {
      const double floor = std::sqrt(1e-8 * mean_var);
      sd = sd.cwiseMax(floor);
    }
    w.map = sd.cwiseInverse().asDiagonal();
  } else {
    Eigen::LLT<Matrix> llt(cov);
    if (llt.info() != Eigen::Success) {
      cov.diagonal().array() += 1e-8 * mean_var;
      llt.compute(cov);
      if (llt.info() != Eigen::Success) throw std::runtime_error("fit_whitening: singular pilot covariance");
    }
    w.map = llt.matrixL().solve(Matrix::Identity(d, d));
  }
  if (!all_finite(w.map) || condition_number(w.map) > kMaxCondition)
    throw std::runtime_error("fit_whitening: whitening map is ill-conditioned");
  return w;
}

nlohmann::ordered_json Whitening::to_json() const {
  nlohmann::ordered_json j;
  j["mode"] = mode == WhiteningMode::full ? "full" : "diagonal";
  j["shift"] = std::vector<double>(shift.data(), shift.data() + shift.size());
  std::vector<std::vector<double>> rows;
  for (Eigen::Index r = 0; r < map.rows(); ++r) {
    std::vector<double> row(static_cast<std::size_t>(map.cols()));
    for (Eigen::Index c = 0; c < map.cols(); ++c) row[static_cast<std::size_t>(c)] = map(r, c);
    rows.push_back(std::move(row));
  }
  j["map"] = rows;
  return j;
}

Whitening Whitening::from_json(const nlohmann::ordered_json& j) {
  Whitening w;
  const std::string mode = j.at("mode").get<std::string>();
  if (mode == "full")
    w.mode = WhiteningMode::full;
  else if (mode == "diagonal")
    w.mode = WhiteningMode::diagonal;
  else
    throw std::invalid_argument("Whitening: unknown mode " + mode);
  const auto shift = j.at("shift").get<std::vector<double>>();
  w.shift = Eigen::Map<const Vector>(shift.data(), static_cast<Eigen::Index>(shift.size()));
  const auto rows = j.at("map").get<std::vector<std::vector<double>>>();
  const auto d = static_cast<Eigen::Index>(shift.size());
  if (static_cast<Eigen::Index>(rows.size()) != d) throw std::invalid_argument("Whitening: map shape mismatch");
  w.map.resize(d, d);
  for (Eigen::Index r = 0; r < d; ++r) {
    if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(r)].size()) != d)
      throw std::invalid_argument("Whitening: map shape mismatch");
    for (Eigen::Index c = 0; c < d; ++c) w.map(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
  }
  return w;
}

}  // namespace snl::sim
