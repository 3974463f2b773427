#include "snl/flow/store.hpp"

#include <istream>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

namespace snl::flow {

void SimulationStore::add(int round, ParamVector theta, DataVector x) {
  if (!records_.empty()) {
    if (theta.size() != records_.front().theta.size() || x.size() != records_.front().x.size())
      throw std::invalid_argument("SimulationStore::add: record dimensions differ from the store");
    if (round < records_.back().round)
      throw std::invalid_argument("SimulationStore::add: round indices must be non-decreasing");
  }
  records_.push_back({round, std::move(theta), std::move(x)});
}

int SimulationStore::param_dim() const {
  return records_.empty() ? 0 : static_cast<int>(records_.front().theta.size());
}

int SimulationStore::data_dim() const {
  return records_.empty() ? 0 : static_cast<int>(records_.front().x.size());
}

Matrix SimulationStore::thetas() const {
  Matrix m(param_dim(), static_cast<Eigen::Index>(size()));
  for (std::size_t j = 0; j < size(); ++j) m.col(static_cast<Eigen::Index>(j)) = records_[j].theta;
  return m;
}

Matrix SimulationStore::xs() const {
  Matrix m(data_dim(), static_cast<Eigen::Index>(size()));
  for (std::size_t j = 0; j < size(); ++j) m.col(static_cast<Eigen::Index>(j)) = records_[j].x;
  return m;
}

std::size_t SimulationStore::count_in_round(int round) const {
  std::size_t n = 0;
  for (const auto& r : records_) n += r.round == round ? 1 : 0;
  return n;
}

std::vector<DataVector> SimulationStore::xs_in_round(int round) const {
  std::vector<DataVector> out;
  for (const auto& r : records_)
    if (r.round == round) out.push_back(r.x);
  return out;
}

namespace {

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

Vector from_std(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

void SimulationStore::write_jsonl(std::ostream& os) const {
  for (const auto& r : records_) {
    nlohmann::ordered_json line;
    line["round"] = r.round;
    line["theta"] = to_std(r.theta);
    line["x"] = to_std(r.x);
    os << line.dump() << '\n';
  }
}

SimulationStore SimulationStore::read_jsonl(std::istream& is) {
  SimulationStore store;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    store.add(j.at("round").get<int>(), from_std(j.at("theta").get<std::vector<double>>()),
              from_std(j.at("x").get<std::vector<double>>()));
  }
  return store;
}

}  // namespace snl::flow
