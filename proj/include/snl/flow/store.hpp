#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "snl/common.hpp"

namespace snl::flow {

struct SimulationRecord {
  int round = 0;
  ParamVector theta;
  DataVector x;
};

// Growing training set of (theta, x) pairs. Records share dimensions and
// round indices never decrease.
class SimulationStore {
 public:
  void add(int round, ParamVector theta, DataVector x);

  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  const std::vector<SimulationRecord>& records() const { return records_; }
  const SimulationRecord& operator[](std::size_t i) const { return records_[i]; }

  int param_dim() const;
  int data_dim() const;

  // Columns are the stored points, in insertion order.
  Matrix thetas() const;
  Matrix xs() const;
  std::size_t count_in_round(int round) const;
  std::vector<DataVector> xs_in_round(int round) const;

  // One JSON object per line: {"round":r,"theta":[...],"x":[...]}.
  void write_jsonl(std::ostream& os) const;
  static SimulationStore read_jsonl(std::istream& is);

 private:
  std::vector<SimulationRecord> records_;
};

}  // namespace snl::flow
