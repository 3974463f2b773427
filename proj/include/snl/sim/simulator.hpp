#pragma once

#include <atomic>
#include <functional>
#include <memory>
#include <optional>

#include "snl/common.hpp"

namespace snl::sim {

// A stochastic program theta -> x. Implementations must be pure functions of
// (theta, rng) so that calls can run concurrently on separate substreams.
// std::nullopt signals a failed simulation.
class Simulator {
 public:
  virtual ~Simulator() = default;
  virtual int param_dim() const = 0;
  virtual int data_dim() const = 0;
  virtual std::optional<DataVector> simulate(const ParamVector& theta, Rng& rng) const = 0;
};

// Wraps a callable.
class FunctionSimulator final : public Simulator {
 public:
  using Fn = std::function<std::optional<DataVector>(const ParamVector&, Rng&)>;
  FunctionSimulator(int param_dim, int data_dim, Fn fn)
      : param_dim_(param_dim), data_dim_(data_dim), fn_(std::move(fn)) {}
  int param_dim() const override { return param_dim_; }
  int data_dim() const override { return data_dim_; }
  std::optional<DataVector> simulate(const ParamVector& theta, Rng& rng) const override { return fn_(theta, rng); }

 private:
  int param_dim_, data_dim_;
  Fn fn_;
};

// Counts every call, including failed ones.
class CountingSimulator final : public Simulator {
 public:
  explicit CountingSimulator(std::shared_ptr<const Simulator> inner) : inner_(std::move(inner)) {}
  int param_dim() const override { return inner_->param_dim(); }
  int data_dim() const override { return inner_->data_dim(); }
  std::optional<DataVector> simulate(const ParamVector& theta, Rng& rng) const override {
    calls_.fetch_add(1, std::memory_order_relaxed);
    return inner_->simulate(theta, rng);
  }
  std::uint64_t calls() const { return calls_.load(); }
  void reset() { calls_.store(0); }

 private:
  std::shared_ptr<const Simulator> inner_;
  mutable std::atomic<std::uint64_t> calls_{0};
};

}  // namespace snl::sim
