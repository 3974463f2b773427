#include "snl/flow/masks.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace snl::flow {

std::vector<int> natural_ordering(int data_dim) {
  std::vector<int> order(static_cast<std::size_t>(data_dim));
  std::iota(order.begin(), order.end(), 1);
  return order;
}

std::vector<int> reversed_ordering(int data_dim) {
  auto order = natural_ordering(data_dim);
  std::reverse(order.begin(), order.end());
  return order;
}

namespace {

void check_permutation(std::span<const int> ordering, int data_dim) {
  if (static_cast<int>(ordering.size()) != data_dim)
    throw std::invalid_argument("build_masks: ordering length does not match data_dim");
  std::vector<int> sorted(ordering.begin(), ordering.end());
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < data_dim; ++i)
    if (sorted[static_cast<std::size_t>(i)] != i + 1)
      throw std::invalid_argument("build_masks: ordering must be a permutation of 1..data_dim");
}

Matrix connect(const std::vector<int>& to, const std::vector<int>& from, bool strict) {
  Matrix mask(static_cast<Eigen::Index>(to.size()), static_cast<Eigen::Index>(from.size()));
  for (std::size_t r = 0; r < to.size(); ++r)
    for (std::size_t c = 0; c < from.size(); ++c)
      mask(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          (strict ? to[r] > from[c] : to[r] >= from[c]) ? 1.0 : 0.0;
  return mask;
}

}  // namespace

MaskSet build_masks(int data_dim, std::span<const int> hidden_sizes, int cond_dim,
                    std::span<const int> ordering) {
  if (data_dim < 1) throw std::invalid_argument("build_masks: data_dim must be >= 1");
  if (cond_dim < 0) throw std::invalid_argument("build_masks: cond_dim must be >= 0");
  if (hidden_sizes.empty()) throw std::invalid_argument("build_masks: at least one hidden layer required");
  for (int h : hidden_sizes)
    if (h < 1) throw std::invalid_argument("build_masks: hidden sizes must be >= 1");
  check_permutation(ordering, data_dim);

  MaskSet masks;
  masks.data_dim = data_dim;
  masks.cond_dim = cond_dim;
  masks.input_degrees.assign(ordering.begin(), ordering.end());

  const int cycle = std::max(1, data_dim - 1);
  const int offset = std::min(1, data_dim - 1);
  for (int h : hidden_sizes) {
    std::vector<int> deg(static_cast<std::size_t>(h));
    for (int k = 0; k < h; ++k) deg[static_cast<std::size_t>(k)] = k % cycle + offset;
    masks.hidden_degrees.push_back(std::move(deg));
  }

  const std::vector<int>* prev = &masks.input_degrees;
  for (const auto& deg : masks.hidden_degrees) {
    masks.hidden_masks.push_back(connect(deg, *prev, false));
    prev = &deg;
  }
  masks.output_mask = connect(masks.input_degrees, masks.hidden_degrees.back(), true);
  return masks;
}

}  // namespace snl::flow
