#pragma once

#include <span>
#include <vector>

#include "snl/common.hpp"

namespace snl::flow {

// Connectivity of one conditional MADE network.
//
// Degrees follow the sequential convention: data input i carries degree
// ordering[i] in 1..D, hidden unit k of every layer carries degree
// (k mod max(1, D-1)) + min(1, D-1). A hidden unit sees previous units of
// degree <= its own; the mu/alpha heads for input i see hidden units of degree
// strictly below ordering[i]. Conditioner inputs feed every first-layer unit.
struct MaskSet {
  int data_dim = 0;
  int cond_dim = 0;
  std::vector<int> input_degrees;
  std::vector<std::vector<int>> hidden_degrees;
  // hidden_masks[0] is H1 x D, hidden_masks[l] is H(l+1) x H(l).
  std::vector<Matrix> hidden_masks;
  // D x H_last, shared by the mu and alpha heads.
  Matrix output_mask;
};

std::vector<int> natural_ordering(int data_dim);
std::vector<int> reversed_ordering(int data_dim);

// Throws std::invalid_argument on data_dim == 0, empty hidden sizes, zero-width
// layers or an ordering that is not a permutation of 1..data_dim.
MaskSet build_masks(int data_dim, std::span<const int> hidden_sizes, int cond_dim,
                    std::span<const int> ordering);

}  // namespace snl::flow
