#pragma once

#include <string>

#include "mvplab/errors.hpp"

namespace mvplab {

template <class Fn>
void for_each_policy(const Dims& dims, std::uint64_t cap, Fn&& fn) {
  const std::uint64_t total = policy_count(dims);
  if (total > cap) {
    throw EnumerationTooLarge("policy enumeration too large: A^(H*S) exceeds cap " +
                              std::to_string(cap));
  }
  DeterministicPolicy policy(dims.H, dims.S);
  const std::size_t cells = static_cast<std::size_t>(dims.H) * dims.S;
  std::vector<int> digits(cells, 0);
  for (std::uint64_t i = 0; i < total; ++i) {
    fn(static_cast<const DeterministicPolicy&>(policy));
    for (std::size_t c = 0; c < cells; ++c) {
      const int h = static_cast<int>(c / dims.S);
      const int s = static_cast<int>(c % dims.S);
      if (++digits[c] < dims.A) {
        policy.set_action(h, s, digits[c]);
        break;
      }
      digits[c] = 0;
      policy.set_action(h, s, 0);
    }
  }
}

}  // namespace mvplab
