#pragma once

#include <initializer_list>
#include <random>

#include "gendensity/types.hpp"

namespace testutil {

inline gendensity::Vector vec(std::initializer_list<double> values) {
  gendensity::Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

inline gendensity::Matrix random_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> normal;
  gendensity::Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = normal(rng);
  return m;
}

inline gendensity::Vector random_vector(std::mt19937_64& rng, Eigen::Index size) {
  return random_matrix(rng, size, 1).col(0);
}

}  // namespace testutil
