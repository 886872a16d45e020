#ifndef DHDAE_TESTS_FIXTURES_HPP
#define DHDAE_TESTS_FIXTURES_HPP

#include "dhdae/model.hpp"

namespace dhdae::tests {

inline ComplexMatrix mat2(Complex a, Complex b, Complex c, Complex d) {
  ComplexMatrix M(2, 2);
  M << a, b, c, d;
  return M;
}

inline ComplexMatrix rot2() { return mat2(0, 1, -1, 0); }

/// E = diag(1, 0), J the 2x2 rotation, R = 0: regular, index 2.
inline DhdaeSystem perturbed_index_example() {
  ComplexMatrix E = ComplexMatrix::Zero(2, 2);
  E(0, 0) = 1;
  return DhdaeSystem::validate(E, rot2(), ComplexMatrix::Zero(2, 2));
}

/// E = diag(1, 0), J rotation, R = diag(0, 1): robustly stable, and one
/// step away from perturbed_index_example.
inline DhdaeSystem near_index_example() {
  ComplexMatrix E = ComplexMatrix::Zero(2, 2);
  E(0, 0) = 1;
  ComplexMatrix R = ComplexMatrix::Zero(2, 2);
  R(1, 1) = 1;
  return DhdaeSystem::validate(E, rot2(), R);
}

/// E = I, J rotation, R = I: eigenvalues -1 +- i.
inline DhdaeSystem damped_oscillator() {
  return DhdaeSystem::validate(ComplexMatrix::Identity(2, 2), rot2(),
                               ComplexMatrix::Identity(2, 2));
}

inline DhdaeSystem dc_network_unit() { return make_dc_network({}); }

/// A robustly stable random system: retries seeds until the verdict holds.
DhdaeSystem random_stable_system(Index n, std::uint64_t seed,
                                 bool allow_singular = true);

}  // namespace dhdae::tests

#endif
