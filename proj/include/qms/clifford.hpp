#pragma once

#include <vector>

#include "qms/matrix.hpp"

namespace qms {

/// Pauli matrices sigma_1, sigma_2, sigma_3.
ComplexMatrix pauli(int k);

/// 2m+1 Hermitian, unitary, pairwise anticommuting matrices of size 2^m built from
/// Pauli tensor words: Z..Z X I..I, Z..Z Y I..I (Z repeated j times), and Z..Z.
/// For m = 1 this is (sigma_1, sigma_2, sigma_3).
std::vector<ComplexMatrix> clifford_generators(int m);

}  // namespace qms
