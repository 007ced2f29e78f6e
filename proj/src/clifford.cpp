#include "qms/clifford.hpp"

#include "qms/errors.hpp"

namespace qms {

ComplexMatrix pauli(int k) {
  const cplx i(0.0, 1.0);
  switch (k) {
    case 1: return {{0.0, 1.0}, {1.0, 0.0}};
    case 2: return {{0.0, -i}, {i, 0.0}};
    case 3: return {{1.0, 0.0}, {0.0, -1.0}};
    default: fail(ErrorKind::dimension_mismatch, "Pauli index must be 1, 2 or 3");
  }
}

std::vector<ComplexMatrix> clifford_generators(int m) {
  require(m >= 1, ErrorKind::dimension_mismatch, "clifford_generators needs m >= 1");
  const ComplexMatrix id = ComplexMatrix::identity(2);
  auto word = [&](int j, const ComplexMatrix& middle) {
    ComplexMatrix out = ComplexMatrix::identity(1);
    for (int k = 0; k < m; ++k) {
      const ComplexMatrix& f = k < j ? pauli(3) : (k == j ? middle : id);
      out = kron(out, f);
    }
    return out;
  };
  std::vector<ComplexMatrix> gens;
  gens.reserve(2 * m + 1);
  for (int j = 0; j < m; ++j) {
    gens.push_back(word(j, pauli(1)));
    gens.push_back(word(j, pauli(2)));
  }
  ComplexMatrix top = ComplexMatrix::identity(1);
  for (int k = 0; k < m; ++k) top = kron(top, pauli(3));
  gens.push_back(std::move(top));
  return gens;
}

}  // namespace qms
