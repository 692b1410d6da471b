#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "mangrad/linalg.hpp"

namespace mangrad::designs {

using linalg::ComplexMatrix;
using linalg::HermitianMatrix;

/// Finite set of n x n unitaries (each unitary to 1e-10).
class FiniteUnitarySet {
 public:
  FiniteUnitarySet(std::size_t n, std::vector<ComplexMatrix> elements);

  std::size_t n() const { return n_; }
  std::size_t size() const { return elements_.size(); }
  const std::vector<ComplexMatrix>& elements() const { return elements_; }

  /// {"n": int, "elements": [[[re, im], ...], ...]}, each element a flat
  /// row-major list of n^2 [re, im] pairs.
  static FiniteUnitarySet from_json(const nlohmann::json& j);
  static FiniteUnitarySet load(const std::string& path);
  nlohmann::json to_json() const;

 private:
  std::size_t n_;
  std::vector<ComplexMatrix> elements_;
};

/// True if a = e^{i phi} b for some phase.
bool equal_up_to_phase(const ComplexMatrix& a, const ComplexMatrix& b, double tol = 1e-9);

/// The 24 single-qubit Clifford classes modulo phase, generated from H and
/// S by closure; every representative has det = 1.
FiniteUnitarySet clifford_1q();

/// (1/|G|) sum_g U^{(x)t} (x) conj(U)^{(x)t}, dimension n^{2t}.
ComplexMatrix moment_operator(const FiniteUnitarySet& set, int t);

/// Haar moment operator: the Frobenius-orthogonal projector (vectorized,
/// row-major) onto the invariant operators, span{I} for t = 1 and
/// span{I, SWAP} for t = 2.
ComplexMatrix haar_moment_operator(std::size_t n, int t = 2);

enum class Representation { TensorSquare, Conjugation };

/// Dimension of {Z : V_g Z = Z V_g for all g} on n^2 x n^2 matrices, with
/// V_g = U_g (x) U_g (TensorSquare) or V_g = U_g (x) conj(U_g), the action
/// X -> U_g X U_g^dagger on vectorized n x n matrices (Conjugation). Computed
/// as the nullity of the stacked linear system.
std::size_t commutant_dimension(const FiniteUnitarySet& set, Representation rep);

struct LeaveOneOut {
  std::size_t min_rank = 0;
  double sum_norm = 0.0;
};

/// Rank of {U_g H U_g^dagger : g != g0} in the traceless Hermitian space,
/// minimized over g0, and ||sum_g U_g H U_g^dagger||_F.
LeaveOneOut leave_one_out_span(const FiniteUnitarySet& set, const HermitianMatrix& seed);

/// Relative singular-value cutoff for span and nullity computations.
inline constexpr double kRankThreshold = 1e-6;

struct DesignReport {
  int t = 2;
  double moment_deviation = 0.0;
  double t1_moment_deviation = 0.0;
  std::size_t commutant_dim = 0;
  std::size_t conj_commutant_dim = 0;
  std::size_t leave_one_out_min_rank = 0;
  double sum_conjugates_norm = 0.0;
  bool passes = false;
  bool passes_t1 = false;

  nlohmann::json to_json() const;
};

/// Full t = 2 verification. passes <=> moment deviation <= 1e-10 and
/// tensor-square commutant dimension 2; passes_t1 <=> the t = 1 moment
/// deviation is <= 1e-10.
DesignReport verify_design(const FiniteUnitarySet& set, const HermitianMatrix& seed);

}  // namespace mangrad::designs
