#include "mangrad/designs.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "mangrad/errors.hpp"

namespace mangrad::designs {

using linalg::Complex;

FiniteUnitarySet::FiniteUnitarySet(std::size_t n, std::vector<ComplexMatrix> elements)
    : n_(n), elements_(std::move(elements)) {
  if (n_ == 0) throw UsageError("FiniteUnitarySet: n must be positive");
  if (elements_.empty()) throw UsageError("FiniteUnitarySet: set is empty");
  for (std::size_t k = 0; k < elements_.size(); ++k) {
    if (elements_[k].dim() != n_) {
      std::ostringstream msg;
      msg << "FiniteUnitarySet: element " << k << " has dimension " << elements_[k].dim();
      throw UsageError(msg.str());
    }
    const double defect = linalg::unitarity_defect(elements_[k]);
    if (!(defect <= 1e-10)) {
      std::ostringstream msg;
      msg << "FiniteUnitarySet: element " << k << " is not unitary (defect " << defect << ")";
      throw UsageError(msg.str());
    }
  }
}

FiniteUnitarySet FiniteUnitarySet::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("n") || !j.contains("elements"))
    throw UsageError("unitary set JSON needs keys \"n\" and \"elements\"");
  for (const auto& [key, value] : j.items())
    if (key != "n" && key != "elements")
      throw UsageError("unitary set JSON: unknown key \"" + key + "\"");
  if (!j["n"].is_number_integer() || j["n"].get<long long>() < 1)
    throw UsageError("unitary set JSON: \"n\" must be a positive integer");
  const auto n = j["n"].get<std::size_t>();
  if (!j["elements"].is_array()) throw UsageError("unitary set JSON: \"elements\" must be an array");
  std::vector<ComplexMatrix> elements;
  for (const auto& el : j["elements"]) {
    if (!el.is_array() || el.size() != n * n)
      throw UsageError("unitary set JSON: each element needs n^2 [re, im] entries");
    std::vector<Complex> entries;
    entries.reserve(n * n);
    for (const auto& z : el) {
      if (!z.is_array() || z.size() != 2 || !z[0].is_number() || !z[1].is_number())
        throw UsageError("unitary set JSON: entries must be [re, im] number pairs");
      entries.emplace_back(z[0].get<double>(), z[1].get<double>());
    }
    elements.emplace_back(n, std::move(entries));
  }
  return FiniteUnitarySet(n, std::move(elements));
}

FiniteUnitarySet FiniteUnitarySet::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open unitary set file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("unitary set file " + path + ": " + e.what());
  }
  return from_json(j);
}

nlohmann::json FiniteUnitarySet::to_json() const {
  nlohmann::json elements = nlohmann::json::array();
  for (const auto& u : elements_) {
    nlohmann::json flat = nlohmann::json::array();
    for (const auto& z : u.entries()) flat.push_back({z.real(), z.imag()});
    elements.push_back(std::move(flat));
  }
  return {{"n", n_}, {"elements", std::move(elements)}};
}

bool equal_up_to_phase(const ComplexMatrix& a, const ComplexMatrix& b, double tol) {
  if (a.dim() != b.dim()) return false;
  auto ea = a.entries();
  auto eb = b.entries();
  std::size_t k = 0;
  for (std::size_t i = 1; i < eb.size(); ++i)
    if (std::abs(eb[i]) > std::abs(eb[k])) k = i;
  if (std::abs(eb[k]) == 0.0) return a.frobenius_norm() <= tol;
  const Complex phase = ea[k] / eb[k];
  if (std::abs(std::abs(phase) - 1.0) > tol) return false;
  return (a - b * phase).frobenius_norm() <= tol;
}

namespace {

ComplexMatrix with_unit_determinant(ComplexMatrix u) {
  const Complex det = linalg::determinant(u);
  u *= std::pow(det, -1.0 / static_cast<double>(u.dim()));
  return u;
}

}  // namespace

FiniteUnitarySet clifford_1q() {
  const double r = 1.0 / std::sqrt(2.0);
  const ComplexMatrix hadamard =
      with_unit_determinant(ComplexMatrix::from_rows({{r, r}, {r, -r}}));
  const ComplexMatrix phase_gate =
      with_unit_determinant(ComplexMatrix::from_rows({{1.0, 0.0}, {0.0, Complex{0.0, 1.0}}}));
  std::vector<ComplexMatrix> group{ComplexMatrix::identity(2)};
  for (std::size_t head = 0; head < group.size(); ++head) {
    for (const auto* gen : {&hadamard, &phase_gate}) {
      ComplexMatrix candidate = with_unit_determinant(*gen * group[head]);
      bool seen = false;
      for (const auto& g : group)
        if (equal_up_to_phase(candidate, g)) {
          seen = true;
          break;
        }
      if (!seen) group.push_back(std::move(candidate));
    }
  }
  return FiniteUnitarySet(2, std::move(group));
}

namespace {

ComplexMatrix tensor_power(const ComplexMatrix& u, int t) {
  return t == 1 ? u : linalg::kron(u, u);
}

void require_moment_size(std::size_t n, int t) {
  if (t != 1 && t != 2) throw UsageError("moment operators support t in {1, 2}");
  const std::size_t size = t == 1 ? n * n : n * n * n * n;
  if (size > 4096) throw CapabilityError("moment operator dimension exceeds 4096");
}

}  // namespace

ComplexMatrix moment_operator(const FiniteUnitarySet& set, int t) {
  require_moment_size(set.n(), t);
  ComplexMatrix sum;
  for (const auto& u : set.elements()) {
    const ComplexMatrix ut = tensor_power(u, t);
    ComplexMatrix term = linalg::kron(ut, ut.conjugate());
    if (sum.dim() == 0)
      sum = std::move(term);
    else
      sum += term;
  }
  return sum * Complex{1.0 / static_cast<double>(set.size()), 0.0};
}

ComplexMatrix haar_moment_operator(std::size_t n, int t) {
  require_moment_size(n, t);
  const std::size_t m = t == 1 ? n : n * n;
  // Row-major vectorizations of an orthonormal basis of the invariants.
  std::vector<std::vector<Complex>> basis;
  const double dn = static_cast<double>(n);
  if (t == 1) {
    std::vector<Complex> v(m * m);
    for (std::size_t i = 0; i < m; ++i) v[i * m + i] = 1.0 / std::sqrt(dn);
    basis.push_back(std::move(v));
  } else {
    std::vector<Complex> e1(m * m), e2(m * m);
    const double swap_norm = std::sqrt(dn * dn - 1.0);
    for (std::size_t i = 0; i < m; ++i) e1[i * m + i] = 1.0 / dn;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) e2[(i * n + j) * m + (j * n + i)] += 1.0 / swap_norm;
    // e2 = (SWAP - I/n) / sqrt(n^2 - 1)
    for (std::size_t i = 0; i < m; ++i) e2[i * m + i] -= 1.0 / (dn * swap_norm);
    basis.push_back(std::move(e1));
    basis.push_back(std::move(e2));
  }
  ComplexMatrix p(m * m);
  for (const auto& v : basis)
    for (std::size_t r = 0; r < v.size(); ++r) {
      if (v[r] == Complex{}) continue;
      for (std::size_t c = 0; c < v.size(); ++c) p(r, c) += v[r] * std::conj(v[c]);
    }
  return p;
}

std::size_t commutant_dimension(const FiniteUnitarySet& set, Representation rep) {
  const std::size_t m = set.n() * set.n();
  const std::size_t unknowns = m * m;
  if (unknowns > 256) throw CapabilityError("commutant computation supports at most 256 unknowns");
  const ComplexMatrix id = ComplexMatrix::identity(m);
  ComplexMatrix gram(unknowns);
  for (const auto& u : set.elements()) {
    // Conjugation X -> U X U^dagger is U (x) conj(U) on row-major vec(X).
    const ComplexMatrix v =
        linalg::kron(u, rep == Representation::TensorSquare ? u : u.conjugate());
    // vec(V Z - Z V) = (V (x) I - I (x) V^T) vec(Z) for row-major vec.
    const ComplexMatrix k = linalg::kron(v, id) - linalg::kron(id, v.transpose());
    gram += k.adjoint() * k;
  }
  const auto rank = linalg::rank_from_gram(HermitianMatrix::symmetrized(gram), kRankThreshold);
  return unknowns - rank;
}

LeaveOneOut leave_one_out_span(const FiniteUnitarySet& set, const HermitianMatrix& seed) {
  const std::size_t n = set.n();
  if (seed.dim() != n) throw UsageError("leave_one_out_span: seed dimension mismatch");
  const double scale = seed.matrix().frobenius_norm();
  if (scale == 0.0) throw UsageError("leave_one_out_span: seed must be nonzero");
  if (std::abs(seed.matrix().trace()) > 1e-12 * scale)
    throw UsageError("leave_one_out_span: seed must be traceless");

  const auto basis = linalg::traceless_hermitian_basis(n);
  const std::size_t d = basis.size();
  std::vector<std::vector<double>> coords;
  ComplexMatrix sum(n);
  for (const auto& u : set.elements()) {
    const ComplexMatrix conj = u * seed.matrix() * u.adjoint();
    sum += conj;
    std::vector<double> c(d);
    for (std::size_t k = 0; k < d; ++k) c[k] = linalg::frobenius_inner(basis[k], conj).real();
    coords.push_back(std::move(c));
  }

  LeaveOneOut out;
  out.sum_norm = sum.frobenius_norm();
  out.min_rank = d;
  for (std::size_t removed = 0; removed < coords.size(); ++removed) {
    ComplexMatrix gram(d);
    for (std::size_t g = 0; g < coords.size(); ++g) {
      if (g == removed) continue;
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) gram(i, j) += coords[g][i] * coords[g][j];
    }
    out.min_rank = std::min(out.min_rank,
                            linalg::rank_from_gram(HermitianMatrix::symmetrized(gram), kRankThreshold));
  }
  return out;
}

nlohmann::json DesignReport::to_json() const {
  return {{"t", t},
          {"moment_deviation", moment_deviation},
          {"t1_moment_deviation", t1_moment_deviation},
          {"commutant_dim", commutant_dim},
          {"conj_commutant_dim", conj_commutant_dim},
          {"leave_one_out_min_rank", leave_one_out_min_rank},
          {"sum_conjugates_norm", sum_conjugates_norm},
          {"passes", passes},
          {"passes_t1", passes_t1}};
}

DesignReport verify_design(const FiniteUnitarySet& set, const HermitianMatrix& seed) {
  DesignReport report;
  report.t = 2;
  report.moment_deviation =
      (moment_operator(set, 2) - haar_moment_operator(set.n(), 2)).frobenius_norm();
  report.t1_moment_deviation =
      (moment_operator(set, 1) - haar_moment_operator(set.n(), 1)).frobenius_norm();
  report.commutant_dim = commutant_dimension(set, Representation::TensorSquare);
  report.conj_commutant_dim = commutant_dimension(set, Representation::Conjugation);
  const auto loo = leave_one_out_span(set, seed);
  report.leave_one_out_min_rank = loo.min_rank;
  report.sum_conjugates_norm = loo.sum_norm;
  report.passes = report.moment_deviation <= 1e-10 && report.commutant_dim == 2;
  report.passes_t1 = report.t1_moment_deviation <= 1e-10;
  return report;
}

}  // namespace mangrad::designs
