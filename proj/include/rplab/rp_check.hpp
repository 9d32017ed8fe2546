#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rplab/multiplier.hpp"

namespace rplab {

enum class ConditionKind { MeasurePositivity, TimeRP, AltTimeRP, SpatialRP, AltSpatialRP, DoublyRP };

struct RPCondition {
  ConditionKind kind = ConditionKind::TimeRP;
  std::size_t axis = 0;

  /// "TimeRP", "SpatialRP(1)", ...
  std::string id() const;
  /// Inverse of id(); throws ConfigError.
  static RPCondition parse(const std::string& id);
};

enum class Verdict { Pass, Fail, NotApplicable };
std::string_view to_string(Verdict v) noexcept;

struct Witness {
  std::vector<cplx> field;  // supported in the positive half along the checked axis
  cplx value;               // <f, theta D f> (or <f, D theta f> for the alternative ordering)
};

struct RPReport {
  RPCondition condition;
  std::size_t dimension = 0;
  double herm_defect = 0.0;
  double min_eig = 0.0;
  double norm = 0.0;
  double tol = 0.0;
  /// Kernel-level reflection covariance defect max|K(pi d) - conj K(-d)| / max|K|.
  double covariance_defect = 0.0;
  Verdict verdict = Verdict::NotApplicable;
  std::optional<Witness> witness;
  std::string note;
};

/// P+ pi_j D P+ (alt = false) or P+ D pi_j P+ (alt = true) on the j-positive sites,
/// with entries vol * K(pi x - y), resp. vol * K(x - pi y).
Eigen::MatrixXcd compressed_matrix(const CovarianceOperator& D, std::size_t axis, bool alt);

/// Verdict on a square matrix: hermiticity defect <= tol and min eig of the hermitian part >= -tol ||A||.
RPReport assess(const Eigen::MatrixXcd& A, double tol);

double kernel_reflection_covariance_defect(const CovarianceOperator& D, std::size_t axis);

/// Runs one condition. Throws NotACovariance when D is not even.
RPReport check(const RPCondition& condition, const CovarianceOperator& D, double tol = 1e-10);
/// Same without the evenness precondition (used for the blocks of charged covariances).
RPReport check_unchecked(const RPCondition& condition, const CovarianceOperator& D, double tol = 1e-10);

/// Negative direction of the compressed form, embedded as a lattice field.
std::optional<Witness> find_witness(const CovarianceOperator& D, std::size_t axis, double tol = 1e-10, bool alt = false);
/// Direct recomputation of <f, theta D f> (alt: <f, D theta f>) from the operator.
cplx reflected_form(const CovarianceOperator& D, std::size_t axis, std::span<const cplx> f, std::span<const cplx> g,
                    bool alt = false);

/// M_{jj'} = S(f_{j'} - theta conj f_j) with S(g) = exp(-1/2 <conj g, D g>).
Eigen::MatrixXcd build_M(const CovarianceOperator& D, std::size_t axis, const std::vector<std::vector<cplx>>& fs);

/// k_{jj'} = <f_j, theta D f_{j'}>
Eigen::MatrixXcd k_matrix(const CovarianceOperator& D, std::size_t axis, const std::vector<std::vector<cplx>>& fs);

struct GaussianIdentity {
  cplx lhs;  // sum conj(c_j) c_j' M_jj'
  cplx rhs;  // sum conj(d_j) d_j' exp(k_jj')
  double defect = 0.0;
  double covariance_defect = 0.0;
};

GaussianIdentity verify_gaussian_identity(const CovarianceOperator& D, std::size_t axis,
                                          const std::vector<std::vector<cplx>>& fs, std::span<const cplx> cs);

struct KBound {
  double min_eig = 0.0;        // of the hermitian part of exp o k
  double min_eig_k = 0.0;      // of the hermitian part of k
  double min_eig_excess = 0.0; // of exp o k - J (always >= 0 when k >= 0)
  double schur_bound = 0.0;    // lambda_min(k) (e^delta - 1)/delta, delta = min diag k
  bool pass = false;           // min_eig >= 1 - tol
};

KBound check_K_geq_I(const CovarianceOperator& D, std::size_t axis, const std::vector<std::vector<cplx>>& fs,
                     double tol = 1e-8);

struct Equivalence {
  RPReport reflected_first;  // 0 <= pi D
  RPReport reflected_last;   // 0 <= D pi
  bool agree = false;
  double identity_defect = 0.0;  // ||B - conj(A)|| / ||A||
  Verdict verdict = Verdict::NotApplicable;
};

Equivalence check_equivalence(const CovarianceOperator& D, std::size_t axis, double tol = 1e-10);

struct MMatrixPositivity {
  bool positive = true;
  double min_eig = 0.0;  // smallest normalized eigenvalue seen
  int draws = 0;
  std::uint64_t seed = 0;
};

/// PSD of M over random test-function draws plus a two-point probe along the
/// most negative direction of the compressed form.
MMatrixPositivity m_matrix_positivity(const CovarianceOperator& D, std::size_t axis, int draws, std::uint64_t seed,
                                      double tol = 1e-10);

}  // namespace rplab
