#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "rplab/gaussian.hpp"
#include "rplab/multiplier.hpp"
#include "rplab/rp_check.hpp"

namespace rplab {

/// Two-component field with covariance [[0, D], [D^T, 0]] on L2 + L2 (charge-major order).
/// D is the (+,-) two-point kernel with symbol sigma_+(k) sigma_-(-k).
struct ChargedCovariance {
  FourierMultiplier sigma_plus;
  FourierMultiplier sigma_minus;
  FourierMultiplier symbol;
  CovarianceOperator D;
  CovarianceOperator DT;

  /// [[0, D], [D^T, 0]] with entries vol * K
  Eigen::MatrixXcd block_matrix() const;
  /// C D = [[D^T, 0], [0, D]]
  Eigen::MatrixXcd conjugated_block_matrix() const;
  /// Two-point function on the doubled index c * N + x (c = 0 for +, 1 for -).
  TwoPoint two_point() const;
};

ChargedCovariance build_charged(const FourierMultiplier& sigma_plus, const FourierMultiplier& sigma_minus);
/// sigma_pm = D_pm^{1/2} from two covariance specs.
ChargedCovariance build_charged(const MultiplierSpec& plus, const MultiplierSpec& minus, GridPtr grid);

struct ChargedTestFunction {
  std::vector<cplx> plus;
  std::vector<cplx> minus;
};

/// Charge conjugation (f+, f-) -> (f-, f+).
ChargedTestFunction charge_conjugate(const ChargedTestFunction& f);

struct ChargedCharacteristic {
  cplx value;        // exp(-<conj f+, D f->)
  cplx matrix_form;  // exp(-1/2 <conj F, D F>) with the block matrix
  double defect = 0.0;
};

ChargedCharacteristic charged_characteristic(const ChargedCovariance& C, const ChargedTestFunction& f);

enum class ChargedConditionKind { Measure, TimeRP, AltTimeRP, SpatialRP, AltSpatialRP };

struct ChargedCondition {
  ChargedConditionKind kind = ChargedConditionKind::TimeRP;
  std::size_t axis = 0;
  std::string id() const;
  static ChargedCondition parse(const std::string& id);
};

struct ChargedReport {
  ChargedCondition condition;
  RPReport transposed_block;  // acts on the + component: D^T
  RPReport direct_block;      // acts on the - component: D
  Verdict verdict = Verdict::NotApplicable;
  /// "+" or "-" when a block failed and produced a witness.
  std::string witness_block;
};

ChargedReport check_charged(const ChargedCondition& condition, const ChargedCovariance& C, double tol = 1e-10);

/// max over k of |conj(sigma_pm(-pi_j k)) - sigma_mp(k)| over both pairings.
double charged_reflection_covariance_defect(const FourierMultiplier& sigma_plus, const FourierMultiplier& sigma_minus,
                                            std::size_t axis);

}  // namespace rplab
