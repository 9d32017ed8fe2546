#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <vector>

#include "rplab/multiplier.hpp"

namespace rplab {

/// Reflected time kernel K(-n a0), n = 0..count-1, of the block at one spatial momentum
/// (index into grid.spatial(); 0 for d = 1).
std::vector<cplx> reflected_time_kernel(const FourierMultiplier& D, std::size_t spatial_index, std::size_t count);

/// G_ij = a0 K(-(i + j + 1 + shift)) over positive-time slabs i, j < slabs.
Eigen::MatrixXcd gram_from_kernel(std::span<const cplx> reflected, std::size_t slabs, std::size_t shift, double a0);

/// OS form <F_i, T(shift) F_j> at a spatial momentum. Throws NotACovariance for non-symmetric D.
Eigen::MatrixXcd os_gram(const FourierMultiplier& D, std::size_t spatial_index, std::size_t slabs,
                         std::size_t shift = 0);

struct Quotient {
  Eigen::MatrixXcd vectors;       // retained eigenvectors (columns)
  Eigen::VectorXd eigenvalues;    // retained eigenvalues
  Eigen::VectorXd spectrum;       // all eigenvalues of the hermitian part, ascending
  std::size_t dimension = 0;
};

/// Retains eigenpairs with lambda > rank_tol * lambda_max; throws ZeroSpace if none.
Quotient quotient(const Eigen::MatrixXcd& gram, double rank_tol = 1e-10);

/// Lambda^{-1/2} U^H G(s) U Lambda^{-1/2}
Eigen::MatrixXcd transfer(const Quotient& q, const Eigen::MatrixXcd& shifted_gram);
/// R(s) at a spatial momentum; s < 0 is rejected.
Eigen::MatrixXcd transfer(const FourierMultiplier& D, std::size_t spatial_index, int s, std::size_t slabs,
                          double rank_tol = 1e-10);

struct Hamiltonian {
  Eigen::VectorXd eigenvalues;  // ascending
  double anti_hermitian_defect = 0.0;  // ||R - R^H|| / ||R||
};

/// h = -(1/a0) log of the hermitian polar factor of R(1). Throws HamiltonianUndefined if R(1) is singular.
Hamiltonian hamiltonian(const Eigen::MatrixXcd& R1, double a0);

struct QuantizeOptions {
  std::size_t slabs = 0;  // 0: every positive-time site
  double rank_tol = 1e-10;
  std::optional<double> mass;  // reference for the dispersion sqrt(kbar^2 + m^2)
};

struct OSQuantization {
  std::size_t spatial_index = 0;
  std::vector<double> kbar;
  std::size_t slabs = 0;
  double gram_herm_defect = 0.0;
  double gram_min_eig = 0.0;  // relative to the largest eigenvalue
  std::size_t quotient_dim = 0;
  double R1_norm = 0.0;
  double semigroup_defect = 0.0;  // ||R(1)R(2) - R(3)|| / ||R(3)||
  Hamiltonian h;
  double min_h = 0.0;
  std::optional<double> dispersion_ref;
  std::optional<double> rel_error;  // |min_h - ref| / ref
};

OSQuantization quantize_block(const FourierMultiplier& D, std::size_t spatial_index, const QuantizeOptions& opts = {});
/// Every spatial momentum, ordered by index.
std::vector<OSQuantization> quantize(const FourierMultiplier& D, const QuantizeOptions& opts = {});

}  // namespace rplab
