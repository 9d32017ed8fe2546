#include "rplab/quantize.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>

#include "rplab/error.hpp"

namespace rplab {

namespace {

std::size_t spatial_count(const SpacetimeGrid& g) { return g.dim() == 1 ? 1 : g.size() / g.extent(0); }

std::vector<double> spatial_momentum(const SpacetimeGrid& g, std::size_t spatial_index) {
  auto k = g.momentum(spatial_index);  // time component index 0
  k.erase(k.begin());
  return k;
}

// singular values of a contraction below this are infinite-energy directions
constexpr double singular_floor = 1e-14;

}  // namespace

std::vector<cplx> reflected_time_kernel(const FourierMultiplier& D, std::size_t spatial_index, std::size_t count) {
  const auto& g = *D.grid;
  if (spatial_index >= spatial_count(g)) throw Error(ErrorCode::InvalidArgument, "spatial momentum out of range");
  const auto& time = g.axis(0);
  const double a0 = time.step();
  std::vector<cplx> out(count);
  if (D.lattice && time.kind == AxisKind::Line) {
    const auto kbar = spatial_momentum(g, spatial_index);
    std::vector<double> k(kbar.size() + 1);
    std::copy(kbar.begin(), kbar.end(), k.begin() + 1);
    auto fn = [&](double k0) {
      k[0] = k0;
      return D.lattice(k);
    };
    const auto table = kernel_1d(AxisSpec::line(static_cast<int>(count), a0), fn);
    for (std::size_t n = 0; n < count; ++n) out[n] = table[count - 1 - n];
    return out;
  }
  // periodic time kernel from the native samples
  const auto n0 = static_cast<std::size_t>(time.sites);
  const std::size_t stride = g.stride(0);
  for (std::size_t n = 0; n < count; ++n) {
    cplx acc{};
    for (std::size_t m = 0; m < n0; ++m)
      acc += D.values[m * stride + spatial_index] * std::polar(1.0, -time.momentum(static_cast<int>(m)) * a0 * n);
    out[n] = acc / (static_cast<double>(n0) * a0);
  }
  return out;
}

Eigen::MatrixXcd gram_from_kernel(std::span<const cplx> reflected, std::size_t slabs, std::size_t shift, double a0) {
  if (2 * slabs + shift > reflected.size()) throw Error(ErrorCode::InvalidArgument, "time kernel too short");
  const auto n = static_cast<Eigen::Index>(slabs);
  Eigen::MatrixXcd G(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) G(i, j) = a0 * reflected[static_cast<std::size_t>(i + j + 1) + shift];
  return G;
}

Eigen::MatrixXcd os_gram(const FourierMultiplier& D, std::size_t spatial_index, std::size_t slabs, std::size_t shift) {
  if (!D.flags.symmetric) throw Error(ErrorCode::NotACovariance, "OS form needs a symmetric covariance");
  const auto K = reflected_time_kernel(D, spatial_index, 2 * slabs + shift);
  return gram_from_kernel(K, slabs, shift, D.grid->axis(0).step());
}

Quotient quotient(const Eigen::MatrixXcd& gram, double rank_tol) {
  const Eigen::MatrixXcd H = 0.5 * (gram + gram.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
  Quotient q;
  q.spectrum = es.eigenvalues();
  const double top = q.spectrum.size() ? q.spectrum.maxCoeff() : 0.0;
  std::vector<Eigen::Index> keep;
  if (top > 0.0)
    for (Eigen::Index i = 0; i < q.spectrum.size(); ++i)
      if (q.spectrum(i) > rank_tol * top) keep.push_back(i);
  if (keep.empty()) throw Error(ErrorCode::ZeroSpace, "OS form vanishes on every positive-time vector");
  q.dimension = keep.size();
  q.vectors.resize(gram.rows(), static_cast<Eigen::Index>(keep.size()));
  q.eigenvalues.resize(static_cast<Eigen::Index>(keep.size()));
  // descending
  for (std::size_t c = 0; c < keep.size(); ++c) {
    const auto src = keep[keep.size() - 1 - c];
    q.vectors.col(static_cast<Eigen::Index>(c)) = es.eigenvectors().col(src);
    q.eigenvalues(static_cast<Eigen::Index>(c)) = q.spectrum(src);
  }
  return q;
}

Eigen::MatrixXcd transfer(const Quotient& q, const Eigen::MatrixXcd& shifted_gram) {
  const Eigen::VectorXd w = q.eigenvalues.cwiseSqrt().cwiseInverse();
  return w.asDiagonal() * (q.vectors.adjoint() * shifted_gram * q.vectors) * w.asDiagonal();
}

Eigen::MatrixXcd transfer(const FourierMultiplier& D, std::size_t spatial_index, int s, std::size_t slabs,
                          double rank_tol) {
  if (s < 0) throw Error(ErrorCode::InvalidArgument, "time translation must map positive times into positive times");
  const auto q = quotient(os_gram(D, spatial_index, slabs), rank_tol);
  return transfer(q, os_gram(D, spatial_index, slabs, static_cast<std::size_t>(s)));
}

Hamiltonian hamiltonian(const Eigen::MatrixXcd& R1, double a0) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(R1);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s.minCoeff() <= singular_floor)
    throw Error(ErrorCode::HamiltonianUndefined, "R(1) is singular");
  Hamiltonian h;
  h.eigenvalues.resize(s.size());
  // singular values come descending; energies ascending
  for (Eigen::Index i = 0; i < s.size(); ++i) h.eigenvalues(i) = -std::log(s(i)) / a0;
  const double norm = R1.norm();
  h.anti_hermitian_defect = norm > 0.0 ? (R1 - R1.adjoint()).norm() / norm : 0.0;
  return h;
}

OSQuantization quantize_block(const FourierMultiplier& D, std::size_t spatial_index, const QuantizeOptions& opts) {
  if (!D.flags.symmetric) throw Error(ErrorCode::NotACovariance, "OS form needs a symmetric covariance");
  const auto& g = *D.grid;
  const double a0 = g.axis(0).step();
  OSQuantization out;
  out.spatial_index = spatial_index;
  out.kbar = spatial_momentum(g, spatial_index);
  out.slabs = opts.slabs ? opts.slabs : static_cast<std::size_t>(g.extent(0) / 2);
  const auto K = reflected_time_kernel(D, spatial_index, 2 * out.slabs + 3);
  std::vector<Eigen::MatrixXcd> G;
  for (std::size_t s = 0; s <= 3; ++s) G.push_back(gram_from_kernel(K, out.slabs, s, a0));

  const double gn = G[0].norm();
  out.gram_herm_defect = gn > 0.0 ? (G[0] - G[0].adjoint()).norm() / gn : 0.0;
  const auto q = quotient(G[0], opts.rank_tol);
  out.gram_min_eig = q.spectrum(0) / q.spectrum(q.spectrum.size() - 1);
  out.quotient_dim = q.dimension;
  const auto R1 = transfer(q, G[1]), R2 = transfer(q, G[2]), R3 = transfer(q, G[3]);
  out.R1_norm = Eigen::JacobiSVD<Eigen::MatrixXcd>(R1).singularValues()(0);
  const double n3 = R3.norm();
  out.semigroup_defect = n3 > 0.0 ? (R1 * R2 - R3).norm() / n3 : (R1 * R2).norm();
  out.h = hamiltonian(R1, a0);
  out.min_h = out.h.eigenvalues.minCoeff();
  if (opts.mass) {
    double k2 = *opts.mass * *opts.mass;
    for (double k : out.kbar) k2 += k * k;
    out.dispersion_ref = std::sqrt(k2);
    out.rel_error = std::abs(out.min_h - *out.dispersion_ref) / *out.dispersion_ref;
  }
  return out;
}

std::vector<OSQuantization> quantize(const FourierMultiplier& D, const QuantizeOptions& opts) {
  std::vector<OSQuantization> out;
  const std::size_t n = spatial_count(*D.grid);
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(quantize_block(D, i, opts));
  return out;
}

}  // namespace rplab
