#include <cstdlib>
#include <cstring>
#include <string>

#include "detail/config.hpp"
#include "rplab/error.hpp"
#include "rplab/gaussian.hpp"
#include "rplab/rp_check.hpp"
#include "rplab/rplab.h"
#include "rplab/runner.hpp"

struct rplab_grid {
  rplab::GridPtr grid;
};

struct rplab_covariance {
  rplab::CovarianceOperator D;
};

namespace {

thread_local std::string last_error;

rplab_status code_of(rplab::ErrorCode c) {
  using rplab::ErrorCode;
  switch (c) {
    case ErrorCode::InvalidArgument: return RPLAB_INVALID_ARGUMENT;
    case ErrorCode::InvalidGrid: return RPLAB_INVALID_GRID;
    case ErrorCode::HermitianPartNotPositive: return RPLAB_HERMITIAN_PART_NOT_POSITIVE;
    case ErrorCode::NotACovariance: return RPLAB_NOT_A_COVARIANCE;
    case ErrorCode::NoSpatialAxis: return RPLAB_NO_SPATIAL_AXIS;
    case ErrorCode::SupportError: return RPLAB_SUPPORT_ERROR;
    case ErrorCode::OracleTooLarge: return RPLAB_ORACLE_TOO_LARGE;
    case ErrorCode::NoDecay: return RPLAB_NO_DECAY;
    case ErrorCode::GridMismatch: return RPLAB_GRID_MISMATCH;
    case ErrorCode::NotConverged: return RPLAB_NOT_CONVERGED;
    case ErrorCode::ZeroSpace: return RPLAB_ZERO_SPACE;
    case ErrorCode::HamiltonianUndefined: return RPLAB_HAMILTONIAN_UNDEFINED;
    case ErrorCode::ConfigError: return RPLAB_CONFIG_ERROR;
    case ErrorCode::IoError: return RPLAB_IO_ERROR;
  }
  return RPLAB_INTERNAL_ERROR;
}

template <class F>
rplab_status guarded(F&& f) {
  try {
    f();
    last_error.clear();
    return RPLAB_OK;
  } catch (const rplab::Error& e) {
    last_error = e.what();
    return code_of(e.code());
  } catch (const std::exception& e) {
    last_error = e.what();
    return RPLAB_INTERNAL_ERROR;
  } catch (...) {
    last_error = "unknown exception";
    return RPLAB_INTERNAL_ERROR;
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw rplab::Error(rplab::ErrorCode::InvalidArgument, what);
}

char* duplicate(const std::string& s) {
  auto* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

rplab::detail::json parse_json(const char* text, const char* what) {
  require(text != nullptr, what);
  try {
    return rplab::detail::json::parse(text);
  } catch (const rplab::detail::json::parse_error& e) {
    throw rplab::Error(rplab::ErrorCode::ConfigError, std::string(what) + ": " + e.what());
  }
}

}  // namespace

extern "C" {

const char* rplab_version(void) { return rplab::version_string; }

const char* rplab_last_error(void) { return last_error.c_str(); }

const char* rplab_status_name(rplab_status status) {
  switch (status) {
    case RPLAB_OK: return "Ok";
    case RPLAB_INTERNAL_ERROR: return "InternalError";
    default: break;
  }
  if (status >= RPLAB_INVALID_ARGUMENT && status <= RPLAB_IO_ERROR)
    return rplab::to_string(static_cast<rplab::ErrorCode>(status - 1)).data();
  return "Unknown";
}

rplab_status rplab_grid_create(const char* axes_json, rplab_grid** out) {
  return guarded([&] {
    require(out != nullptr, "null output handle");
    *out = nullptr;
    const auto axes = rplab::detail::parse_axes(parse_json(axes_json, "axes"), "axes");
    *out = new rplab_grid{rplab::build_grid(axes)};
  });
}

void rplab_grid_free(rplab_grid* grid) { delete grid; }

size_t rplab_grid_size(const rplab_grid* grid) { return grid ? grid->grid->size() : 0; }

size_t rplab_grid_dim(const rplab_grid* grid) { return grid ? grid->grid->dim() : 0; }

rplab_status rplab_covariance_create(const rplab_grid* grid, const char* multiplier_json, rplab_covariance** out) {
  return guarded([&] {
    require(out != nullptr && grid != nullptr, "null handle");
    *out = nullptr;
    const auto spec = rplab::detail::parse_multiplier(parse_json(multiplier_json, "multiplier"), "multiplier");
    *out = new rplab_covariance{rplab::kernel(rplab::sample(spec, grid->grid))};
  });
}

void rplab_covariance_free(rplab_covariance* cov) { delete cov; }

rplab_status rplab_covariance_entry(const rplab_covariance* cov, size_t x, size_t y, double* re, double* im) {
  return guarded([&] {
    require(cov && re && im, "null argument");
    const auto n = cov->D.grid()->size();
    require(x < n && y < n, "site out of range");
    const auto v = cov->D.entry(x, y);
    *re = v.real();
    *im = v.imag();
  });
}

rplab_status rplab_check(const rplab_covariance* cov, const char* condition, double tol, rplab_rp_result* out) {
  return guarded([&] {
    require(cov && condition && out, "null argument");
    require(tol > 0.0, "tol must be positive");
    const auto r = rplab::check(rplab::RPCondition::parse(condition), cov->D, tol);
    out->verdict = r.verdict == rplab::Verdict::Pass   ? RPLAB_PASS
                   : r.verdict == rplab::Verdict::Fail ? RPLAB_FAIL
                                                       : RPLAB_NOT_APPLICABLE;
    out->dimension = r.dimension;
    out->herm_defect = r.herm_defect;
    out->min_eig = r.min_eig;
    out->norm = r.norm;
    out->covariance_defect = r.covariance_defect;
    out->has_witness = r.witness.has_value() ? 1 : 0;
  });
}

rplab_status rplab_schwinger(const rplab_covariance* cov, const size_t* points, size_t count, double* re, double* im) {
  return guarded([&] {
    require(cov && re && im && (points || count == 0), "null argument");
    for (size_t i = 0; i < count; ++i) require(points[i] < cov->D.grid()->size(), "site out of range");
    const auto v = rplab::schwinger(cov->D, std::span<const std::size_t>(points, count));
    *re = v.real();
    *im = v.imag();
  });
}

rplab_status rplab_run(const char* config_json, const char* task, const char* out_dir, int write_json, int write_csv,
                       char** report, int* exit_code) {
  return guarded([&] {
    require(config_json && task && report && exit_code, "null argument");
    *report = nullptr;
    rplab::RunOptions opts{task, out_dir ? out_dir : "", write_json != 0, write_csv != 0};
    const auto r = rplab::run(config_json, opts);
    *report = duplicate(r.report);
    *exit_code = r.exit_code;
  });
}

void rplab_string_free(char* s) { std::free(s); }

}  // extern "C"
