#ifndef RPLAB_H
#define RPLAB_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define RPLAB_API __declspec(dllexport)
#else
#define RPLAB_API __attribute__((visibility("default")))
#endif

typedef enum rplab_status {
  RPLAB_OK = 0,
  RPLAB_INVALID_ARGUMENT = 1,
  RPLAB_INVALID_GRID = 2,
  RPLAB_HERMITIAN_PART_NOT_POSITIVE = 3,
  RPLAB_NOT_A_COVARIANCE = 4,
  RPLAB_NO_SPATIAL_AXIS = 5,
  RPLAB_SUPPORT_ERROR = 6,
  RPLAB_ORACLE_TOO_LARGE = 7,
  RPLAB_NO_DECAY = 8,
  RPLAB_GRID_MISMATCH = 9,
  RPLAB_NOT_CONVERGED = 10,
  RPLAB_ZERO_SPACE = 11,
  RPLAB_HAMILTONIAN_UNDEFINED = 12,
  RPLAB_CONFIG_ERROR = 13,
  RPLAB_IO_ERROR = 14,
  RPLAB_INTERNAL_ERROR = 99
} rplab_status;

typedef enum rplab_verdict { RPLAB_PASS = 0, RPLAB_FAIL = 1, RPLAB_NOT_APPLICABLE = 2 } rplab_verdict;

typedef struct rplab_grid rplab_grid;
typedef struct rplab_covariance rplab_covariance;

typedef struct rplab_rp_result {
  rplab_verdict verdict;
  size_t dimension;
  double herm_defect;
  double min_eig;
  double norm;
  double covariance_defect;
  int has_witness;
} rplab_rp_result;

RPLAB_API const char* rplab_version(void);
/// Message of the last failed call on this thread ("" if none).
RPLAB_API const char* rplab_last_error(void);
RPLAB_API const char* rplab_status_name(rplab_status status);

/// axes_json: [{"kind":"line","sites":16,"spacing":0.25}, {"kind":"circle","sites":8,"length":2}]
RPLAB_API rplab_status rplab_grid_create(const char* axes_json, rplab_grid** out);
RPLAB_API void rplab_grid_free(rplab_grid* grid);
RPLAB_API size_t rplab_grid_size(const rplab_grid* grid);
RPLAB_API size_t rplab_grid_dim(const rplab_grid* grid);

/// multiplier_json: {"type":"FreeField","mass":1}, ... (same schema as the run config)
RPLAB_API rplab_status rplab_covariance_create(const rplab_grid* grid, const char* multiplier_json,
                                               rplab_covariance** out);
RPLAB_API void rplab_covariance_free(rplab_covariance* cov);
/// Kernel density between two sites.
RPLAB_API rplab_status rplab_covariance_entry(const rplab_covariance* cov, size_t x, size_t y, double* re, double* im);

/// condition: "TimeRP", "AltTimeRP", "MeasurePositivity", "SpatialRP(j)", "AltSpatialRP(j)", "DoublyRP(j)".
RPLAB_API rplab_status rplab_check(const rplab_covariance* cov, const char* condition, double tol,
                                   rplab_rp_result* out);

RPLAB_API rplab_status rplab_schwinger(const rplab_covariance* cov, const size_t* points, size_t count, double* re,
                                       double* im);

/// Runs a task on a JSON run config. *report receives the JSON report (free with rplab_string_free);
/// *exit_code is 0 iff every verdict passed. out_dir may be NULL or "" to write nothing.
RPLAB_API rplab_status rplab_run(const char* config_json, const char* task, const char* out_dir, int write_json,
                                 int write_csv, char** report, int* exit_code);

RPLAB_API void rplab_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif
