/* C interface to the naming-game library.  Every function returns an
 * ngame_code; on failure ngame_last_error() describes the problem (per thread).
 * Strings returned through char** are owned by the caller and released with
 * ngame_string_free. */
#ifndef NGAME_H
#define NGAME_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ngame_code {
  NGAME_OK = 0,
  NGAME_INVALID_STATE = 1,
  NGAME_CONTRACT_VIOLATION = 2,
  NGAME_RESOURCE_LIMIT = 3,
  NGAME_INFEASIBLE_SCENARIO = 4,
  NGAME_STIFFNESS = 5,
  NGAME_CONFIG = 6,
  NGAME_IO = 7,
  NGAME_SCHEMA_MISMATCH = 8,
  NGAME_INTERNAL = 99
} ngame_code;

typedef enum ngame_variant { NGAME_ORIGINAL = 0, NGAME_LISTENER_ONLY = 1 } ngame_variant;

typedef struct ngame_config ngame_config;
typedef struct ngame_result ngame_result;
typedef struct ngame_system ngame_system;

const char* ngame_version(void);
const char* ngame_last_error(void);
/* Process exit status for an error code: 2 config, 3 infeasible, 1 other. */
int ngame_exit_status(int code);
void ngame_string_free(char* s);

/* Known config keys as a JSON array of {"key", "type", "choices"}. */
int ngame_config_schema(char** json_out);
/* `base` may be a config or a run's metadata file; keys in `overrides` (a JSON
 * object, may be NULL) replace those of the base before validation. */
int ngame_config_parse(const char* base, const char* overrides, ngame_config** out);
int ngame_config_to_json(const ngame_config* config, char** json_out);
void ngame_config_free(ngame_config* config);

int ngame_run(const ngame_config* config, ngame_result** out);
/* 0, or 4 when some steady state did not converge (outputs still written). */
int ngame_result_status(const ngame_result* result);
size_t ngame_result_warning_count(const ngame_result* result);
const char* ngame_result_warning(const ngame_result* result, size_t index);
size_t ngame_result_output_count(const ngame_result* result);
const char* ngame_result_output(const ngame_result* result, size_t index);
const char* ngame_result_metadata(const ngame_result* result);
void ngame_result_free(ngame_result* result);

/* Renders a CSV to SVG; warnings come back as a JSON array of strings. */
int ngame_render(const char* csv_path, const char* svg_path, char** warnings_json);

/* Mean-field system over all 2^m - 1 uncommitted states. */
int ngame_meanfield_create(int m, const double* committed, ngame_variant variant, ngame_system** out);
size_t ngame_meanfield_dimension(const ngame_system* system);
int ngame_meanfield_rhs(const ngame_system* system, const double* x, double* dxdt);
/* Steady state from pure-state initial densities x0 (length m); writes the
 * supports n_i (length m). */
int ngame_meanfield_steady(const ngame_system* system, const double* x0, double eps, double t_max, double* n_out,
                           int* converged);
void ngame_meanfield_free(ngame_system* system);

#ifdef __cplusplus
}
#endif

#endif
