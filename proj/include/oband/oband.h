#ifndef OBAND_OBAND_H
#define OBAND_OBAND_H

#include <stddef.h>

#if defined(_WIN32)
#  if defined(OBAND_BUILDING_LIBRARY)
#    define OBAND_API __declspec(dllexport)
#  else
#    define OBAND_API __declspec(dllimport)
#  endif
#else
#  define OBAND_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum oband_status {
    OBAND_OK = 0,
    OBAND_E_VALIDATION = 1,
    OBAND_E_NUMERIC = 2,
    OBAND_E_BUDGET = 3,
    OBAND_E_IO = 4,
    OBAND_E_ARGUMENT = 5,
    OBAND_E_INTERNAL = 6
} oband_status;

typedef enum oband_format { OBAND_FORMAT_CSV = 0, OBAND_FORMAT_JSON = 1 } oband_format;

typedef enum oband_log_level {
    OBAND_LOG_ERROR = 0,
    OBAND_LOG_WARN = 1,
    OBAND_LOG_INFO = 2,
    OBAND_LOG_DEBUG = 3
} oband_log_level;

typedef struct oband_system oband_system;
typedef struct oband_report oband_report;

OBAND_API const char* oband_version(void);
OBAND_API const char* oband_status_name(oband_status s);

/* Message and JSON pointer of the last failure on the calling thread. */
OBAND_API const char* oband_last_error(void);
OBAND_API const char* oband_last_error_field(void);

OBAND_API void oband_set_log_level(oband_log_level level);

OBAND_API oband_status oband_system_load(const char* path, oband_system** out);
OBAND_API oband_status oband_system_parse(const char* json_text, oband_system** out);
OBAND_API void oband_system_free(oband_system* sys);

OBAND_API oband_status oband_system_channel_count(const oband_system* sys, size_t* out);
OBAND_API oband_status oband_system_set_threads(oband_system* sys, int threads);
OBAND_API oband_status oband_system_set_spans(oband_system* sys, int n_spans);
/* Oracle resolution: midpoint samples per channel bandwidth and z steps per km.
   Zero keeps the configured value. */
OBAND_API oband_status oband_system_set_oracle_resolution(oband_system* sys, int samples_per_channel,
                                                          double z_steps_per_km);

/* Diagnostics report (columns line, field, message). Returns
   OBAND_E_VALIDATION when there is at least one diagnostic and OBAND_E_IO when
   the file cannot be read; *out is set in both cases when possible. */
OBAND_API oband_status oband_validate_file(const char* path, oband_report** out);

/* Channel indices are 0-based; pass NULL/0 for all channels. */
OBAND_API oband_status oband_fit(const oband_system* sys, oband_report** out);
OBAND_API oband_status oband_estimate(const oband_system* sys, const size_t* channels, size_t n_channels,
                                      oband_report** out);
OBAND_API oband_status oband_oracle(const oband_system* sys, const size_t* channels, size_t n_channels,
                                    oband_report** out);
OBAND_API oband_status oband_compare(const oband_system* sys, const size_t* channels, size_t n_channels,
                                     oband_report** out);
/* axis: "spans", "bandwidth" (Hz) or "power" (dBm). */
OBAND_API oband_status oband_sweep(const oband_system* sys, const char* axis, const double* values,
                                   size_t n_values, int compare, const size_t* channels, size_t n_channels,
                                   oband_report** out);

OBAND_API size_t oband_report_rows(const oband_report* r);
OBAND_API size_t oband_report_columns(const oband_report* r);
OBAND_API const char* oband_report_kind(const oband_report* r);
OBAND_API const char* oband_report_column_name(const oband_report* r, size_t column);
/* Numeric cell value; NaN for nulls and text. */
OBAND_API oband_status oband_report_value(const oband_report* r, size_t row, size_t column, double* out);
/* Summary entry by key (compare reports carry mean_abs_db, max_abs_db, ...). */
OBAND_API oband_status oband_report_summary(const oband_report* r, const char* key, double* out);
/* Rendered report; release with oband_string_free. */
OBAND_API oband_status oband_report_render(const oband_report* r, oband_format format, char** out);
OBAND_API oband_status oband_report_write(const oband_report* r, const char* path, oband_format format);
OBAND_API void oband_report_free(oband_report* r);
OBAND_API void oband_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif
