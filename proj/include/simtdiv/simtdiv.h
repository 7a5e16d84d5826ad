#ifndef SIMTDIV_SIMTDIV_H_
#define SIMTDIV_SIMTDIV_H_

/*
 * C interface to the simtdiv warp-divergence emulator.
 *
 * All objects are opaque handles created by a *_create / *_builtin / *_parse
 * call and released with the matching *_free. Functions returning
 * simtdiv_status leave a thread-local message in simtdiv_last_error() on
 * failure. Strings returned through char** are heap-allocated and must be
 * released with simtdiv_string_free().
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(SIMTDIV_BUILDING_LIBRARY)
#    define SIMTDIV_API __declspec(dllexport)
#  else
#    define SIMTDIV_API __declspec(dllimport)
#  endif
#else
#  define SIMTDIV_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

#define SIMTDIV_WARP_SIZE 32

typedef struct simtdiv_program simtdiv_program;
typedef struct simtdiv_profile simtdiv_profile;
typedef struct simtdiv_launch simtdiv_launch;
typedef struct simtdiv_result simtdiv_result;

typedef enum simtdiv_status {
  SIMTDIV_OK = 0,
  SIMTDIV_ERR_INVALID_ARGUMENT = 1, /* null handle, bad enum, bad length */
  SIMTDIV_ERR_PARSE = 2,            /* malformed assembly text */
  SIMTDIV_ERR_PROGRAM = 3,          /* structurally invalid program */
  SIMTDIV_ERR_MODEL = 4,            /* divergence-model violation */
  SIMTDIV_ERR_BUDGET = 5,           /* instruction budget exhausted */
  SIMTDIV_ERR_CONFIG = 6,           /* bad profile, launch or range */
  SIMTDIV_ERR_IO = 7,
  SIMTDIV_ERR_NOT_FOUND = 8,        /* no such profile, base constant, fit */
  SIMTDIV_ERR_INTERNAL = 9
} simtdiv_status;

typedef enum simtdiv_kernel {
  SIMTDIV_KERNEL_SINGLE_LOOP = 0,
  SIMTDIV_KERNEL_DOUBLE_LOOP = 1,
  SIMTDIV_KERNEL_SINGLE_LOOP_INSTRUMENTED = 2
} simtdiv_kernel;

typedef enum simtdiv_format {
  SIMTDIV_FORMAT_CSV = 0,
  SIMTDIV_FORMAT_JSONL = 1
} simtdiv_format;

typedef struct simtdiv_counters {
  uint64_t sync_pushes;
  uint64_t div_pushes;
  uint64_t sync_pops;
  uint64_t div_pops;
  uint64_t spill_stores;
  uint64_t spill_loads;
  uint64_t executed_instructions;
  uint64_t executed_branches;
  uint64_t max_depth;
  uint64_t total_cycles; /* emulator timeline, not the calibrated prediction */
  uint32_t final_mask;
} simtdiv_counters;

SIMTDIV_API const char* simtdiv_version(void);
SIMTDIV_API const char* simtdiv_last_error(void);
SIMTDIV_API const char* simtdiv_status_name(simtdiv_status status);
SIMTDIV_API void simtdiv_string_free(char* str);

/* "single", "double", "instrumented". */
SIMTDIV_API simtdiv_status simtdiv_kernel_from_name(const char* name,
                                                    simtdiv_kernel* out);
SIMTDIV_API const char* simtdiv_kernel_name(simtdiv_kernel kernel);

/* Programs */

SIMTDIV_API simtdiv_status simtdiv_program_builtin(simtdiv_kernel kernel,
                                                   simtdiv_program** out);
SIMTDIV_API simtdiv_status simtdiv_program_parse(const char* text,
                                                 simtdiv_program** out);
SIMTDIV_API simtdiv_status simtdiv_program_load(const char* path,
                                                simtdiv_program** out);
SIMTDIV_API simtdiv_status simtdiv_program_format(const simtdiv_program* program,
                                                  char** out);
SIMTDIV_API size_t simtdiv_program_size(const simtdiv_program* program);
SIMTDIV_API void simtdiv_program_free(simtdiv_program* program);

/* Architecture profiles */

SIMTDIV_API simtdiv_status simtdiv_profile_builtin(const char* name,
                                                   simtdiv_profile** out);
SIMTDIV_API simtdiv_status simtdiv_profile_parse(const char* text,
                                                 simtdiv_profile** out);
SIMTDIV_API simtdiv_status simtdiv_profile_load(const char* path,
                                                simtdiv_profile** out);
/* capacity 0 selects an unbounded on-chip stack (spilling disabled). */
SIMTDIV_API simtdiv_status simtdiv_profile_set_stack_capacity(
    simtdiv_profile* profile, uint64_t capacity);
SIMTDIV_API const char* simtdiv_profile_name(const simtdiv_profile* profile);
SIMTDIV_API void simtdiv_profile_free(simtdiv_profile* profile);

/* Launch configuration */

SIMTDIV_API simtdiv_status simtdiv_launch_create(const simtdiv_profile* profile,
                                                 simtdiv_launch** out);
/* values points at SIMTDIV_WARP_SIZE per-lane values. */
SIMTDIV_API simtdiv_status simtdiv_launch_set_register(simtdiv_launch* launch,
                                                       const char* name,
                                                       const int32_t* values);
/* Sets `name` to the loop-limit pattern for n divergent lanes. */
SIMTDIV_API simtdiv_status simtdiv_launch_set_bound_pattern(simtdiv_launch* launch,
                                                            const char* name,
                                                            int n);
/* Sets every loop limit register of a built-in kernel for n. */
SIMTDIV_API simtdiv_status simtdiv_launch_set_kernel_bounds(simtdiv_launch* launch,
                                                            simtdiv_kernel kernel,
                                                            int n);
SIMTDIV_API simtdiv_status simtdiv_launch_set_mask(simtdiv_launch* launch,
                                                   uint32_t mask);
SIMTDIV_API simtdiv_status simtdiv_launch_set_budget(simtdiv_launch* launch,
                                                     uint64_t budget);
SIMTDIV_API simtdiv_status simtdiv_launch_set_record_trace(simtdiv_launch* launch,
                                                           int enable);
SIMTDIV_API void simtdiv_launch_free(simtdiv_launch* launch);

/* Runs */

SIMTDIV_API simtdiv_status simtdiv_run(const simtdiv_program* program,
                                       const simtdiv_launch* launch,
                                       simtdiv_result** out);
SIMTDIV_API simtdiv_status simtdiv_result_counters(const simtdiv_result* result,
                                                   simtdiv_counters* out);
SIMTDIV_API simtdiv_status simtdiv_result_register(const simtdiv_result* result,
                                                   unsigned lane,
                                                   const char* name,
                                                   uint32_t* out_bits);
/* Number of (ordinal, depth) samples; copies at most capacity of them. */
SIMTDIV_API size_t simtdiv_result_depth_history(const simtdiv_result* result,
                                                uint64_t* ordinals,
                                                uint64_t* depths,
                                                size_t capacity);
/* Divergence and spill cycles charged by the profile, without base. */
SIMTDIV_API simtdiv_status simtdiv_result_overhead(const simtdiv_result* result,
                                                   const simtdiv_profile* profile,
                                                   uint64_t* out);
/* Calibrated total; SIMTDIV_ERR_NOT_FOUND when the profile has no base. */
SIMTDIV_API simtdiv_status simtdiv_result_predict(const simtdiv_result* result,
                                                  simtdiv_kernel kernel,
                                                  const simtdiv_profile* profile,
                                                  uint64_t* out);
/* Requires a launch with record_trace enabled. */
SIMTDIV_API simtdiv_status simtdiv_result_trace(const simtdiv_result* result,
                                                simtdiv_format format,
                                                char** out);
SIMTDIV_API void simtdiv_result_free(simtdiv_result* result);

/* Closed-form oracles */

SIMTDIV_API simtdiv_status simtdiv_expected_push_count(simtdiv_kernel kernel,
                                                       int n, uint64_t* out);
SIMTDIV_API simtdiv_status simtdiv_expected_max_depth(simtdiv_kernel kernel,
                                                      int n, uint64_t* out);
/* SIMTDIV_ERR_NOT_FOUND when no fit exists for (kernel, arch). */
SIMTDIV_API simtdiv_status simtdiv_fit_curve(simtdiv_kernel kernel,
                                             const char* arch, int n,
                                             int64_t* out);

/* Sweeps over n = first..last */

SIMTDIV_API simtdiv_status simtdiv_sweep(simtdiv_kernel kernel,
                                         const simtdiv_profile* profile,
                                         int first, int last,
                                         simtdiv_format format, char** out);
/* *passed is 1 when every exact-region check holds. */
SIMTDIV_API simtdiv_status simtdiv_compare(simtdiv_kernel kernel,
                                           const simtdiv_profile* profile,
                                           int first, int last, char** report,
                                           int* passed);

#ifdef __cplusplus
}
#endif

#endif /* SIMTDIV_SIMTDIV_H_ */
