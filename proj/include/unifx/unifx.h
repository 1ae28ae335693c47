#ifndef UNIFX_UNIFX_H
#define UNIFX_UNIFX_H

/*
 * C interface to the unifx library.
 *
 * Every function returns a unifx_status. On failure a message is available
 * from unifx_last_error() on the calling thread until the next call.
 * Objects are opaque handles released with their matching _free function;
 * strings returned through char** are released with unifx_string_free.
 * Coalitions are bit patterns: feature i (1-based) is bit i-1.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(UNIFX_BUILDING_LIBRARY)
#define UNIFX_API __declspec(dllexport)
#else
#define UNIFX_API __declspec(dllimport)
#endif
#else
#define UNIFX_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum unifx_status {
  UNIFX_OK = 0,
  UNIFX_ERR_INVALID_ARGUMENT = 1,
  UNIFX_ERR_CONFIG = 2,
  UNIFX_ERR_PARSE = 3,
  UNIFX_ERR_NUMERIC = 4,
  UNIFX_ERR_RESOURCE = 5,
  UNIFX_ERR_IO = 6,
  UNIFX_ERR_INTERNAL = 7
} unifx_status;

typedef enum unifx_imputer {
  UNIFX_IMPUTER_BASELINE = 0,
  UNIFX_IMPUTER_MARGINAL = 1,
  UNIFX_IMPUTER_CONDITIONAL = 2
} unifx_imputer;

typedef enum unifx_mode { UNIFX_MODE_AUTO = 0, UNIFX_MODE_EXACT = 1, UNIFX_MODE_MC = 2 } unifx_mode;

typedef enum unifx_effect { UNIFX_EFFECT_PURE = 0, UNIFX_EFFECT_PARTIAL = 1, UNIFX_EFFECT_FULL = 2 } unifx_effect;

typedef enum unifx_influence {
  UNIFX_INFLUENCE_INDIVIDUAL = 0,
  UNIFX_INFLUENCE_JOINT = 1,
  UNIFX_INFLUENCE_INTERACTION = 2
} unifx_influence;

typedef struct unifx_model unifx_model;
typedef struct unifx_gaussian unifx_gaussian;
typedef struct unifx_value_function unifx_value_function;
typedef struct unifx_game unifx_game;

typedef struct unifx_imputer_options {
  unifx_imputer kind;
  const double* baseline;               /* length d, or NULL for the distribution mean */
  const unifx_gaussian* distribution;   /* NULL: independent standard normal */
  size_t mc_samples;                    /* 0: 512 */
  uint64_t seed;
  unifx_mode mode;
} unifx_imputer_options;

UNIFX_API const char* unifx_version(void);
UNIFX_API const char* unifx_last_error(void);
UNIFX_API const char* unifx_status_name(unifx_status status);
UNIFX_API void unifx_string_free(char* s);

/* Models */
UNIFX_API unifx_status unifx_model_parse(const char* text, int d, unifx_model** out);
UNIFX_API unifx_status unifx_model_evaluate(const unifx_model* model, const double* x, size_t n, double* out);
UNIFX_API unifx_status unifx_model_to_string(const unifx_model* model, char** out);
UNIFX_API unifx_status unifx_model_is_multilinear(const unifx_model* model, int* out);
UNIFX_API int unifx_model_dim(const unifx_model* model);
UNIFX_API void unifx_model_free(unifx_model* model);

/* Gaussian distributions; matrices are row-major */
UNIFX_API unifx_status unifx_gaussian_create(int d, const double* mu, const double* sigma, unifx_gaussian** out);
UNIFX_API unifx_status unifx_gaussian_equicorrelated(int d, double rho, unifx_gaussian** out);
UNIFX_API unifx_status unifx_gaussian_sample(const unifx_gaussian* g, size_t n, uint64_t seed, double* out);
UNIFX_API unifx_status unifx_gaussian_moment(const unifx_gaussian* g, const int* kappa, size_t n, double* out);
UNIFX_API void unifx_gaussian_free(unifx_gaussian* g);

/* Value functions */
UNIFX_API unifx_status unifx_value_function_create(const unifx_model* model, const unifx_imputer_options* options,
                                                   unifx_value_function** out);
/* std_error may be NULL; it receives NaN when the value is not a Monte Carlo estimate. */
UNIFX_API unifx_status unifx_value_function_evaluate(const unifx_value_function* vf, uint32_t coalition,
                                                     const double* x, size_t n, double* value, double* std_error);
UNIFX_API unifx_status unifx_value_function_model_calls(const unifx_value_function* vf, uint64_t* out);
UNIFX_API void unifx_value_function_free(unifx_value_function* vf);

/* Games: all 2^d values, indexed by coalition bit pattern */
UNIFX_API unifx_status unifx_game_from_values(int d, const double* values, size_t n, unifx_game** out);
UNIFX_API unifx_status unifx_game_local(const unifx_value_function* vf, const double* x0, size_t n,
                                        unifx_game** out);
UNIFX_API unifx_status unifx_game_sensitivity(const unifx_value_function* vf, const double* points,
                                              size_t n_points, unifx_game** out);
UNIFX_API int unifx_game_dim(const unifx_game* game);
UNIFX_API unifx_status unifx_game_values(const unifx_game* game, double* out, size_t n);
UNIFX_API unifx_status unifx_game_moebius(const unifx_game* game, double* out, size_t n);
UNIFX_API unifx_status unifx_game_co_moebius(const unifx_game* game, double* out, size_t n);
UNIFX_API unifx_status unifx_game_effect(const unifx_game* game, unifx_effect effect, unifx_influence type,
                                         uint32_t coalition, double* out);
/* out has length d */
UNIFX_API unifx_status unifx_game_shapley_values(const unifx_game* game, double* out, size_t n);
/* out has length 2^d; entries of size 0 or above k are set to 0 */
UNIFX_API unifx_status unifx_game_k_sii(const unifx_game* game, int k, double* out, size_t n);
UNIFX_API void unifx_game_free(unifx_game* game);

/* Configuration-driven runs. output receives the report in the configured
 * format (also written to output.path when set); report, if non-NULL,
 * receives the JSON report. */
UNIFX_API unifx_status unifx_run(const char* config_json, char** output, char** report);

/* mode: "exact", "mc" or NULL (exact). repetitions <= 0 selects 30. */
UNIFX_API unifx_status unifx_reproduce(const char* experiment, uint64_t seed, const char* out_dir, const char* mode,
                                       int repetitions, size_t mc_samples, char** summary);

/* JSON array describing the method-alias registry. */
UNIFX_API unifx_status unifx_aliases(char** out);

#ifdef __cplusplus
}
#endif

#endif /* UNIFX_UNIFX_H */
