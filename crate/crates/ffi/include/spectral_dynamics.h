#ifndef SPECTRAL_DYNAMICS_H
#define SPECTRAL_DYNAMICS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every fallible call.
typedef enum SdStatus {
  SD_STATUS_OK = 0,
  SD_STATUS_NULL_POINTER = 1,
  SD_STATUS_INVALID_PARAMETER = 2,
  SD_STATUS_DIMENSION_MISMATCH = 3,
  SD_STATUS_NOT_SYMMETRIC = 4,
  SD_STATUS_NO_CONVERGENCE = 5,
  SD_STATUS_OVERFLOW = 6,
  SD_STATUS_MISSING = 7,
  SD_STATUS_PARSE = 8,
  SD_STATUS_IO = 9,
  SD_STATUS_BUFFER_TOO_SMALL = 10,
  SD_STATUS_PANIC = 11,
} SdStatus;

// Features with responses of a random polynomial target.
typedef struct SdDataset SdDataset;

// Points on the unit sphere, optionally with the constant bias coordinate.
typedef struct SdFeatures SdFeatures;

// Two-layer ReLU network state.
typedef struct SdNetwork SdNetwork;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *sd_version(void);

// Copies the calling thread's last error message into `buf` (NUL-terminated,
// truncated to `capacity`). Returns the full message length without the NUL,
// or 0 when there is no pending error.
size_t sd_last_error_message(char *buf, size_t capacity);

// Samples `n` points uniformly on `S^{d−1}`; `bias` appends the
// constant coordinate.
enum SdStatus sd_features_sample(size_t n,
                                 size_t d,
                                 uint64_t seed,
                                 bool bias,
                                 struct SdFeatures **out);

void sd_features_free(struct SdFeatures *features);

// Number of points, or 0 for a null handle.
size_t sd_features_len(const struct SdFeatures *features);

// Coordinates per point (`d`, or `d + 1` with bias), or 0 for a null handle.
size_t sd_features_dim(const struct SdFeatures *features);

// Copies the `n × dim` point matrix, row-major.
enum SdStatus sd_features_points(const struct SdFeatures *features, double *buf, size_t capacity);

// Random linear (`degree = 1`) or quadratic (`degree = 2`) target evaluated
// on `features`.
enum SdStatus sd_dataset_polynomial(const struct SdFeatures *features,
                                    uint8_t degree,
                                    uint64_t seed,
                                    struct SdDataset **out);

void sd_dataset_free(struct SdDataset *data);

// Copies the `n` responses.
enum SdStatus sd_dataset_responses(const struct SdDataset *data, double *buf, size_t capacity);

// Width-`m` network on inputs of dimension `d`, weights `N(0, ν²)`.
enum SdStatus sd_network_init(size_t m,
                              size_t d,
                              double nu,
                              bool bias,
                              uint64_t seed,
                              struct SdNetwork **out);

void sd_network_free(struct SdNetwork *net);

// Number of completed GD steps, or 0 for a null handle.
size_t sd_network_step_count(const struct SdNetwork *net);

// Network outputs on every point of `features`.
enum SdStatus sd_network_predict(const struct SdNetwork *net,
                                 const struct SdFeatures *features,
                                 double *buf,
                                 size_t capacity);

// `(1/2n) Σ (y_i − f(x_i))²`.
enum SdStatus sd_network_risk(const struct SdNetwork *net,
                              const struct SdDataset *data,
                              double *out);

// Advances `net` by `steps` full-batch GD steps of size `eta`.
enum SdStatus sd_network_train(struct SdNetwork *net,
                               const struct SdDataset *data,
                               double eta,
                               size_t steps);

// Arc-cosine kernel at inner product `u`.
enum SdStatus sd_kernel_value(double u, bool biased, double *out);

// `n × n` empirical kernel matrix, row-major.
enum SdStatus sd_kernel_matrix(const struct SdFeatures *features,
                               bool biased,
                               double *buf,
                               size_t capacity);

// Eigenvalues, in descending order, of the symmetric row-major `n × n`
// matrix at `matrix`.
enum SdStatus sd_symmetric_eigenvalues(const double *matrix,
                                       size_t n,
                                       double *buf,
                                       size_t capacity);

// Eigenvalue of the biased kernel's integral operator on degree-`ell`
// harmonics in dimension `d`.
enum SdStatus sd_operator_eigenvalue(size_t ell, size_t d, double *out);

// `√(log(2n²/δ)/(2m)) + √(8 log(4/δ)/n)`.
enum SdStatus sd_concentration_eps(uint64_t n, uint64_t m, double delta, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SPECTRAL_DYNAMICS_H */
