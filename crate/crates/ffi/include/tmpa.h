#ifndef TMPA_H
#define TMPA_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum TmpaStatus {
  TMPA_STATUS_OK = 0,
  TMPA_STATUS_NULL_POINTER = 1,
  // Malformed argument: bad length, harmonic order, sample count.
  TMPA_STATUS_INVALID_ARGUMENT = 2,
  // Argument outside its physical domain: rise/fall time, angle, target.
  TMPA_STATUS_OUT_OF_RANGE = 3,
  // Caller buffer shorter than the result.
  TMPA_STATUS_BUFFER_TOO_SMALL = 4,
  // A solver or series failed to converge.
  TMPA_STATUS_NUMERICAL = 5,
  // The requested closed form does not apply to this geometry.
  TMPA_STATUS_UNAVAILABLE = 6,
  TMPA_STATUS_PANIC = 7,
} TmpaStatus;

// Opaque linear array.
typedef struct TmpaArray TmpaArray;

// Opaque set of per-harmonic power patterns.
typedef struct TmpaPattern TmpaPattern;

typedef struct TmpaEfficiencies {
  double eta_tma;
  double eta_s;
  double eta;
  double pl5_db;
  // Mean power in the wanted harmonic.
  double p_useful;
  // Mean power over every harmonic.
  double p_radiated;
  // Power of the same array without time modulation.
  double p_static;
} TmpaEfficiencies;

typedef struct TmpaHarmonicInfo {
  uint32_t q;
  // `+1` above the carrier, `-1` below.
  int32_t band_sign;
  // Peak level relative to the wanted harmonic, dB.
  double peak_db;
  double peak_theta_deg;
} TmpaHarmonicInfo;

typedef struct TmpaVerifyReport {
  double max_abs_error;
  double suppressed_max_relative;
  double tolerance;
  bool passed;
} TmpaVerifyReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread, or null. Valid until the next
// call into this library from the same thread.
const char *tmpa_last_error(void);

// Static name of a status code.
const char *tmpa_status_name(enum TmpaStatus status);

// Library version as a static string.
const char *tmpa_version(void);

// 5th-harmonic level relative to the wanted harmonic, dB. `-INFINITY` when fully
// suppressed.
//
// # Safety
// Pointer arguments follow the contract in the crate documentation.
enum TmpaStatus tmpa_pl5(double delta_norm, double *out_db);

// # Safety
// Pointer arguments follow the contract in the crate documentation.
enum TmpaStatus tmpa_efficiencies(double delta_norm,
                                  size_t n_elements,
                                  struct TmpaEfficiencies *out_report);

// Smallest normalized rise/fall time whose 5th-harmonic level is at or below
// `target_db`.
//
// # Safety
// Pointer arguments follow the contract in the crate documentation.
enum TmpaStatus tmpa_design_delta(double target_db, double *out_delta_norm);

// Writes `n_elements` steering delays (fractions of the modulation period).
//
// # Safety
// Pointer arguments follow the contract in the crate documentation.
enum TmpaStatus tmpa_steering_delays(size_t n_elements,
                                     double theta_scan_deg,
                                     double spacing_wl,
                                     double *out_delays,
                                     size_t out_len);

// Complex excitation of harmonic `q` for an element delayed by `delay_norm`.
//
// # Safety
// Pointer arguments follow the contract in the crate documentation.
enum TmpaStatus tmpa_dynamic_excitation(uint32_t q,
                                        double delta_norm,
                                        double delay_norm,
                                        double *out_re,
                                        double *out_im);

// Array steered to `theta_scan_deg` with progressive delays.
//
// # Safety
// Pointer arguments follow the contract in the crate documentation.
enum TmpaStatus tmpa_array_steered(size_t n_elements,
                                   double spacing_wl,
                                   double theta_scan_deg,
                                   struct TmpaArray **out_array);

// Array with explicit per-element delays.
//
// # Safety
// `delays` must be null or point to `n_elements` readable values.
enum TmpaStatus tmpa_array_with_delays(size_t n_elements,
                                       double spacing_wl,
                                       const double *delays,
                                       struct TmpaArray **out_array);

// Releases an array. Null is ignored.
//
// # Safety
// Pointer arguments follow the contract in the crate documentation.
void tmpa_array_free(struct TmpaArray *array);

// Directivity in dBi. `out_closed_form_dbi` receives NaN when the closed form
// does not apply; either out-pointer may be null.
//
// # Safety
// Pointer arguments follow the contract in the crate documentation.
enum TmpaStatus tmpa_array_directivity(const struct TmpaArray *array,
                                       double delta_norm,
                                       uint32_t q_max,
                                       double *out_closed_form_dbi,
                                       double *out_numerical_dbi);

// Patterns of every kept harmonic on `theta_points` angles over [0, 180] degrees.
//
// # Safety
// Pointer arguments follow the contract in the crate documentation.
enum TmpaStatus tmpa_pattern_compute(const struct TmpaArray *array,
                                     double delta_norm,
                                     uint32_t q_max,
                                     size_t theta_points,
                                     struct TmpaPattern **out_pattern);

// Number of angles; 0 for a null handle.
//
// # Safety
// Pointer arguments follow the contract in the crate documentation.
size_t tmpa_pattern_points(const struct TmpaPattern *pattern);

// Number of harmonics; 0 for a null handle.
//
// # Safety
// Pointer arguments follow the contract in the crate documentation.
size_t tmpa_pattern_harmonic_count(const struct TmpaPattern *pattern);

// # Safety
// Pointer arguments follow the contract in the crate documentation.
enum TmpaStatus tmpa_pattern_harmonic_info(const struct TmpaPattern *pattern,
                                           size_t index,
                                           struct TmpaHarmonicInfo *out_info);

// Copies the angle grid, degrees.
//
// # Safety
// Pointer arguments follow the contract in the crate documentation.
enum TmpaStatus tmpa_pattern_theta(const struct TmpaPattern *pattern,
                                   double *out_theta,
                                   size_t out_len);

// Copies the dB pattern of harmonic `index`.
//
// # Safety
// Pointer arguments follow the contract in the crate documentation.
enum TmpaStatus tmpa_pattern_db(const struct TmpaPattern *pattern,
                                size_t index,
                                double *out_db,
                                size_t out_len);

// Releases a pattern. Null is ignored.
//
// # Safety
// Pointer arguments follow the contract in the crate documentation.
void tmpa_pattern_free(struct TmpaPattern *pattern);

// Time-domain check of the closed-form harmonic amplitudes in direction
// `theta_deg`, using `samples` per period and bins up to `q_max`.
//
// # Safety
// Pointer arguments follow the contract in the crate documentation.
enum TmpaStatus tmpa_verify(const struct TmpaArray *array,
                            double delta_norm,
                            double theta_deg,
                            size_t samples,
                            uint32_t q_max,
                            struct TmpaVerifyReport *out_report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TMPA_H */
