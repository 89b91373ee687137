#ifndef TWINBEAM_H
#define TWINBEAM_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum TbStatus {
  TB_STATUS_OK = 0,
  TB_STATUS_NULL_POINTER = 1,
  TB_STATUS_INVALID_ARGUMENT = 2,
  TB_STATUS_DOMAIN = 3,
  TB_STATUS_CONFIG = 4,
  TB_STATUS_NUMERIC = 5,
  TB_STATUS_IO = 6,
  TB_STATUS_PANIC = 7,
  TB_STATUS_CUTOFF = 8,
} TbStatus;

/**
 * Opaque scenario handle.
 */
typedef struct TbScenario TbScenario;

/**
 * One sweep point. Widths not requested are NaN.
 */
typedef struct TbSweepRecord {
  double power;
  double photons;
  double conversion;
  double k_dim;
  double fedorov_omega;
  double spectrum_fwhm;
  double c_omega;
  double a_omega;
  double c_t;
  double a_t;
  double c_k;
  double c_phi;
  double ring_fwhm;
} TbSweepRecord;

typedef struct TbTripletExit {
  double z0;
  double phi;
  double u;
  double v;
  double a_p;
  double a_s;
} TbTripletExit;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Builds a scenario from TOML text (NUL-terminated UTF-8). An empty string
 * gives the default scenario. With a calibration anchor this solves for
 * the coupling constant, which can take several seconds.
 *
 * # Safety
 * `toml` must be a valid C string; `out` must point to writable storage.
 */
enum TbStatus tb_scenario_from_toml_str(const char *toml, struct TbScenario **out);

/**
 * Releases a scenario. Null is ignored.
 *
 * # Safety
 * `s` must come from `tb_scenario_from_toml_str` and not be used afterwards.
 */
void tb_scenario_free(struct TbScenario *s);

/**
 * Current coupling constant K.
 *
 * # Safety
 * `s` must be a live handle and `k` writable.
 */
enum TbStatus tb_scenario_coupling(const struct TbScenario *s, double *k);

/**
 * Replaces the coupling constant K (must be positive).
 *
 * # Safety
 * `s` must be a live handle.
 */
enum TbStatus tb_scenario_set_coupling(struct TbScenario *s, double k);

/**
 * Solves for K so that signal plus idler carry `fraction` of the pulse
 * energy at `power` (W), stores it in the scenario and writes it to `k`.
 *
 * # Safety
 * `s` must be a live handle; `k` may be null.
 */
enum TbStatus tb_calibrate(struct TbScenario *s, double power, double fraction, double *k);

/**
 * Mean signal photon number per pulse at `power` (W).
 *
 * # Safety
 * `s` must be a live handle and `out` writable.
 */
enum TbStatus tb_photon_number(const struct TbScenario *s, double power, double *out);

/**
 * Evaluates `n` strictly increasing powers into `out[0..n]`. Nonzero
 * `temporal` / `transverse` request the corresponding widths.
 *
 * # Safety
 * `powers` must hold `n` values and `out` room for `n` records.
 */
enum TbStatus tb_sweep(const struct TbScenario *s,
                       const double *powers,
                       size_t n,
                       int32_t temporal,
                       int32_t transverse,
                       struct TbSweepRecord *out);

/**
 * Refractive index of BBO at `wavelength` (m). `extraordinary == 0` gives
 * the ordinary index; otherwise the extraordinary index at `theta` (rad)
 * from the optic axis.
 *
 * # Safety
 * `out` must be writable.
 */
enum TbStatus tb_refractive_index(double wavelength,
                                  int32_t extraordinary,
                                  double theta,
                                  double *out);

/**
 * Exit state of one triplet with initial amplitudes `ap0 >= as0 >= 0`.
 *
 * # Safety
 * `out` must be writable.
 */
enum TbStatus tb_triplet_exit(double ap0,
                              double as0,
                              double k,
                              double z_end,
                              struct TbTripletExit *out);

/**
 * Copies the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `len - 1` bytes) and returns the full message length.
 * Passing a null `buf` only queries the length.
 *
 * # Safety
 * `buf` must be null or hold `len` writable bytes.
 */
size_t tb_last_error_message(char *buf, size_t len);

/**
 * Library version as a static C string.
 */
const char *tb_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TWINBEAM_H */
