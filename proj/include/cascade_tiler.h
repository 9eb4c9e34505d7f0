/* cascade-tiler C API.
 *
 * A classifier-guided cascade engine for building-footprint detection in
 * sparse map rasters: tile, classify, filter, repeat, then segment the
 * survivors and report component centroids. The shared library exposes the
 * whole pipeline behind opaque handles and integer status codes; every
 * function is safe to call from C, and strings/handles returned by the
 * library must be released with the matching ct_*_free/destroy call.
 *
 * On failure every function returns a ct_status other than CT_OK and leaves
 * a human-readable description in ct_last_error() (thread-local).
 */
#ifndef CASCADE_TILER_H
#define CASCADE_TILER_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ct_status {
    CT_OK = 0,
    CT_ERROR_INVALID_ARGUMENT = 1,
    CT_ERROR_IO = 2,
    CT_ERROR_CONFIG = 3,
    CT_ERROR_BACKEND = 4,
    CT_ERROR_RUNTIME = 5
} ct_status;

/* Library version string, e.g. "1.0.0". Never NULL. */
const char* ct_version(void);

/* Message for the most recent failure on this thread; empty string if none. */
const char* ct_last_error(void);

/* Free any char* the library handed out. NULL is fine. */
void ct_string_free(char* s);

/* ---- rasters ----------------------------------------------------------- */

typedef struct ct_raster ct_raster;

ct_status ct_raster_create(int width, int height, uint8_t fill, ct_raster** out);
ct_status ct_raster_load_png(const char* path, ct_raster** out);
ct_status ct_raster_save_png(const ct_raster* raster, const char* path);
void ct_raster_destroy(ct_raster* raster);

int ct_raster_width(const ct_raster* raster);
int ct_raster_height(const ct_raster* raster);
/* Row-major pixel buffer, width*height bytes; valid while the handle lives. */
const uint8_t* ct_raster_pixels(const ct_raster* raster);
ct_status ct_raster_set_pixel(ct_raster* raster, int x, int y, uint8_t value);

typedef enum ct_transform {
    CT_TRANSFORM_IDENTITY = 0,
    CT_TRANSFORM_HFLIP = 1,
    CT_TRANSFORM_VFLIP = 2,
    CT_TRANSFORM_ROT180 = 3,
    CT_TRANSFORM_ROT180_HFLIP = 4,
    CT_TRANSFORM_ROT180_VFLIP = 5
} ct_transform;

ct_status ct_raster_dihedral(const ct_raster* raster, ct_transform transform, ct_raster** out);

/* Writes the six augmentation variants of a PNG next to out_dir as
 * <stem>_<transform>.png. The set is fixed: identity, hflip, vflip, rot180,
 * rot180_hflip, rot180_vflip. */
ct_status ct_augment_file(const char* png_path, const char* out_dir);

/* ---- cost model --------------------------------------------------------
 * Normalization: per-pixel segmentation time is 1, classification 1/A.
 */

ct_status ct_cost_normalized_time(int n, double pass_fraction, double cost_ratio, double* out);
ct_status ct_cost_break_even_limit(double cost_ratio, double* out);
ct_status ct_cost_is_beneficial(double pass_fraction, double cost_ratio, int* out);
ct_status ct_cost_asymptotic_time(double pass_fraction, double cost_ratio, double* out);

/* Table of normalized times for n = 0..n_max plus the asymptote; *out is a
 * malloc'd string (text table, or CSV when as_csv). */
ct_status ct_cost_table(double pass_fraction, double cost_ratio, int n_max, int as_csv,
                        char** out);

/* ---- synthetic corpus --------------------------------------------------- */

/* params_json may be "" or NULL for defaults. Recognized keys: width, height,
 * building_count_mean, building_min_side, building_max_side,
 * field_line_density, wetland_density, speck_density, ensure_straddle, seed,
 * plus world-file fields origin_x, origin_y, px_size_x, px_size_y.
 * Writes <stem>.png, <stem>_truth.png, <stem>_truth.csv and <stem>.wld. */
ct_status ct_synth_generate(const char* params_json, const char* out_dir, const char* stem);

/* ---- pipeline runs ------------------------------------------------------ */

/* Default run configuration as JSON (malloc'd). */
ct_status ct_default_config_json(char** out);

/* Run the pipeline on a PNG map. config_path may be NULL for defaults.
 * Writes detections.geojson, detections.csv, stats.json and
 * run_manifest.json (plus overlay.png when overlay != 0) under out_dir.
 * workers <= 0 keeps the config's value; the CASCADE_TILER_THREADS
 * environment variable overrides both. When stats_json_out is non-NULL it
 * receives the stats document. include_timings adds wall-clock fields, which
 * makes stats.json differ run to run. */
ct_status ct_run_pipeline(const char* map_path, const char* config_path, const char* out_dir,
                          int overlay, int include_timings, int workers, char** stats_json_out);

/* ---- evaluation --------------------------------------------------------- */

/* f1 = 2tp / (2tp + fp + fn); 1.0 when all counts are zero. */
ct_status ct_eval_f1(long long tp, long long fp, long long fn, double* out);

/* Match detections (.csv or .geojson) against a synth truth CSV within
 * radius pixels. *report_json receives rows + totals; *report_text (optional)
 * a one-line-per-map summary. */
ct_status ct_eval_detections(const char* detections_path, const char* truth_csv_path,
                             double radius, char** report_json, char** report_text);

/* Two-epoch change detection on detection files with world coordinates.
 * Writes report JSON and cluster CSV when the respective paths are non-NULL;
 * *summary_out (optional) receives a short text summary. */
ct_status ct_change_detect(const char* epoch_a_path, const char* epoch_b_path, double radius,
                           double cluster_dist, const char* report_json_path,
                           const char* clusters_csv_path, char** summary_out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* CASCADE_TILER_H */
