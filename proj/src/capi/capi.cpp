#include "cascade_tiler.h"

#include "core/config.hpp"
#include "core/costmodel.hpp"
#include "core/errors.hpp"
#include "core/eval.hpp"
#include "core/raster.hpp"
#include "core/reports.hpp"
#include "core/runner.hpp"
#include "core/synthmap.hpp"
#include "core/version.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <string>

using namespace ctiler;

namespace {

thread_local std::string t_last_error;

void set_error(const std::string& msg) {
    t_last_error = msg;
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

/// Run `fn`, translating exceptions into status codes + ct_last_error().
template <typename Fn>
ct_status guarded(Fn&& fn) {
    try {
        fn();
        t_last_error.clear();
        return CT_OK;
    } catch (const ConfigError& e) {
        set_error(e.what());
        return CT_ERROR_CONFIG;
    } catch (const IoError& e) {
        set_error(e.what());
        return CT_ERROR_IO;
    } catch (const BackendError& e) {
        set_error(e.what());
        return CT_ERROR_BACKEND;
    } catch (const std::invalid_argument& e) {
        set_error(e.what());
        return CT_ERROR_INVALID_ARGUMENT;
    } catch (const std::exception& e) {
        set_error(e.what());
        return CT_ERROR_RUNTIME;
    }
}

ct_status require(bool ok, const char* msg) {
    if (ok) return CT_OK;
    set_error(msg);
    return CT_ERROR_INVALID_ARGUMENT;
}

} // namespace

struct ct_raster {
    Raster img;
};

extern "C" {

const char* ct_version(void) {
    return kToolVersion;
}

const char* ct_last_error(void) {
    return t_last_error.c_str();
}

void ct_string_free(char* s) {
    std::free(s);
}

ct_status ct_raster_create(int width, int height, uint8_t fill, ct_raster** out) {
    if (auto rc = require(out != nullptr, "out must not be NULL")) return rc;
    return guarded([&] { *out = new ct_raster{Raster(width, height, fill)}; });
}

ct_status ct_raster_load_png(const char* path, ct_raster** out) {
    if (auto rc = require(path && out, "path and out must not be NULL")) return rc;
    return guarded([&] { *out = new ct_raster{load_png(path)}; });
}

ct_status ct_raster_save_png(const ct_raster* raster, const char* path) {
    if (auto rc = require(raster && path, "raster and path must not be NULL")) return rc;
    return guarded([&] { save_png(path, raster->img); });
}

void ct_raster_destroy(ct_raster* raster) {
    delete raster;
}

int ct_raster_width(const ct_raster* raster) {
    return raster ? raster->img.width : 0;
}

int ct_raster_height(const ct_raster* raster) {
    return raster ? raster->img.height : 0;
}

const uint8_t* ct_raster_pixels(const ct_raster* raster) {
    return raster ? raster->img.pixels.data() : nullptr;
}

ct_status ct_raster_set_pixel(ct_raster* raster, int x, int y, uint8_t value) {
    if (auto rc = require(raster != nullptr, "raster must not be NULL")) return rc;
    if (auto rc = require(x >= 0 && y >= 0 && x < raster->img.width && y < raster->img.height,
                          "pixel coordinates out of range")) {
        return rc;
    }
    raster->img.set(x, y, value);
    return CT_OK;
}

ct_status ct_raster_dihedral(const ct_raster* raster, ct_transform transform, ct_raster** out) {
    if (auto rc = require(raster && out, "raster and out must not be NULL")) return rc;
    if (auto rc = require(transform >= CT_TRANSFORM_IDENTITY && transform <= CT_TRANSFORM_ROT180_VFLIP,
                          "unknown transform")) {
        return rc;
    }
    return guarded([&] {
        *out = new ct_raster{dihedral(raster->img, static_cast<Dihedral>(transform))};
    });
}

ct_status ct_augment_file(const char* png_path, const char* out_dir) {
    if (auto rc = require(png_path && out_dir, "png_path and out_dir must not be NULL")) return rc;
    return guarded([&] {
        const std::filesystem::path input(png_path);
        const std::filesystem::path dir(out_dir);
        std::filesystem::create_directories(dir);
        const Raster img = load_png(input);
        const auto variants = augment_set(img);
        const auto transforms = augment_transforms();
        const std::string stem = input.stem().string();
        for (size_t i = 0; i < variants.size(); ++i) {
            save_png(dir / (stem + "_" + dihedral_name(transforms[i]) + ".png"), variants[i]);
        }
    });
}

ct_status ct_cost_normalized_time(int n, double pass_fraction, double cost_ratio, double* out) {
    if (auto rc = require(out != nullptr, "out must not be NULL")) return rc;
    return guarded([&] { *out = normalized_time(n, pass_fraction, cost_ratio); });
}

ct_status ct_cost_break_even_limit(double cost_ratio, double* out) {
    if (auto rc = require(out != nullptr, "out must not be NULL")) return rc;
    return guarded([&] { *out = break_even_limit(cost_ratio); });
}

ct_status ct_cost_is_beneficial(double pass_fraction, double cost_ratio, int* out) {
    if (auto rc = require(out != nullptr, "out must not be NULL")) return rc;
    return guarded([&] { *out = is_beneficial(pass_fraction, cost_ratio) ? 1 : 0; });
}

ct_status ct_cost_asymptotic_time(double pass_fraction, double cost_ratio, double* out) {
    if (auto rc = require(out != nullptr, "out must not be NULL")) return rc;
    return guarded([&] { *out = asymptotic_time(pass_fraction, cost_ratio); });
}

ct_status ct_cost_table(double pass_fraction, double cost_ratio, int n_max, int as_csv,
                        char** out) {
    if (auto rc = require(out != nullptr, "out must not be NULL")) return rc;
    if (auto rc = require(n_max >= 0, "n_max must be >= 0")) return rc;
    return guarded([&] {
        const std::string table = as_csv ? cost_table_csv(pass_fraction, cost_ratio, n_max)
                                         : cost_table_text(pass_fraction, cost_ratio, n_max);
        *out = dup_string(table);
        if (!*out) throw std::runtime_error("out of memory");
    });
}

ct_status ct_synth_generate(const char* params_json, const char* out_dir, const char* stem) {
    if (auto rc = require(out_dir && stem, "out_dir and stem must not be NULL")) return rc;
    return guarded([&] {
        SynthParams params;
        AffineGeo geo{500000.0, 723000.0, 0.5, -0.5};
        if (params_json && *params_json) {
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(params_json);
            } catch (const nlohmann::json::parse_error& e) {
                throw ConfigError(std::string("synth params are not valid JSON: ") + e.what());
            }
            params.width = j.value("width", params.width);
            params.height = j.value("height", params.height);
            params.building_count_mean = j.value("building_count_mean", params.building_count_mean);
            params.building_min_side = j.value("building_min_side", params.building_min_side);
            params.building_max_side = j.value("building_max_side", params.building_max_side);
            params.field_line_density = j.value("field_line_density", params.field_line_density);
            params.wetland_density = j.value("wetland_density", params.wetland_density);
            params.speck_density = j.value("speck_density", params.speck_density);
            params.ensure_straddle = j.value("ensure_straddle", params.ensure_straddle);
            params.seed = j.value("seed", params.seed);
            geo.origin_x = j.value("origin_x", geo.origin_x);
            geo.origin_y = j.value("origin_y", geo.origin_y);
            geo.px_size_x = j.value("px_size_x", geo.px_size_x);
            geo.px_size_y = j.value("px_size_y", geo.px_size_y);
        }
        auto [map, truth] = generate(params);
        write_synth_outputs(out_dir, stem, map, truth, geo);
    });
}

ct_status ct_default_config_json(char** out) {
    if (auto rc = require(out != nullptr, "out must not be NULL")) return rc;
    return guarded([&] {
        *out = dup_string(run_config_to_json(default_run_config()));
        if (!*out) throw std::runtime_error("out of memory");
    });
}

ct_status ct_run_pipeline(const char* map_path, const char* config_path, const char* out_dir,
                          int overlay, int include_timings, int workers, char** stats_json_out) {
    if (auto rc = require(map_path && out_dir, "map_path and out_dir must not be NULL")) return rc;
    return guarded([&] {
        RunConfig cfg =
            config_path ? load_run_config(config_path) : default_run_config();
        RunOptions opts;
        opts.overlay = overlay != 0;
        opts.include_timings = include_timings != 0;
        opts.workers_override = workers > 0 ? workers : -1;
        const RunArtifacts artifacts = run_pipeline(map_path, cfg, out_dir, opts);
        if (stats_json_out) {
            *stats_json_out = dup_string(stats_to_json(artifacts.stats, opts.include_timings));
            if (!*stats_json_out) throw std::runtime_error("out of memory");
        }
    });
}

ct_status ct_eval_f1(long long tp, long long fp, long long fn, double* out) {
    if (auto rc = require(out != nullptr, "out must not be NULL")) return rc;
    return guarded([&] { *out = f1_score(tp, fp, fn); });
}

ct_status ct_eval_detections(const char* detections_path, const char* truth_csv_path,
                             double radius, char** report_json, char** report_text) {
    if (auto rc = require(detections_path && truth_csv_path && report_json,
                          "detections_path, truth_csv_path and report_json must not be NULL")) {
        return rc;
    }
    return guarded([&] {
        const auto detections = read_detections(detections_path);
        for (const auto& d : detections) {
            if (std::isnan(d.centroid_x) || std::isnan(d.centroid_y)) {
                throw std::invalid_argument(
                    "detections file carries world coordinates only; evaluation against "
                    "pixel-space truth needs pixel coordinates (use the detections CSV)");
            }
        }
        const auto buildings = read_truth_csv(truth_csv_path);
        std::vector<Point> truths;
        truths.reserve(buildings.size());
        for (const auto& b : buildings) truths.emplace_back(b.centroid_x, b.centroid_y);
        EvalRow row;
        row.name = std::filesystem::path(detections_path).filename().string();
        row.result = match(detections, truths, radius);
        *report_json = dup_string(eval_report_json({row}, radius));
        if (!*report_json) throw std::runtime_error("out of memory");
        if (report_text) {
            *report_text = dup_string(eval_report_text({row}, radius));
            if (!*report_text) throw std::runtime_error("out of memory");
        }
    });
}

ct_status ct_change_detect(const char* epoch_a_path, const char* epoch_b_path, double radius,
                           double cluster_dist, const char* report_json_path,
                           const char* clusters_csv_path, char** summary_out) {
    if (auto rc = require(epoch_a_path && epoch_b_path,
                          "epoch_a_path and epoch_b_path must not be NULL")) {
        return rc;
    }
    return guarded([&] {
        const auto epoch_a = read_detections(epoch_a_path);
        const auto epoch_b = read_detections(epoch_b_path);
        const ChangeReport report = change_detect(epoch_a, epoch_b, radius, cluster_dist);
        if (report_json_path) {
            std::ofstream out(report_json_path, std::ios::trunc);
            if (!out) throw IoError(std::string("cannot write ") + report_json_path);
            out << change_report_json(report, radius, cluster_dist);
        }
        if (clusters_csv_path) {
            std::ofstream out(clusters_csv_path, std::ios::trunc);
            if (!out) throw IoError(std::string("cannot write ") + clusters_csv_path);
            out << change_report_csv(report);
        }
        if (summary_out) {
            *summary_out = dup_string(change_report_text(report));
            if (!*summary_out) throw std::runtime_error("out of memory");
        }
    });
}

} // extern "C"
