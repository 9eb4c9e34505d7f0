// cascade-tiler command line. Everything goes through the shared library's
// C API; this file owns only argument handling and exit codes.
//
// Exit codes: 0 success, 1 processing error, 2 usage/config error.

#include <cascade_tiler.h>

#include <CLI11.hpp>

#include <cstdio>
#include <string>

namespace {

int status_to_exit(ct_status status) {
    switch (status) {
        case CT_OK: return 0;
        case CT_ERROR_CONFIG:
        case CT_ERROR_INVALID_ARGUMENT: return 2;
        default: return 1;
    }
}

int fail(ct_status status) {
    std::fprintf(stderr, "error: %s\n", ct_last_error());
    return status_to_exit(status);
}

struct StringGuard {
    char* s = nullptr;
    ~StringGuard() { ct_string_free(s); }
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cascade tiling engine for building-footprint detection in sparse map rasters"};
    app.set_version_flag("--version", std::string(ct_version()));
    app.require_subcommand(1);

    // run ------------------------------------------------------------------
    auto* run = app.add_subcommand("run", "Run the detection pipeline on a map PNG");
    std::string run_map, run_config, run_out;
    bool run_overlay = false;
    bool run_timings = false;
    bool run_print_config = false;
    int run_workers = 0;
    run->add_option("map", run_map, "Input map PNG (a <stem>.wld sidecar is picked up)");
    run->add_option("-c,--config", run_config, "Run configuration JSON");
    run->add_option("-o,--out", run_out, "Output directory");
    run->add_flag("--overlay", run_overlay, "Also write overlay.png with centroid dots");
    run->add_flag("--timings", run_timings,
                  "Include wall-clock fields in stats.json (not byte-reproducible)");
    run->add_option("--workers", run_workers,
                    "Tile worker threads (CASCADE_TILER_THREADS overrides)");
    run->add_flag("--print-config", run_print_config,
                  "Print the default configuration JSON and exit");

    // cost -----------------------------------------------------------------
    auto* cost = app.add_subcommand("cost", "Evaluate the cascade cost model");
    double cost_r = 0.4, cost_a = 5.0;
    int cost_nmax = 4;
    bool cost_csv = false;
    cost->add_option("-R,--pass-fraction", cost_r, "Fraction of tiles classified as positive")
        ->capture_default_str();
    cost->add_option("-A,--cost-ratio", cost_a, "Segmentation/classification per-pixel time ratio")
        ->capture_default_str();
    cost->add_option("-n,--n-max", cost_nmax, "Deepest cascade to tabulate")->capture_default_str();
    cost->add_flag("--csv", cost_csv, "Emit CSV instead of the text table");

    // synth ------------------------------------------------------------------
    auto* synth = app.add_subcommand("synth", "Generate synthetic maps with exact ground truth");
    std::string synth_out = ".", synth_stem = "map", synth_params;
    int synth_count = 1;
    uint64_t synth_seed = 0;
    synth->add_option("-o,--out", synth_out, "Output directory")->capture_default_str();
    synth->add_option("--stem", synth_stem, "Output filename stem")->capture_default_str();
    synth->add_option("--params", synth_params, "Generator parameters JSON (inline)");
    synth->add_option("--seed", synth_seed, "Seed for the first map")->capture_default_str();
    synth->add_option("--count", synth_count, "Number of maps (seeds seed..seed+count-1)")
        ->capture_default_str();

    // eval -------------------------------------------------------------------
    auto* eval = app.add_subcommand("eval", "Score detections against synth ground truth");
    std::string eval_dets, eval_truth, eval_json;
    double eval_radius = 15.0;
    eval->add_option("detections", eval_dets, "Detections file (.csv or .geojson)")->required();
    eval->add_option("truth", eval_truth, "Ground-truth CSV from synth")->required();
    eval->add_option("-r,--radius", eval_radius, "Match radius in pixels")->capture_default_str();
    eval->add_option("--json", eval_json, "Also write the JSON report to this path");

    // diff -------------------------------------------------------------------
    auto* diff = app.add_subcommand("diff", "Two-epoch change detection on detection files");
    std::string diff_a, diff_b, diff_json, diff_csv;
    double diff_radius = 10.0, diff_cluster = 300.0;
    diff->add_option("epoch_a", diff_a, "Earlier epoch detections (.csv or .geojson)")->required();
    diff->add_option("epoch_b", diff_b, "Later epoch detections")->required();
    diff->add_option("-r,--radius", diff_radius, "Same-building radius in world units")
        ->capture_default_str();
    diff->add_option("--cluster-dist", diff_cluster, "Single-linkage clustering distance")
        ->capture_default_str();
    diff->add_option("--json", diff_json, "Write the JSON report to this path");
    diff->add_option("--csv", diff_csv, "Write the cluster CSV to this path");

    // augment ----------------------------------------------------------------
    auto* augment = app.add_subcommand("augment", "Write the six dihedral variants of each PNG");
    std::vector<std::string> augment_inputs;
    std::string augment_out = ".";
    augment->add_option("inputs", augment_inputs, "Input PNGs")->required();
    augment->add_option("-o,--out", augment_out, "Output directory")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2; // usage errors are exit 2
    }

    if (run->parsed()) {
        if (run_print_config) {
            StringGuard json;
            if (ct_status rc = ct_default_config_json(&json.s)) return fail(rc);
            std::fputs(json.s, stdout);
            return 0;
        }
        if (run_map.empty() || run_out.empty()) {
            std::fprintf(stderr, "error: run needs a map and --out directory\n");
            return 2;
        }
        StringGuard stats;
        if (ct_status rc = ct_run_pipeline(run_map.c_str(),
                                           run_config.empty() ? nullptr : run_config.c_str(),
                                           run_out.c_str(), run_overlay ? 1 : 0,
                                           run_timings ? 1 : 0, run_workers, &stats.s)) {
            return fail(rc);
        }
        std::fputs(stats.s, stdout);
        return 0;
    }

    if (cost->parsed()) {
        StringGuard table;
        if (ct_status rc = ct_cost_table(cost_r, cost_a, cost_nmax, cost_csv ? 1 : 0, &table.s)) {
            return fail(rc);
        }
        std::fputs(table.s, stdout);
        return 0;
    }

    if (synth->parsed()) {
        if (synth_count < 1) {
            std::fprintf(stderr, "error: --count must be >= 1\n");
            return 2;
        }
        const bool seed_given = synth->count("--seed") > 0 || synth_count > 1;
        for (int i = 0; i < synth_count; ++i) {
            const uint64_t seed = synth_seed + static_cast<uint64_t>(i);
            std::string params = synth_params;
            if (params.empty()) {
                params = "{\"seed\": " + std::to_string(seed) + "}";
            } else if (seed_given) {
                // an explicit --seed/--count wins over a seed inside --params
                const auto pos = params.rfind('}');
                if (pos == std::string::npos) {
                    std::fprintf(stderr, "error: --params must be a JSON object\n");
                    return 2;
                }
                params = params.substr(0, pos) + ", \"seed\": " + std::to_string(seed) + "}";
            }
            const std::string stem =
                synth_count == 1 ? synth_stem : synth_stem + "_" + std::to_string(seed);
            if (ct_status rc = ct_synth_generate(params.c_str(), synth_out.c_str(), stem.c_str())) {
                return fail(rc);
            }
            std::printf("%s/%s.png\n", synth_out.c_str(), stem.c_str());
        }
        return 0;
    }

    if (eval->parsed()) {
        StringGuard report;
        StringGuard text;
        if (ct_status rc = ct_eval_detections(eval_dets.c_str(), eval_truth.c_str(), eval_radius,
                                              &report.s, &text.s)) {
            return fail(rc);
        }
        if (!eval_json.empty()) {
            std::FILE* f = std::fopen(eval_json.c_str(), "wb");
            if (!f) {
                std::fprintf(stderr, "error: cannot write %s\n", eval_json.c_str());
                return 1;
            }
            std::fputs(report.s, f);
            std::fclose(f);
        }
        std::fputs(text.s, stdout);
        return 0;
    }

    if (diff->parsed()) {
        StringGuard summary;
        if (ct_status rc = ct_change_detect(diff_a.c_str(), diff_b.c_str(), diff_radius,
                                            diff_cluster,
                                            diff_json.empty() ? nullptr : diff_json.c_str(),
                                            diff_csv.empty() ? nullptr : diff_csv.c_str(),
                                            &summary.s)) {
            return fail(rc);
        }
        std::fputs(summary.s, stdout);
        return 0;
    }

    if (augment->parsed()) {
        for (const auto& input : augment_inputs) {
            if (ct_status rc = ct_augment_file(input.c_str(), augment_out.c_str())) {
                return fail(rc);
            }
        }
        return 0;
    }

    return 2;
}
