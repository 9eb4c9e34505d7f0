#include "core/config.hpp"

#include "core/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace ctiler {

using Json = nlohmann::ordered_json;

RunConfig default_run_config() {
    RunConfig cfg;
    cfg.segmenter.kind = "heuristic";
    return cfg;
}

namespace {

BackendSpec parse_backend(const Json& j, const std::string& where) {
    BackendSpec spec;
    if (!j.is_object()) throw ConfigError(where + " must be an object");
    spec.kind = j.value("kind", std::string("heuristic"));
    spec.rho = j.value("rho", spec.rho);
    spec.confidence = j.value("confidence", spec.confidence);
    if (j.contains("command")) {
        for (const auto& a : j.at("command")) {
            spec.command.push_back(a.get<std::string>());
        }
    }
    if (spec.rho <= 0.0) throw ConfigError(where + ".rho must be positive");
    if (spec.confidence < 0.0 || spec.confidence > 1.0) {
        throw ConfigError(where + ".confidence must lie in [0, 1]");
    }
    return spec;
}

Json backend_to_json(const BackendSpec& spec) {
    Json j;
    j["kind"] = spec.kind;
    if (spec.kind == "heuristic") j["rho"] = spec.rho;
    if (spec.kind == "fixed") j["confidence"] = spec.confidence;
    if (spec.kind == "external") j["command"] = spec.command;
    return j;
}

std::string resolve_path(const std::string& path, const std::filesystem::path& base_dir) {
    if (path.empty()) return path;
    std::filesystem::path p(path);
    if (p.is_absolute()) return p.string();
    return (base_dir / p).lexically_normal().string();
}

} // namespace

RunConfig parse_run_config(const std::string& json_text, const std::filesystem::path& base_dir) {
    Json j;
    try {
        j = Json::parse(json_text);
    } catch (const Json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");

    RunConfig cfg = default_run_config();
    const int version = j.value("schema_version", 1);
    if (version != 1) {
        throw ConfigError("unsupported config schema_version " + std::to_string(version));
    }
    cfg.schema_version = version;
    cfg.seed = j.value("seed", cfg.seed);
    cfg.pad_value = j.value("pad_value", cfg.pad_value);
    cfg.workers = j.value("workers", cfg.workers);
    cfg.classify = j.value("classify", cfg.classify);

    if (j.contains("schedule")) {
        cfg.schedule.clear();
        for (const auto& level : j.at("schedule")) {
            if (!level.is_array() || level.size() != 2) {
                throw ConfigError("schedule entries must be [tile_w, tile_h] pairs");
            }
            cfg.schedule.push_back({level[0].get<int>(), level[1].get<int>()});
        }
    }
    try {
        validate_schedule(cfg.schedule);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("bad schedule: ") + e.what());
    }

    if (j.contains("thresholds")) {
        for (const auto& t : j.at("thresholds")) cfg.thresholds.push_back(t.get<double>());
        if (cfg.thresholds.size() != cfg.schedule.size()) {
            throw ConfigError("thresholds must list one value per schedule level");
        }
        for (double t : cfg.thresholds) {
            if (t < 0.0 || t > 1.0) throw ConfigError("thresholds must lie in [0, 1]");
        }
    }

    if (j.contains("classifier")) cfg.classifier = parse_backend(j.at("classifier"), "classifier");
    if (j.contains("classifiers")) {
        for (const auto& c : j.at("classifiers")) {
            cfg.classifiers.push_back(parse_backend(c, "classifiers[]"));
        }
        if (cfg.classifiers.size() != cfg.schedule.size()) {
            throw ConfigError("classifiers must list one backend per schedule level");
        }
    }
    if (j.contains("segmenter")) cfg.segmenter = parse_backend(j.at("segmenter"), "segmenter");

    cfg.truth_mask = resolve_path(j.value("truth_mask", std::string()), base_dir);

    if (j.contains("error_model")) {
        const auto& em = j.at("error_model");
        cfg.error_model.fp_rate = em.value("fp_rate", 0.0);
        cfg.error_model.fn_base = em.value("fn_base", 0.0);
        cfg.error_model.edge_penalty = em.value("edge_penalty", 0.0);
        cfg.error_model.frac_floor = em.value("frac_floor", 0.0);
        try {
            validate_error_model(cfg.error_model);
        } catch (const std::exception& e) {
            throw ConfigError(std::string("bad error_model: ") + e.what());
        }
    }
    cfg.error_model.seed = cfg.seed;

    if (j.contains("stitch")) {
        const auto& s = j.at("stitch");
        cfg.stitch.connectivity = s.value("connectivity", 8);
        cfg.stitch.min_area = s.value("min_area", cfg.stitch.min_area);
        if (cfg.stitch.connectivity != 4 && cfg.stitch.connectivity != 8) {
            throw ConfigError("stitch.connectivity must be 4 or 8");
        }
    }

    if (cfg.pad_value < 0 || cfg.pad_value > 255) {
        throw ConfigError("pad_value must lie in [0, 255]");
    }
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_run_config(buf.str(), path.parent_path());
}

std::vector<double> resolved_thresholds(const RunConfig& cfg) {
    if (!cfg.thresholds.empty()) return cfg.thresholds;
    std::vector<double> out(cfg.schedule.size(), 0.5);
    if (!out.empty()) out.back() = 0.35; // favour recall where context is scarcest
    return out;
}

long long resolved_min_area(const RunConfig& cfg) {
    if (cfg.stitch.min_area >= 0) return cfg.stitch.min_area;
    return cfg.segmenter.kind == "oracle" ? 0 : 6;
}

std::string run_config_to_json(const RunConfig& cfg) {
    Json j;
    j["schema_version"] = cfg.schema_version;
    j["seed"] = cfg.seed;
    j["pad_value"] = cfg.pad_value;
    j["workers"] = cfg.workers;
    Json schedule = Json::array();
    for (const auto& level : cfg.schedule) schedule.push_back({level.w, level.h});
    j["schedule"] = schedule;
    j["thresholds"] = resolved_thresholds(cfg);
    j["classify"] = cfg.classify;
    if (cfg.classifiers.empty()) {
        j["classifier"] = backend_to_json(cfg.classifier);
    } else {
        Json arr = Json::array();
        for (const auto& c : cfg.classifiers) arr.push_back(backend_to_json(c));
        j["classifiers"] = arr;
    }
    j["segmenter"] = backend_to_json(cfg.segmenter);
    if (!cfg.truth_mask.empty()) j["truth_mask"] = cfg.truth_mask;
    j["error_model"] = {{"fp_rate", cfg.error_model.fp_rate},
                        {"fn_base", cfg.error_model.fn_base},
                        {"edge_penalty", cfg.error_model.edge_penalty},
                        {"frac_floor", cfg.error_model.frac_floor}};
    j["stitch"] = {{"connectivity", cfg.stitch.connectivity},
                   {"min_area", resolved_min_area(cfg)}};
    return j.dump(2) + "\n";
}

namespace {

std::shared_ptr<const GroundTruth> load_truth(const RunConfig& cfg) {
    if (cfg.truth_mask.empty()) {
        throw ConfigError("oracle backends need a truth_mask path in the config");
    }
    auto truth = std::make_shared<GroundTruth>();
    truth->truth_mask = load_mask_png(cfg.truth_mask);
    return truth;
}

} // namespace

CascadeConfig build_cascade_config(const RunConfig& cfg, const std::filesystem::path& work_dir) {
    CascadeConfig out;
    out.schedule = cfg.schedule;
    out.pad_value = static_cast<uint8_t>(cfg.pad_value);
    out.workers = cfg.workers;

    std::shared_ptr<const GroundTruth> truth;
    auto truth_once = [&]() {
        if (!truth) truth = load_truth(cfg);
        return truth;
    };

    const auto thresholds = resolved_thresholds(cfg);
    auto make_classifier = [&](const BackendSpec& spec, size_t level_index)
        -> std::shared_ptr<Classifier> {
        const double tau = thresholds[level_index];
        const Extent dims = cfg.schedule[level_index];
        if (spec.kind == "heuristic") {
            // rho is a response *fraction* calibrated at the 256x256 scale.
            // Tiles larger than that dilute a building's ink by their area,
            // so the threshold is scaled down to keep the implied absolute
            // ink evidence constant; smaller tiles keep rho as-is.
            const double area = static_cast<double>(dims.w) * dims.h;
            const double rho = spec.rho * std::min(1.0, (256.0 * 256.0) / area);
            return std::make_shared<HeuristicClassifier>(tau, rho, dims);
        }
        if (spec.kind == "oracle") {
            return std::make_shared<OracleClassifier>(truth_once(), cfg.error_model);
        }
        if (spec.kind == "fixed") {
            return std::make_shared<FixedClassifier>(spec.confidence, tau);
        }
        if (spec.kind == "external") {
            return std::make_shared<ExternalClassifier>(spec.command, work_dir, tau);
        }
        throw ConfigError("unknown classifier kind '" + spec.kind + "'");
    };

    if (cfg.classify) {
        for (size_t i = 0; i < cfg.schedule.size(); ++i) {
            const BackendSpec& spec = cfg.classifiers.empty() ? cfg.classifier : cfg.classifiers[i];
            out.classifiers.push_back(make_classifier(spec, i));
        }
    }

    if (cfg.segmenter.kind == "heuristic") {
        out.segmenter = std::make_shared<HeuristicSegmenter>();
    } else if (cfg.segmenter.kind == "oracle") {
        out.segmenter = std::make_shared<OracleSegmenter>(truth_once());
    } else if (cfg.segmenter.kind == "external") {
        out.segmenter = std::make_shared<ExternalSegmenter>(cfg.segmenter.command, work_dir);
    } else if (cfg.segmenter.kind == "empty") {
        class EmptySegmenter : public Segmenter {
        public:
            BinaryMask segment(const Raster& tile, const TileRef&) const override {
                return BinaryMask(tile.width, tile.height);
            }
        };
        out.segmenter = std::make_shared<EmptySegmenter>();
    } else {
        throw ConfigError("unknown segmenter kind '" + cfg.segmenter.kind + "'");
    }
    return out;
}

} // namespace ctiler
