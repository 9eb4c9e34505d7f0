#include "core/reports.hpp"

#include "core/costmodel.hpp"
#include "core/errors.hpp"
#include "core/sha256.hpp"
#include "core/version.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace ctiler {

using Json = nlohmann::ordered_json;

namespace {

// 15 significant digits: hides one-ulp accumulation artefacts (0.44 prints as
// 0.44, not 0.44000000000000006) while staying deterministic.
std::string fmt(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 15);
    return std::string(buf, res.ptr);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc | std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("error writing " + path.string());
}

} // namespace

std::string detections_to_geojson(const std::vector<Detection>& dets, bool world) {
    Json root;
    root["type"] = "FeatureCollection";
    root["crs"] = world ? "world" : "pixel";
    Json features = Json::array();
    for (const auto& d : dets) {
        Json f;
        f["type"] = "Feature";
        Json geom;
        geom["type"] = "Point";
        if (world) {
            if (!d.world) throw std::invalid_argument("detection lacks world coordinates");
            geom["coordinates"] = {d.world->first, d.world->second};
        } else {
            geom["coordinates"] = {d.centroid_x, d.centroid_y};
        }
        f["geometry"] = geom;
        f["properties"] = {{"area_px", d.area_px}, {"region_id", d.region_id}};
        features.push_back(f);
    }
    root["features"] = features;
    return root.dump(2) + "\n";
}

void write_detections_geojson(const std::filesystem::path& path,
                              const std::vector<Detection>& dets, bool world) {
    write_text(path, detections_to_geojson(dets, world));
}

std::string detections_to_csv(const std::vector<Detection>& dets) {
    std::ostringstream out;
    out << "x,y,world_x,world_y,area_px,region_id\n";
    for (const auto& d : dets) {
        out << fmt(d.centroid_x) << ',' << fmt(d.centroid_y) << ',';
        if (d.world) out << fmt(d.world->first);
        out << ',';
        if (d.world) out << fmt(d.world->second);
        out << ',' << d.area_px << ',' << d.region_id << '\n';
    }
    return out.str();
}

void write_detections_csv(const std::filesystem::path& path, const std::vector<Detection>& dets) {
    write_text(path, detections_to_csv(dets));
}

namespace {

std::vector<Detection> read_detections_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open detections file: " + path.string());
    std::vector<Detection> out;
    std::string line;
    if (!std::getline(in, line)) return out;
    if (line.rfind("x,y,", 0) != 0) {
        throw IoError("detections csv is missing its header: " + path.string());
    }
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string f;
        while (std::getline(ss, f, ',')) fields.push_back(f);
        while (fields.size() < 6) fields.emplace_back(); // trailing empties
        Detection d;
        try {
            d.centroid_x = std::stod(fields[0]);
            d.centroid_y = std::stod(fields[1]);
            if (!fields[2].empty() && !fields[3].empty()) {
                d.world = {std::stod(fields[2]), std::stod(fields[3])};
            }
            if (!fields[4].empty()) d.area_px = std::stoll(fields[4]);
            if (!fields[5].empty()) d.region_id = std::stoi(fields[5]);
        } catch (const std::exception&) {
            throw IoError("malformed detections csv line '" + line + "' in " + path.string());
        }
        out.push_back(d);
    }
    return out;
}

std::vector<Detection> read_detections_geojson(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open detections file: " + path.string());
    Json root;
    try {
        in >> root;
    } catch (const Json::parse_error& e) {
        throw IoError("detections file is not valid JSON: " + path.string() + ": " + e.what());
    }
    if (root.value("type", std::string()) != "FeatureCollection") {
        throw IoError("detections geojson must be a FeatureCollection: " + path.string());
    }
    const bool world = root.value("crs", std::string("world")) != "pixel";
    std::vector<Detection> out;
    for (const auto& f : root.value("features", Json::array())) {
        const auto& coords = f.at("geometry").at("coordinates");
        Detection d;
        const double x = coords.at(0).get<double>();
        const double y = coords.at(1).get<double>();
        if (world) {
            // world-units file: pixel coordinates are not recoverable here
            d.world = {x, y};
            d.centroid_x = std::numeric_limits<double>::quiet_NaN();
            d.centroid_y = std::numeric_limits<double>::quiet_NaN();
        } else {
            d.centroid_x = x;
            d.centroid_y = y;
        }
        if (f.contains("properties") && f.at("properties").is_object()) {
            d.area_px = f.at("properties").value("area_px", 0LL);
            d.region_id = f.at("properties").value("region_id", 0);
        }
        out.push_back(d);
    }
    return out;
}

} // namespace

std::vector<Detection> read_detections(const std::filesystem::path& path) {
    const auto ext = path.extension().string();
    if (ext == ".csv") return read_detections_csv(path);
    if (ext == ".geojson" || ext == ".json") return read_detections_geojson(path);
    throw IoError("unsupported detections format '" + ext + "' (use .csv or .geojson): " +
                  path.string());
}

std::string stats_to_json(const RunStats& stats, bool include_timings) {
    Json root;
    Json levels = Json::array();
    for (const auto& lvl : stats.levels) {
        Json l;
        l["level"] = lvl.level;
        l["tile_w"] = lvl.tile.w;
        l["tile_h"] = lvl.tile.h;
        l["tiles_in"] = lvl.tiles_in;
        l["tiles_passed"] = lvl.tiles_passed;
        l["pass_fraction"] = lvl.pass_fraction;
        if (include_timings) {
            l["wall_ms"] = lvl.wall_ms;
        } else {
            l["wall_ms"] = nullptr;
        }
        levels.push_back(l);
    }
    root["levels"] = levels;
    root["segmenter_calls"] = stats.segmenter_calls;
    if (include_timings) {
        root["segment_wall_ms"] = stats.segment_wall_ms;
    } else {
        root["segment_wall_ms"] = nullptr;
    }
    if (!stats.levels.empty() && stats.levels.front().tiles_in > 0) {
        root["estimated_R"] = stats.levels.front().pass_fraction;
    } else {
        root["estimated_R"] = nullptr;
    }
    if (include_timings) {
        try {
            root["estimated_A"] = estimate_params(stats).cost_ratio;
        } catch (const std::exception&) {
            root["estimated_A"] = nullptr;
        }
    } else {
        root["estimated_A"] = nullptr;
    }
    return root.dump(2) + "\n";
}

void write_stats_json(const std::filesystem::path& path, const RunStats& stats,
                      bool include_timings) {
    write_text(path, stats_to_json(stats, include_timings));
}

std::string build_manifest(const RunConfig& cfg, const std::vector<ManifestInput>& inputs,
                           const RunStats& stats,
                           const std::vector<std::filesystem::path>& outputs) {
    Json root;
    root["tool"] = kToolName;
    root["version"] = kToolVersion;
    root["config"] = Json::parse(run_config_to_json(cfg));
    Json ins = Json::array();
    for (const auto& input : inputs) {
        Json i;
        i["role"] = input.role;
        i["path"] = input.path.string();
        i["sha256"] = sha256_file_hex(input.path);
        ins.push_back(i);
    }
    root["inputs"] = ins;
    root["seed"] = cfg.seed;
    root["stats"] = Json::parse(stats_to_json(stats, false));
    Json outs = Json::array();
    for (const auto& o : outputs) outs.push_back(o.string());
    root["outputs"] = outs;
    return root.dump(2) + "\n";
}

void write_manifest(const std::filesystem::path& path, const std::string& manifest_json) {
    write_text(path, manifest_json);
}

std::string eval_report_json(const std::vector<EvalRow>& rows, double radius) {
    Json root;
    root["radius"] = radius;
    Json arr = Json::array();
    long long tp = 0, fp = 0, fn = 0;
    for (const auto& row : rows) {
        Json r;
        r["name"] = row.name;
        r["tp"] = row.result.tp;
        r["fp"] = row.result.fp;
        r["fn"] = row.result.fn;
        r["precision"] = precision(row.result.tp, row.result.fp);
        r["recall"] = recall(row.result.tp, row.result.fn);
        r["f1"] = f1_score(row.result.tp, row.result.fp, row.result.fn);
        arr.push_back(r);
        tp += row.result.tp;
        fp += row.result.fp;
        fn += row.result.fn;
    }
    root["rows"] = arr;
    root["total"] = {{"tp", tp},
                     {"fp", fp},
                     {"fn", fn},
                     {"precision", precision(tp, fp)},
                     {"recall", recall(tp, fn)},
                     {"f1", f1_score(tp, fp, fn)}};
    return root.dump(2) + "\n";
}

std::string eval_report_text(const std::vector<EvalRow>& rows, double radius) {
    std::ostringstream out;
    out << "match radius: " << fmt(radius) << " px\n";
    long long tp = 0, fp = 0, fn = 0;
    for (const auto& row : rows) {
        out << row.name << ": tp=" << row.result.tp << " fp=" << row.result.fp
            << " fn=" << row.result.fn << " precision=" << fmt(precision(row.result.tp, row.result.fp))
            << " recall=" << fmt(recall(row.result.tp, row.result.fn))
            << " f1=" << fmt(f1_score(row.result.tp, row.result.fp, row.result.fn)) << '\n';
        tp += row.result.tp;
        fp += row.result.fp;
        fn += row.result.fn;
    }
    out << "total: tp=" << tp << " fp=" << fp << " fn=" << fn
        << " precision=" << fmt(precision(tp, fp)) << " recall=" << fmt(recall(tp, fn))
        << " f1=" << fmt(f1_score(tp, fp, fn)) << '\n';
    return out.str();
}

namespace {

Json cluster_to_json(const ChangeCluster& c) {
    return Json{{"size", c.size}, {"world_x", c.cx}, {"world_y", c.cy}, {"members", c.members}};
}

} // namespace

std::string change_report_json(const ChangeReport& report, double radius, double cluster_dist) {
    Json root;
    root["radius"] = radius;
    root["cluster_dist"] = cluster_dist;
    Json dis = Json::array();
    for (const auto& c : report.disappeared) dis.push_back(cluster_to_json(c));
    Json app = Json::array();
    for (const auto& c : report.appeared) app.push_back(cluster_to_json(c));
    root["disappeared"] = dis;
    root["appeared"] = app;
    return root.dump(2) + "\n";
}

std::string change_report_csv(const ChangeReport& report) {
    std::ostringstream out;
    out << "kind,cluster_id,size,world_x,world_y\n";
    for (size_t i = 0; i < report.disappeared.size(); ++i) {
        const auto& c = report.disappeared[i];
        out << "disappeared," << i << ',' << c.size << ',' << fmt(c.cx) << ',' << fmt(c.cy) << '\n';
    }
    for (size_t i = 0; i < report.appeared.size(); ++i) {
        const auto& c = report.appeared[i];
        out << "appeared," << i << ',' << c.size << ',' << fmt(c.cx) << ',' << fmt(c.cy) << '\n';
    }
    return out.str();
}

std::string change_report_text(const ChangeReport& report) {
    std::ostringstream out;
    if (report.disappeared.empty() && report.appeared.empty()) {
        out << "no changes\n";
        return out.str();
    }
    out << "disappeared clusters: " << report.disappeared.size() << '\n';
    for (const auto& c : report.disappeared) {
        out << "  size " << c.size << " at (" << fmt(c.cx) << ", " << fmt(c.cy) << ")\n";
    }
    out << "appeared clusters: " << report.appeared.size() << '\n';
    for (const auto& c : report.appeared) {
        out << "  size " << c.size << " at (" << fmt(c.cx) << ", " << fmt(c.cy) << ")\n";
    }
    return out.str();
}

std::string cost_table_text(double pass_fraction, double cost_ratio, int n_max) {
    std::ostringstream out;
    out << "R=" << fmt(pass_fraction) << " A=" << fmt(cost_ratio)
        << " break-even R<" << fmt(break_even_limit(cost_ratio)) << '\n';
    out << "n\tnormalized_time\tbeneficial\n";
    const bool beneficial = is_beneficial(pass_fraction, cost_ratio);
    for (int n = 0; n <= n_max; ++n) {
        out << n << '\t' << fmt(normalized_time(n, pass_fraction, cost_ratio)) << '\t'
            << (beneficial ? "yes" : "no") << '\n';
    }
    if (pass_fraction < 1.0) {
        out << "inf\t" << fmt(asymptotic_time(pass_fraction, cost_ratio)) << '\t'
            << (beneficial ? "yes" : "no") << '\n';
    }
    return out.str();
}

std::string cost_table_csv(double pass_fraction, double cost_ratio, int n_max) {
    std::ostringstream out;
    out << "n,normalized_time,beneficial\n";
    const bool beneficial = is_beneficial(pass_fraction, cost_ratio);
    for (int n = 0; n <= n_max; ++n) {
        out << n << ',' << fmt(normalized_time(n, pass_fraction, cost_ratio)) << ','
            << (beneficial ? 1 : 0) << '\n';
    }
    if (pass_fraction < 1.0) {
        out << "inf," << fmt(asymptotic_time(pass_fraction, cost_ratio)) << ','
            << (beneficial ? 1 : 0) << '\n';
    }
    return out.str();
}

void write_overlay_png(const std::filesystem::path& path, const Raster& map,
                       const std::vector<Detection>& dets) {
    std::vector<uint8_t> rgb(static_cast<size_t>(map.width) * map.height * 3);
    for (size_t i = 0; i < map.pixels.size(); ++i) {
        rgb[3 * i] = map.pixels[i];
        rgb[3 * i + 1] = map.pixels[i];
        rgb[3 * i + 2] = map.pixels[i];
    }
    for (const auto& d : dets) {
        const int cx = static_cast<int>(std::lround(d.centroid_x));
        const int cy = static_cast<int>(std::lround(d.centroid_y));
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
                const int x = cx + dx;
                const int y = cy + dy;
                if (x < 0 || y < 0 || x >= map.width || y >= map.height) continue;
                const size_t i = (static_cast<size_t>(y) * map.width + x) * 3;
                rgb[i] = 255;
                rgb[i + 1] = 0;
                rgb[i + 2] = 0;
            }
        }
    }
    save_rgb_png(path, map.width, map.height, rgb);
}

} // namespace ctiler
