#pragma once

#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "tanglemap/config.hpp"
#include "tanglemap/image_io.hpp"
#include "tanglemap/log.hpp"
#include "tanglemap/planner.hpp"
#include "tanglemap/raster.hpp"
#include "tanglemap/scenegen.hpp"

namespace tanglemap {

namespace exit_code {
constexpr int ok = 0;
constexpr int no_grasp = 2;    // planner found nothing collision-free
constexpr int input_error = 3; // bad files, bad config, bad arguments
} // namespace exit_code

using nlohmann::json;

// ---------------------------------------------------------------------------
// JSON artifacts

inline json grasps_to_json(const std::vector<GraspCandidate>& cands, int rotations) {
    json arr = json::array();
    for (const auto& c : cands) {
        arr.push_back({{"x", c.pos.x},
                       {"y", c.pos.y},
                       {"angle_deg", 180.0 * c.rotation_index / rotations},
                       {"depth_mm", c.depth_mm},
                       {"graspability", c.graspability},
                       {"entanglement", c.entanglement},
                       {"score", c.score}});
    }
    return json{{"candidates", arr}};
}

inline std::vector<GraspCandidate> grasps_from_json(const json& j, int rotations) {
    std::vector<GraspCandidate> out;
    for (const auto& item : j.at("candidates")) {
        GraspCandidate c;
        c.pos = {item.at("x").get<int>(), item.at("y").get<int>()};
        c.rotation_index =
            static_cast<int>(std::lround(item.at("angle_deg").get<double>() * rotations / 180.0));
        c.depth_mm = item.at("depth_mm").get<double>();
        c.graspability = item.at("graspability").get<double>();
        c.entanglement = item.at("entanglement").get<double>();
        c.score = item.at("score").get<double>();
        out.push_back(c);
    }
    return out;
}

inline json coordinate_to_json(const TopologyCoordinate& c, GateTaken gate, size_t segment_count) {
    json j{{"writhe", c.writhe},
           {"density", c.density},
           {"gate_taken", to_string(gate)},
           {"segment_count", segment_count}};
    if (c.center)
        j["center"] = json::array({c.center->first, c.center->second});
    else
        j["center"] = nullptr;
    return j;
}

inline json truth_to_json(const SceneTruth& truth, const SceneConfig& cfg,
                          const std::string& labels_file) {
    json parts = json::array();
    for (const auto& p : truth.parts) {
        json centerline = json::array();
        for (const Vec3& q : p.world_centerline())
            centerline.push_back(json::array({q.x, q.y, q.z}));
        parts.push_back({{"shape", to_string(p.shape)},
                         {"wire_radius_mm", p.wire_radius},
                         {"centerline", centerline}});
    }
    json pairs = json::array();
    for (const auto& pt : truth.pairs) {
        json crossings = json::array();
        for (const Vec2 c : pt.crossings_px) crossings.push_back(json::array({c.x, c.y}));
        pairs.push_back({{"i", pt.i},
                         {"j", pt.j},
                         {"gli_sum", pt.gli_sum},
                         {"linking", pt.linking},
                         {"min_distance_mm", pt.min_distance_mm},
                         {"crossing_count", pt.crossing_count},
                         {"entangling", pt.entangling},
                         {"crossings_px", crossings}});
    }
    json j{{"pattern", truth.pattern},
           {"seed", truth.seed},
           {"free_part_ids", truth.free_part_ids},
           {"parts", parts},
           {"pairs", pairs},
           {"labels_png", labels_file},
           {"image",
            {{"width", cfg.image_width},
             {"height", cfg.image_height},
             {"floor_depth_mm", cfg.floor_depth_mm},
             {"fx", cfg.intrinsics().fx},
             {"fy", cfg.intrinsics().fy},
             {"cx", cfg.intrinsics().cx},
             {"cy", cfg.intrinsics().cy}}}};
    auto rect_json = [](const Rect& r) { return json::array({r.x, r.y, r.w, r.h}); };
    j["tangled_region"] = truth.tangled_region ? rect_json(*truth.tangled_region) : json(nullptr);
    j["free_region"] = truth.free_region ? rect_json(*truth.free_region) : json(nullptr);
    return j;
}

inline void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << j.dump(2) << "\n";
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw IoError("bad JSON in " + path + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// Visualization artifacts

inline void write_heatmap_png(const std::string& path, const EntanglementMap& map) {
    Grid<Rgb> img(map.width(), map.height());
    for (int y = 0; y < map.height(); y++)
        for (int x = 0; x < map.width(); x++) img.at(x, y) = heatmap_color(map.at(x, y));
    write_rgb_png(path, img);
}

/// Matrix visualization: normalized brightness, nearest-neighbor upscale.
inline void write_writhe_matrix_png(const std::string& path, const WritheMatrix& m) {
    const int n = std::max(1, m.size());
    double peak = 0.0;
    m.for_each_upper([&](int, int, double v) { peak = std::max(peak, v); });
    const int side = std::max(256, n);
    MaskGrid img(side, side, 0);
    if (peak > 0.0) {
        for (int y = 0; y < side; y++)
            for (int x = 0; x < side; x++) {
                const int i = y * n / side, j = x * n / side;
                const double v = i < j ? m.at(i, j) : 0.0;
                img.at(x, y) = static_cast<uint8_t>(std::lround(255.0 * v / peak));
            }
    }
    write_gray_png(path, img);
}

inline void write_overlay_png(const std::string& path, const DepthImage& img,
                              const std::vector<GraspCandidate>& cands, int rotations,
                              int open_width_px) {
    Grid<Rgb> rgb(img.width(), img.height());
    float lo = 0.0f, hi = 1.0f;
    try {
        lo = img.min_valid_depth();
        hi = img.max_valid_depth();
    } catch (const EmptyImage&) {
    }
    for (int y = 0; y < img.height(); y++)
        for (int x = 0; x < img.width(); x++) {
            uint8_t g = 0;
            if (img.is_valid(x, y) && hi > lo) {
                const double t = (img.at(x, y) - lo) / (hi - lo);
                g = static_cast<uint8_t>(std::lround(224.0 * (1.0 - t)) + 16); // nearer = brighter
            }
            rgb.at(x, y) = {g, g, g};
        }
    // best grasp in red, the rest in yellow; a bar marks the closing axis
    for (size_t i = cands.size(); i-- > 0;) {
        const auto& c = cands[i];
        const Rgb color = i == 0 ? Rgb{230, 40, 40} : Rgb{230, 200, 40};
        const double a = deg_to_rad(180.0 * c.rotation_index / rotations);
        const Vec2i d{static_cast<int>(std::lround(std::cos(a) * open_width_px / 2.0)),
                      static_cast<int>(std::lround(std::sin(a) * open_width_px / 2.0))};
        draw_line(rgb, {c.pos.x - d.x, c.pos.y - d.y}, {c.pos.x + d.x, c.pos.y + d.y}, color);
        MaskGrid dot(img.width(), img.height(), 0);
        draw_disk(dot, c.pos, 3, 1);
        for (int y = 0; y < dot.height(); y++)
            for (int x = 0; x < dot.width(); x++)
                if (dot.at(x, y)) rgb.at(x, y) = color;
    }
    write_rgb_png(path, rgb);
}

// ---------------------------------------------------------------------------
// Commands

struct PlanOutcome {
    int code = exit_code::ok;
    PlanResult result;
    double elapsed_s = 0.0;
};

/// Plan on a depth PNG and write the artifact set into out_dir:
/// grasps.json, coordinate.json, map.png, overlay.png, writhe_matrix.png.
inline PlanOutcome run_plan(const std::string& depth_path, const RunConfig& cfg,
                            const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    const DepthImage img =
        read_depth_png(depth_path, cfg.camera(), cfg.planner.edge.max_range_mm);

    PlanOutcome out;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        out.result = plan(img, cfg.planner);
    } catch (NoGraspFound& e) {
        out.result = std::move(e.partial);
        out.code = exit_code::no_grasp;
        log_warn("no grasp found for " + depth_path);
    }
    out.elapsed_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const PlanResult& r = out.result;
    write_json_file((fs::path(out_dir) / "grasps.json").string(),
                    grasps_to_json(r.candidates, cfg.planner.grasp.rotations));
    write_json_file((fs::path(out_dir) / "coordinate.json").string(),
                    coordinate_to_json(r.coordinate, r.gate_taken, r.segments.size()));
    const EntanglementMap map =
        r.map ? *r.map : EntanglementMap(img.width(), img.height(), 0.0);
    write_heatmap_png((fs::path(out_dir) / "map.png").string(), map);
    write_writhe_matrix_png((fs::path(out_dir) / "writhe_matrix.png").string(), r.matrix);
    write_overlay_png((fs::path(out_dir) / "overlay.png").string(), img, r.candidates,
                      cfg.planner.grasp.rotations, cfg.planner.grasp.hand.open_width_px);
    return out;
}

/// Generate a corpus of synthetic scenes with ground truth files.
inline int run_gen(const RunConfig& cfg, const std::string& out_dir, int count, uint64_t seed,
                   const std::string& pattern) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    for (int i = 0; i < count; i++) {
        const uint64_t scene_seed = seed + static_cast<uint64_t>(i);
        SceneTruth truth;
        if (pattern == "two_region") {
            truth = make_two_region_scene(cfg.scene, scene_seed);
        } else if (pattern == "twisted" || pattern == "overlapped" || pattern == "separated") {
            const Placement pl = pattern == "twisted"    ? Placement::twisted
                                 : pattern == "overlapped" ? Placement::overlapped
                                                           : Placement::separated;
            truth = compose_scene(
                {make_part(PartShape::C, cfg.scene.part), make_part(PartShape::C, cfg.scene.part)},
                pl, scene_seed, cfg.scene);
        } else if (pattern == "c_only" || pattern == "s_only" || pattern == "mixed") {
            truth = make_pile_scene(cfg.scene, scene_seed, pattern);
        } else {
            throw ConfigError("unknown scene pattern: " + pattern);
        }

        RenderResult render = render_depth(truth, cfg.scene, scene_seed);
        annotate_truth(truth, render);

        std::ostringstream id;
        id << "scene_" << std::setw(4) << std::setfill('0') << i;
        const std::string labels_file = id.str() + "_labels.png";
        write_depth_png((fs::path(out_dir) / (id.str() + ".png")).string(), render.image);
        write_gray_png((fs::path(out_dir) / labels_file).string(), render.labels);
        write_json_file((fs::path(out_dir) / (id.str() + "_truth.json")).string(),
                        truth_to_json(truth, cfg.scene, labels_file));
    }
    return exit_code::ok;
}

struct SceneEval {
    std::string id;
    std::string pattern;
    bool success = false;
    bool no_grasp = false;
    double latency_ms = 0.0;
};

struct EvalReport {
    std::vector<SceneEval> scenes;
    json to_json(double alpha) const {
        std::map<std::string, std::pair<int, int>> per_pattern; // successes, total
        double latency = 0.0;
        json scene_arr = json::array();
        for (const auto& s : scenes) {
            auto& [succ, total] = per_pattern[s.pattern];
            total++;
            if (s.success) succ++;
            latency += s.latency_ms;
            scene_arr.push_back({{"id", s.id},
                                 {"pattern", s.pattern},
                                 {"success", s.success},
                                 {"no_grasp", s.no_grasp},
                                 {"latency_ms", s.latency_ms}});
        }
        json patterns = json::object();
        int succ_all = 0;
        for (const auto& [name, st] : per_pattern) {
            patterns[name] = {{"scenes", st.second},
                              {"successes", st.first},
                              {"rate", st.second ? static_cast<double>(st.first) / st.second : 0.0}};
            succ_all += st.first;
        }
        return json{{"alpha", alpha},
                    {"per_pattern", patterns},
                    {"overall",
                     {{"scenes", scenes.size()},
                      {"successes", succ_all},
                      {"rate", scenes.empty() ? 0.0 : static_cast<double>(succ_all) / scenes.size()}}},
                    {"mean_latency_ms", scenes.empty() ? 0.0 : latency / scenes.size()},
                    {"scenes", scene_arr}};
    }
};

/// Did the top-ranked grasp land on a free part? The gripped part is the most
/// frequent non-floor label under the contact stamp at the pose.
inline bool grasp_on_free_part(const GraspCandidate& top, const MaskGrid& labels,
                               const std::vector<int>& free_ids,
                               const std::vector<HandTemplate>& templates) {
    std::map<int, int> votes;
    for (const Vec2i off : templates[top.rotation_index].contact_offsets) {
        const int x = top.pos.x + off.x, y = top.pos.y + off.y;
        if (!labels.in_bounds(x, y)) continue;
        const int id = labels.at(x, y);
        if (id > 0) votes[id - 1]++;
    }
    if (votes.empty()) return false;
    int best_id = -1, best_votes = -1;
    for (const auto& [id, v] : votes)
        if (v > best_votes) {
            best_id = id;
            best_votes = v;
        }
    for (int id : free_ids)
        if (id == best_id) return true;
    return false;
}

/// Evaluate a generated corpus: for every scene, plan and judge whether the
/// top grasp lies on a ground-truth free part.
inline EvalReport run_eval_report(const std::string& corpus_dir, const RunConfig& cfg) {
    namespace fs = std::filesystem;
    std::vector<std::string> truth_files;
    if (!fs::is_directory(corpus_dir)) throw IoError("not a directory: " + corpus_dir);
    for (const auto& entry : fs::directory_iterator(corpus_dir)) {
        const std::string name = entry.path().filename().string();
        if (name.size() > 11 && name.substr(name.size() - 11) == "_truth.json")
            truth_files.push_back(entry.path().string());
    }
    if (truth_files.empty()) throw MissingTruth("no *_truth.json files in " + corpus_dir);
    std::sort(truth_files.begin(), truth_files.end());

    const auto templates = build_templates(cfg.planner.grasp.hand, cfg.planner.grasp.rotations);

    EvalReport report;
    for (const std::string& tf : truth_files) {
        const json truth = read_json_file(tf);
        const std::string stem = tf.substr(0, tf.size() - 11); // strip _truth.json
        SceneEval ev;
        ev.id = fs::path(stem).filename().string();
        ev.pattern = truth.at("pattern").get<std::string>();

        Intrinsics k{truth.at("image").at("fx").get<double>(),
                     truth.at("image").at("fy").get<double>(),
                     truth.at("image").at("cx").get<double>(),
                     truth.at("image").at("cy").get<double>()};
        const DepthImage img =
            read_depth_png(stem + ".png", k, cfg.planner.edge.max_range_mm);
        const MaskGrid labels =
            read_gray_png((fs::path(corpus_dir) / truth.at("labels_png").get<std::string>()).string());
        const std::vector<int> free_ids = truth.at("free_part_ids").get<std::vector<int>>();

        const auto t0 = std::chrono::steady_clock::now();
        try {
            const PlanResult r = plan(img, cfg.planner);
            ev.success = grasp_on_free_part(r.candidates.front(), labels, free_ids, templates);
        } catch (const NoGraspFound&) {
            ev.no_grasp = true;
            ev.success = false;
        }
        ev.latency_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        report.scenes.push_back(std::move(ev));
    }
    return report;
}

inline int run_eval(const std::string& corpus_dir, const RunConfig& cfg,
                    const std::string& report_path) {
    const EvalReport report = run_eval_report(corpus_dir, cfg);
    write_json_file(report_path, report.to_json(cfg.planner.rank_alpha));
    return exit_code::ok;
}

} // namespace tanglemap
