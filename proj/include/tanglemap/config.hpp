#pragma once

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "tanglemap/errors.hpp"
#include "tanglemap/planner.hpp"
#include "tanglemap/scenegen.hpp"

namespace tanglemap {

/// Everything a run needs, keyed per module in flat config files.
struct RunConfig {
    PlannerConfig planner;
    SceneConfig scene;
    // camera used when loading external depth PNGs; cx/cy < 0 means image center
    double camera_fx = 914.0, camera_fy = 914.0;
    double camera_cx = -1.0, camera_cy = -1.0;
    uint64_t seed = 0;

    Intrinsics camera() const { return {camera_fx, camera_fy, camera_cx, camera_cy}; }
};

namespace detail {

struct ConfigEntry {
    std::string key;
    std::string doc;
    std::function<std::string(const RunConfig&)> get;
    std::function<void(RunConfig&, const std::string&)> set;
};

inline double parse_double(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("bad numeric value for " + key + ": '" + v + "'");
    }
}

inline long long parse_int(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        const long long i = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return i;
    } catch (const std::exception&) {
        throw ConfigError("bad integer value for " + key + ": '" + v + "'");
    }
}

inline std::string format_double(double d) {
    std::ostringstream os;
    os << d;
    return os.str();
}

inline std::vector<ConfigEntry> config_registry() {
    std::vector<ConfigEntry> r;
    auto dbl = [&](std::string key, std::string doc, auto member) {
        r.push_back({key, doc,
                     [member](const RunConfig& c) { return format_double(std::invoke(member, c)); },
                     [member, key](RunConfig& c, const std::string& v) {
                         std::invoke(member, c) = parse_double(key, v);
                     }});
    };
    auto num = [&](std::string key, std::string doc, auto member) {
        r.push_back({key, doc,
                     [member](const RunConfig& c) { return std::to_string(std::invoke(member, c)); },
                     [member, key](RunConfig& c, const std::string& v) {
                         using T = std::decay_t<decltype(std::invoke(member, c))>;
                         std::invoke(member, c) = static_cast<T>(parse_int(key, v));
                     }});
    };

    // edge extraction
    dbl("edge.grad_threshold_mm_px", "depth gradient high threshold (mm per px)",
        [](auto& c) -> auto& { return c.planner.edge.grad_threshold_mm_px; });
    dbl("edge.hysteresis_low_ratio", "low threshold as a fraction of the high one",
        [](auto& c) -> auto& { return c.planner.edge.hysteresis_low_ratio; });
    num("edge.min_segment_len_px", "discard fitted segments shorter than this",
        [](auto& c) -> auto& { return c.planner.edge.min_segment_len_px; });
    dbl("edge.fit_tolerance_px", "max perpendicular deviation when splitting chains",
        [](auto& c) -> auto& { return c.planner.edge.fit_tolerance_px; });
    dbl("edge.merge_angle_deg", "merge adjacent spans more parallel than this",
        [](auto& c) -> auto& { return c.planner.edge.merge_angle_deg; });
    num("edge.max_segment_len_px", "uniformly subdivide longer segments",
        [](auto& c) -> auto& { return c.planner.edge.max_segment_len_px; });
    num("edge.max_segments", "cap on extracted segments (longest kept)",
        [](auto& c) -> auto& { return c.planner.edge.max_segments; });
    dbl("edge.min_segment_len_mm", "reject 3D segments shorter than this",
        [](auto& c) -> auto& { return c.planner.edge.min_segment_len_mm; });
    dbl("edge.max_range_mm", "valid depth ceiling",
        [](auto& c) -> auto& { return c.planner.edge.max_range_mm; });

    // camera for external depth input
    dbl("camera.fx", "focal length x (px)", [](auto& c) -> auto& { return c.camera_fx; });
    dbl("camera.fy", "focal length y (px)", [](auto& c) -> auto& { return c.camera_fy; });
    dbl("camera.cx", "principal point x; negative = image center",
        [](auto& c) -> auto& { return c.camera_cx; });
    dbl("camera.cy", "principal point y; negative = image center",
        [](auto& c) -> auto& { return c.camera_cy; });

    // entanglement map
    dbl("map.window_frac", "sliding window size as a fraction of each image dim",
        [](auto& c) -> auto& { return c.planner.map.window_frac; });
    dbl("map.stride_frac", "stride as a fraction of the window",
        [](auto& c) -> auto& { return c.planner.map.stride_frac; });
    dbl("map.sigma_w", "initial writhe weight",
        [](auto& c) -> auto& { return c.planner.map.initial_weights.sigma_w; });
    dbl("map.sigma_d", "initial density weight",
        [](auto& c) -> auto& { return c.planner.map.initial_weights.sigma_d; });
    dbl("map.sigma_c", "center mask weight",
        [](auto& c) -> auto& { return c.planner.map.initial_weights.sigma_c; });
    dbl("map.sigma_d_max", "cap on the adapted density weight",
        [](auto& c) -> auto& { return c.planner.map.sigma_d_max; });
    num("map.center_dilation_px", "dilation of the center mask",
        [](auto& c) -> auto& { return c.planner.map.center_dilation_px; });

    // graspability
    num("grasp.open_width_px", "clearance between finger inner faces",
        [](auto& c) -> auto& { return c.planner.grasp.hand.open_width_px; });
    num("grasp.finger_width_px", "finger material thickness",
        [](auto& c) -> auto& { return c.planner.grasp.hand.finger_width_px; });
    num("grasp.finger_height_px", "finger length across the closing axis",
        [](auto& c) -> auto& { return c.planner.grasp.hand.finger_height_px; });
    num("grasp.palm_height_px", "optional palm bar size, 0 = palm above the slice",
        [](auto& c) -> auto& { return c.planner.grasp.hand.palm_height_px; });
    num("grasp.rotations", "number of template orientations over 180 degrees",
        [](auto& c) -> auto& { return c.planner.grasp.rotations; });
    dbl("grasp.depth_mm", "grasp depth below the nearest surface",
        [](auto& c) -> auto& { return c.planner.grasp.grasp_depth_mm; });
    num("grasp.max_slices", "number of binarization slices",
        [](auto& c) -> auto& { return c.planner.grasp.max_slices; });
    dbl("grasp.floor_margin_mm", "keep slices this far above the farthest surface",
        [](auto& c) -> auto& { return c.planner.grasp.floor_margin_mm; });
    dbl("grasp.nms_radius_px", "peak suppression radius; <=0 means finger width",
        [](auto& c) -> auto& { return c.planner.grasp.nms_radius_px; });

    // planner
    dbl("planner.writhe_gate", "tangle-aware planning above this scene writhe",
        [](auto& c) -> auto& { return c.planner.writhe_gate; });
    dbl("planner.region_window_frac", "region window size as a fraction of image dims",
        [](auto& c) -> auto& { return c.planner.region_window_frac; });
    num("planner.regions_k", "number of low-entanglement regions to search",
        [](auto& c) -> auto& { return c.planner.regions_k; });
    num("planner.top_k_per_region", "candidates kept per region",
        [](auto& c) -> auto& { return c.planner.top_k_per_region; });
    dbl("planner.alpha", "entanglement weight in the final score; 0 ignores the map",
        [](auto& c) -> auto& { return c.planner.rank_alpha; });

    // synthetic scenes
    num("scene.image_width", "rendered image width", [](auto& c) -> auto& { return c.scene.image_width; });
    num("scene.image_height", "rendered image height",
        [](auto& c) -> auto& { return c.scene.image_height; });
    dbl("scene.floor_depth_mm", "flat floor depth",
        [](auto& c) -> auto& { return c.scene.floor_depth_mm; });
    dbl("scene.view_width_mm", "scene width covered by the image at floor depth",
        [](auto& c) -> auto& { return c.scene.view_width_mm; });
    dbl("scene.noise_sigma_mm", "Gaussian depth noise",
        [](auto& c) -> auto& { return c.scene.noise_sigma_mm; });
    num("scene.border_invalid_px", "invalidated sensor border",
        [](auto& c) -> auto& { return c.scene.border_invalid_px; });
    dbl("scene.c_radius_mm", "C part centerline radius",
        [](auto& c) -> auto& { return c.scene.part.c_radius_mm; });
    dbl("scene.c_arc_deg", "C part arc angle", [](auto& c) -> auto& { return c.scene.part.c_arc_deg; });
    dbl("scene.s_radius_mm", "S lobe radius", [](auto& c) -> auto& { return c.scene.part.s_radius_mm; });
    dbl("scene.s_arc1_deg", "first S lobe angle",
        [](auto& c) -> auto& { return c.scene.part.s_arc1_deg; });
    dbl("scene.s_arc2_deg", "second S lobe angle",
        [](auto& c) -> auto& { return c.scene.part.s_arc2_deg; });
    dbl("scene.wire_radius_mm", "tube radius", [](auto& c) -> auto& { return c.scene.part.wire_radius_mm; });
    num("scene.centerline_points", "centerline sample count",
        [](auto& c) -> auto& { return c.scene.part.centerline_points; });
    num("scene.pile_count", "parts per pile scene", [](auto& c) -> auto& { return c.scene.pile_count; });
    num("scene.max_attempts", "placement rejection budget",
        [](auto& c) -> auto& { return c.scene.max_attempts; });

    num("seed", "base RNG seed", [](auto& c) -> auto& { return c.seed; });
    return r;
}

} // namespace detail

/// Parse `key = value` lines; '#' starts a comment. Unknown keys are errors.
inline RunConfig parse_config_text(const std::string& text, RunConfig base = {}) {
    const auto registry = detail::config_registry();
    std::map<std::string, const detail::ConfigEntry*> by_key;
    for (const auto& e : registry) by_key[e.key] = &e;

    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        lineno++;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
        };
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        const auto it = by_key.find(key);
        if (it == by_key.end())
            throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        it->second->set(base, value);
    }
    return base;
}

inline RunConfig load_config_file(const std::string& path, RunConfig base = {}) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), base);
}

/// All keys with current values and docs, parseable back as a config file.
inline std::string dump_config(const RunConfig& cfg) {
    std::ostringstream os;
    for (const auto& e : detail::config_registry())
        os << e.key << " = " << e.get(cfg) << "  # " << e.doc << "\n";
    return os.str();
}

} // namespace tanglemap
