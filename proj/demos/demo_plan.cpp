// Minimal end-to-end use of the library: build a synthetic scene with one
// tangled pair and one free part, plan, and print the ranked grasps.

#include <iostream>

#include "tanglemap/planner.hpp"
#include "tanglemap/scenegen.hpp"

namespace tmap = tanglemap;

int main() {
    tmap::SceneConfig scene;
    scene.image_width = scene.image_height = 256;
    tmap::SceneTruth truth = tmap::make_two_region_scene(scene, 7);
    tmap::RenderResult render = tmap::render_depth(truth, scene, 7);

    tmap::PlannerConfig cfg;
    cfg.grasp.hand.open_width_px = 30;
    cfg.grasp.hand.finger_width_px = 8;
    cfg.grasp.hand.finger_height_px = 5;

    try {
        const tmap::PlanResult r = tmap::plan(render.image, cfg);
        std::cout << "gate: " << tmap::to_string(r.gate_taken) << "  writhe: " << r.coordinate.writhe
                  << "  density: " << r.coordinate.density << "\n";
        for (size_t i = 0; i < r.candidates.size(); i++) {
            const auto& c = r.candidates[i];
            std::cout << i << ": pos=(" << c.pos.x << "," << c.pos.y << ") rot="
                      << c.rotation_index << " score=" << c.score
                      << " entanglement=" << c.entanglement << "\n";
        }
    } catch (const tmap::NoGraspFound&) {
        std::cout << "no grasp found\n";
    }
    return 0;
}
