// Render a twisted pair, compute its entanglement map, and write the heatmap
// next to the depth image.

#include <iostream>

#include "tanglemap/entanglement_map.hpp"
#include "tanglemap/pipeline.hpp"
#include "tanglemap/scenegen.hpp"

namespace tmap = tanglemap;

int main() {
    tmap::SceneConfig scene;
    scene.image_width = scene.image_height = 256;
    auto parts = {tmap::make_part(tmap::PartShape::C, scene.part),
                  tmap::make_part(tmap::PartShape::C, scene.part)};
    tmap::SceneTruth truth = tmap::compose_scene(parts, tmap::Placement::twisted, 3, scene);
    tmap::RenderResult render = tmap::render_depth(truth, scene, 3);

    const tmap::GenerateResult gen = tmap::generate(render.image);
    std::cout << "segments: " << gen.segments.size() << "  writhe: " << gen.coordinate.writhe
              << "  density: " << gen.coordinate.density << "\n";

    tmap::write_depth_png("demo_depth.png", render.image);
    tmap::write_heatmap_png("demo_map.png", gen.map);
    std::cout << "wrote demo_depth.png and demo_map.png\n";
    return 0;
}
