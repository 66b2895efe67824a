#ifndef SPMAP_SYNTH_RENDERER_H_
#define SPMAP_SYNTH_RENDERER_H_

#include <vector>

#include "spmap/core/frame.h"
#include "spmap/map/ply_io.h"
#include "spmap/synth/scene.h"

namespace spmap {

// Renders one frame by nearest ray-primitive intersection: exact depth,
// panoptic mask (one frame-local id per visible scene instance), and the
// instance sidecar with seeded thing scores.
Frame renderFrame(const SceneSpec& scene, const Pose& pose, int frame_index);

// Renders the whole trajectory.
std::vector<Frame> renderSequence(const SceneSpec& scene);

// Uniform surface samples of every primitive (and the room shell) with
// semantic and instance labels, at the given sample spacing (meters).
LabeledPoints groundTruthPoints(const SceneSpec& scene, double resolution);

}  // namespace spmap

#endif  // SPMAP_SYNTH_RENDERER_H_
