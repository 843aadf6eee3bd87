#ifndef ACTREC_SCENE_HPP
#define ACTREC_SCENE_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "actrec/types.hpp"

namespace actrec {

// Ordered grayscale rasters, row-major, top-to-bottom.
struct FrameSequence {
    int width = 0;
    int height = 0;
    std::vector<std::vector<std::uint8_t>> frames;

    int n_frames() const { return static_cast<int>(frames.size()); }

    std::uint8_t at(int t, int x, int y) const {
        return frames[static_cast<std::size_t>(t)][static_cast<std::size_t>(y) * width + x];
    }

    bool operator==(const FrameSequence&) const = default;
};

// Throws InvalidConfig / TooFewFrames when the container invariants fail.
void validate_frames(const FrameSequence& frames);

struct SceneConfig {
    int width = 160;
    int height = 120;
    int fps = 24;
    int n_frames = 48;
    ActivityClass activity = ActivityClass::Walk;
    double actor_scale = 0.7;  // fraction of frame height, [0.2, 0.9]
    int background_level = 40;
    std::uint64_t seed = 0;

    void validate() const;
};

// Paper-scale preset: same programs at 640x480.
SceneConfig paper_scale(SceneConfig config);

struct NoiseConfig {
    double pixel_sigma = 0.0;      // gray levels
    double illum_gradient = 0.0;   // gray levels across the frame width
    int distractor_count = 0;
    double distractor_speed = 0.0;  // pixels per frame
    std::uint64_t seed = 0;

    void validate() const;
    bool is_identity() const {
        return pixel_sigma == 0.0 && illum_gradient == 0.0 && distractor_count == 0;
    }
};

struct GroundTruth {
    ActivityClass activity = ActivityClass::NeutralStand;
    std::vector<std::pair<int, int>> event_intervals;  // half-open frame ranges
    std::vector<BoundingBox> actor_track;              // one tight box per frame
};

// Deterministic articulated-blob render of one labeled scene.
std::pair<FrameSequence, GroundTruth> synth_sequence(const SceneConfig& config);

// Additive Gaussian noise + horizontal illumination ramp + moving distractor
// blobs, composited onto a copy of the input.
FrameSequence add_noise(const FrameSequence& frames, const NoiseConfig& noise);

// Closed-form root x of the walk program at frame t, exposed so tests can
// check the renderer against the trajectory itself.
double walk_root_x(const SceneConfig& config, int t);

// FGY1 container: magic "FGY1", u32 width/height/n_frames (LE), then raw
// row-major frames.
void write_fgy1(const std::string& path, const FrameSequence& frames);
FrameSequence read_fgy1(const std::string& path);

}  // namespace actrec

#endif
