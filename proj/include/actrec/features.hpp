#ifndef ACTREC_FEATURES_HPP
#define ACTREC_FEATURES_HPP

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "actrec/scene.hpp"
#include "actrec/types.hpp"

namespace actrec {

struct ForegroundMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits;  // 1 = motion foreground

    bool at(int x, int y) const { return bits[static_cast<std::size_t>(y) * width + x] != 0; }
};

// Fixed component order of the per-ROI descriptor.
inline constexpr int kFeatXMin = 0;
inline constexpr int kFeatYMin = 1;
inline constexpr int kFeatXMax = 2;
inline constexpr int kFeatYMax = 3;
inline constexpr int kFeatMeanChange = 4;
inline constexpr int kFeatFillRatio = 5;
inline constexpr int kFeatCxOff = 6;
inline constexpr int kFeatCyOff = 7;

inline constexpr int kComponentDim = 8;
inline constexpr int kFusedDim = kComponentDim * kNumRois;  // 32

using ComponentFeatures = std::array<double, kComponentDim>;
using FusedVector = std::array<double, kFusedDim>;

// Per-step fused 32-vectors, blocks laid out in RoiKind ordinal order.
struct FeatureSequence {
    std::vector<FusedVector> steps;
    std::string fingerprint;  // extraction-config stamp
    bool truncated = false;   // set by subsampling when fewer than cap steps exist

    int n_steps() const { return static_cast<int>(steps.size()); }

    std::span<const double> block(int step, RoiKind roi) const {
        return {steps[static_cast<std::size_t>(step)].data() + roi_id(roi) * kComponentDim,
                kComponentDim};
    }
};

struct FeatureConfig {
    int threshold = 12;  // gray levels, differencing
    int min_area = 25;   // pixels, body-component acceptance

    void validate() const;
    std::string fingerprint() const;
};

ForegroundMask foreground_mask(const std::vector<std::uint8_t>& prev,
                               const std::vector<std::uint8_t>& cur, int width, int height,
                               int threshold);

// Largest 8-connected foreground component, tight box; absent when no
// component reaches min_area. Area ties go to the smaller (y_min, x_min).
std::optional<BoundingBox> detect_body_box(const ForegroundMask& mask, int min_area);

// Vertical bands of the body box: Face 0-15%, Body 15-55% (central 60%
// horizontally), Hand 15-60% (full width), Leg 55-100%. Band edges are
// round(fraction * H), each band forced to at least one pixel.
std::array<BoundingBox, kNumRois> partition_rois(const BoundingBox& body);

ComponentFeatures extract_component_features(const std::vector<std::uint8_t>& prev,
                                             const std::vector<std::uint8_t>& cur, int width,
                                             int height, const BoundingBox& roi,
                                             const ForegroundMask& mask);

FeatureSequence extract_sequence_features(const FrameSequence& frames,
                                          const FeatureConfig& config);

// CSV rows `step,roi,f0..f7`, values with 9 significant digits.
std::string feature_sequence_csv(const FeatureSequence& seq);

}  // namespace actrec

#endif
