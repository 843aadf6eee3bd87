#include "actrec/features.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace actrec {

void FeatureConfig::validate() const {
    if (threshold < 1 || threshold > 255) throw InvalidConfig("threshold outside [1, 255]");
    if (min_area < 1) throw InvalidConfig("min_area must be >= 1");
}

std::string FeatureConfig::fingerprint() const {
    char buf[64];
    std::snprintf(buf, sizeof buf, "feat-v1;th=%d;ma=%d", threshold, min_area);
    return buf;
}

ForegroundMask foreground_mask(const std::vector<std::uint8_t>& prev,
                               const std::vector<std::uint8_t>& cur, int width, int height,
                               int threshold) {
    const std::size_t n = static_cast<std::size_t>(width) * height;
    if (prev.size() != n || cur.size() != n)
        throw DimensionMismatch("frame size does not match mask dimensions");
    if (threshold < 1 || threshold > 255) throw InvalidConfig("threshold outside [1, 255]");

    ForegroundMask mask{width, height, std::vector<std::uint8_t>(n, 0)};
    for (std::size_t i = 0; i < n; ++i)
        mask.bits[i] = std::abs(static_cast<int>(cur[i]) - static_cast<int>(prev[i])) >= threshold;
    return mask;
}

std::optional<BoundingBox> detect_body_box(const ForegroundMask& mask, int min_area) {
    if (min_area < 1) throw InvalidConfig("min_area must be >= 1");
    const int w = mask.width, h = mask.height;
    std::vector<std::uint8_t> visited(mask.bits.size(), 0);
    std::vector<int> stack;

    bool found = false;
    long best_area = 0;
    BoundingBox best{};

    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const std::size_t start = static_cast<std::size_t>(y) * w + x;
            if (!mask.bits[start] || visited[start]) continue;

            long area = 0;
            BoundingBox box{x, y, x, y};
            visited[start] = 1;
            stack.push_back(static_cast<int>(start));
            while (!stack.empty()) {
                const int idx = stack.back();
                stack.pop_back();
                const int cx = idx % w, cy = idx / w;
                ++area;
                box.x_min = std::min(box.x_min, cx);
                box.x_max = std::max(box.x_max, cx);
                box.y_min = std::min(box.y_min, cy);
                box.y_max = std::max(box.y_max, cy);
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int nx = cx + dx, ny = cy + dy;
                        if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
                        const std::size_t ni = static_cast<std::size_t>(ny) * w + nx;
                        if (mask.bits[ni] && !visited[ni]) {
                            visited[ni] = 1;
                            stack.push_back(static_cast<int>(ni));
                        }
                    }
            }

            // Scan order is (y, x) ascending, so on equal area the earlier
            // component already has the lexicographically smaller corner.
            if (area > best_area) {
                best_area = area;
                best = box;
                found = true;
            }
        }

    if (!found || best_area < min_area) return std::nullopt;
    return best;
}

namespace {

long round_frac(double frac, int extent) { return std::lround(frac * extent); }

}  // namespace

std::array<BoundingBox, kNumRois> partition_rois(const BoundingBox& body) {
    const int H = body.height(), W = body.width();
    if (H < 4 || W < 4) throw DegenerateBox("body box smaller than 4x4");

    long e_face = round_frac(0.15, H);
    long e_body = round_frac(0.55, H);
    long e_hand = round_frac(0.60, H);

    // Force each band to at least one pixel row.
    e_face = std::clamp<long>(e_face, 1, H - 2);
    e_body = std::clamp<long>(e_body, e_face + 1, H - 1);
    e_hand = std::clamp<long>(e_hand, e_face + 1, H);

    long l = round_frac(0.20, W);
    long r = round_frac(0.80, W);
    l = std::clamp<long>(l, 0, W - 1);
    r = std::clamp<long>(r, l + 1, W);

    const int x0 = body.x_min, y0 = body.y_min;
    std::array<BoundingBox, kNumRois> rois;
    rois[roi_id(RoiKind::Face)] =
        BoundingBox{x0, y0, body.x_max, y0 + static_cast<int>(e_face) - 1};
    rois[roi_id(RoiKind::Hand)] = BoundingBox{x0, y0 + static_cast<int>(e_face), body.x_max,
                                              y0 + static_cast<int>(e_hand) - 1};
    rois[roi_id(RoiKind::Body)] =
        BoundingBox{x0 + static_cast<int>(l), y0 + static_cast<int>(e_face),
                    x0 + static_cast<int>(r) - 1, y0 + static_cast<int>(e_body) - 1};
    rois[roi_id(RoiKind::Leg)] =
        BoundingBox{x0, y0 + static_cast<int>(e_body), body.x_max, body.y_max};
    return rois;
}

ComponentFeatures extract_component_features(const std::vector<std::uint8_t>& prev,
                                             const std::vector<std::uint8_t>& cur, int width,
                                             int height, const BoundingBox& roi,
                                             const ForegroundMask& mask) {
    try {
        check_box_in_frame(roi, width, height);
    } catch (const DimensionMismatch& e) {
        throw BoxOutOfBounds(e.what());
    }
    if (mask.width != width || mask.height != height)
        throw DimensionMismatch("mask does not match frame dimensions");

    double change_sum = 0.0;
    long fg_count = 0;
    double cx_sum = 0.0, cy_sum = 0.0;
    for (int y = roi.y_min; y <= roi.y_max; ++y)
        for (int x = roi.x_min; x <= roi.x_max; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * width + x;
            change_sum += std::abs(static_cast<int>(cur[i]) - static_cast<int>(prev[i]));
            if (mask.bits[i]) {
                ++fg_count;
                cx_sum += x;
                cy_sum += y;
            }
        }

    const double area = static_cast<double>(roi.area());
    ComponentFeatures f{};
    f[kFeatXMin] = static_cast<double>(roi.x_min) / width;
    f[kFeatYMin] = static_cast<double>(roi.y_min) / height;
    f[kFeatXMax] = static_cast<double>(roi.x_max) / width;
    f[kFeatYMax] = static_cast<double>(roi.y_max) / height;
    f[kFeatMeanChange] = change_sum / (area * 255.0);
    f[kFeatFillRatio] = static_cast<double>(fg_count) / area;
    if (fg_count > 0) {
        // Box-local coordinates: center at (0,0), extent 1.
        f[kFeatCxOff] = (cx_sum / fg_count - roi.center_x()) / roi.width();
        f[kFeatCyOff] = (cy_sum / fg_count - roi.center_y()) / roi.height();
    }
    return f;
}

FeatureSequence extract_sequence_features(const FrameSequence& frames,
                                          const FeatureConfig& config) {
    validate_frames(frames);
    config.validate();

    FeatureSequence out;
    out.fingerprint = config.fingerprint();
    out.steps.reserve(static_cast<std::size_t>(frames.n_frames() - 1));

    BoundingBox carried{0, 0, frames.width - 1, frames.height - 1};
    for (int t = 1; t < frames.n_frames(); ++t) {
        const auto& prev = frames.frames[static_cast<std::size_t>(t - 1)];
        const auto& cur = frames.frames[static_cast<std::size_t>(t)];
        const ForegroundMask mask =
            foreground_mask(prev, cur, frames.width, frames.height, config.threshold);
        // A detection too thin to partition counts as no detection.
        if (auto body = detect_body_box(mask, config.min_area);
            body && body->width() >= 4 && body->height() >= 4)
            carried = *body;

        const auto rois = partition_rois(carried);
        FusedVector fused{};
        for (RoiKind roi : all_rois()) {
            const ComponentFeatures f = extract_component_features(
                prev, cur, frames.width, frames.height, rois[static_cast<std::size_t>(roi_id(roi))], mask);
            std::copy(f.begin(), f.end(), fused.begin() + roi_id(roi) * kComponentDim);
        }
        out.steps.push_back(fused);
    }
    return out;
}

std::string feature_sequence_csv(const FeatureSequence& seq) {
    std::string csv = "step,roi,f0,f1,f2,f3,f4,f5,f6,f7\n";
    char buf[32];
    for (int t = 0; t < seq.n_steps(); ++t)
        for (RoiKind roi : all_rois()) {
            csv += std::to_string(t);
            csv += ',';
            csv += roi_name(roi);
            for (double v : seq.block(t, roi)) {
                std::snprintf(buf, sizeof buf, ",%.9g", v);
                csv += buf;
            }
            csv += '\n';
        }
    return csv;
}

}  // namespace actrec
