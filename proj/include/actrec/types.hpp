#ifndef ACTREC_TYPES_HPP
#define ACTREC_TYPES_HPP

#include <array>
#include <cstdint>
#include <string>

#include "actrec/errors.hpp"

namespace actrec {

// Ordinal ids are serialized in manifests, sidecars and model banks;
// they must never be reordered.
enum class ActivityClass : int {
    Walk = 0,
    Sit = 1,
    Lift = 2,
    PutDown = 3,
    NeutralStand = 4,
};

inline constexpr int kNumClasses = 5;

inline constexpr std::array<ActivityClass, kNumClasses> all_classes() {
    return {ActivityClass::Walk, ActivityClass::Sit, ActivityClass::Lift,
            ActivityClass::PutDown, ActivityClass::NeutralStand};
}

inline int class_id(ActivityClass c) { return static_cast<int>(c); }

ActivityClass class_from_id(int id);
const std::string& class_name(ActivityClass c);
ActivityClass class_from_name(const std::string& name);

// Hand stays at ordinal 1: the vote tie-break keys off this index.
enum class RoiKind : int {
    Face = 0,
    Hand = 1,
    Body = 2,
    Leg = 3,
};

inline constexpr int kNumRois = 4;

inline constexpr std::array<RoiKind, kNumRois> all_rois() {
    return {RoiKind::Face, RoiKind::Hand, RoiKind::Body, RoiKind::Leg};
}

inline int roi_id(RoiKind r) { return static_cast<int>(r); }

RoiKind roi_from_id(int id);
const std::string& roi_name(RoiKind r);
RoiKind roi_from_name(const std::string& name);

// Inclusive pixel box: x_min <= x_max, y_min <= y_max.
struct BoundingBox {
    int x_min = 0;
    int y_min = 0;
    int x_max = 0;
    int y_max = 0;

    int width() const { return x_max - x_min + 1; }
    int height() const { return y_max - y_min + 1; }
    long area() const { return static_cast<long>(width()) * height(); }

    bool contains(int x, int y) const {
        return x >= x_min && x <= x_max && y >= y_min && y <= y_max;
    }

    double center_x() const { return 0.5 * (x_min + x_max); }
    double center_y() const { return 0.5 * (y_min + y_max); }

    bool operator==(const BoundingBox&) const = default;
};

// Throws DimensionMismatch unless the box lies inside a width x height frame.
void check_box_in_frame(const BoundingBox& box, int width, int height);

}  // namespace actrec

#endif
