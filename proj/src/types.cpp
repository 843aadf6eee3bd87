#include "actrec/types.hpp"

#include <array>

namespace actrec {

namespace {
const std::array<std::string, kNumClasses> kClassNames = {"walk", "sit", "lift", "putdown",
                                                          "stand"};
const std::array<std::string, kNumRois> kRoiNames = {"face", "hand", "body", "leg"};
}  // namespace

ActivityClass class_from_id(int id) {
    if (id < 0 || id >= kNumClasses) throw ValidationError("activity class id out of range");
    return static_cast<ActivityClass>(id);
}

const std::string& class_name(ActivityClass c) {
    return kClassNames[static_cast<std::size_t>(class_id(c))];
}

ActivityClass class_from_name(const std::string& name) {
    for (int i = 0; i < kNumClasses; ++i)
        if (kClassNames[static_cast<std::size_t>(i)] == name) return static_cast<ActivityClass>(i);
    throw ValidationError("unknown activity class: " + name);
}

RoiKind roi_from_id(int id) {
    if (id < 0 || id >= kNumRois) throw ValidationError("roi id out of range");
    return static_cast<RoiKind>(id);
}

const std::string& roi_name(RoiKind r) { return kRoiNames[static_cast<std::size_t>(roi_id(r))]; }

RoiKind roi_from_name(const std::string& name) {
    for (int i = 0; i < kNumRois; ++i)
        if (kRoiNames[static_cast<std::size_t>(i)] == name) return static_cast<RoiKind>(i);
    throw ValidationError("unknown roi: " + name);
}

void check_box_in_frame(const BoundingBox& box, int width, int height) {
    if (box.x_min < 0 || box.y_min < 0 || box.x_min > box.x_max || box.y_min > box.y_max ||
        box.x_max >= width || box.y_max >= height)
        throw DimensionMismatch("bounding box outside frame");
}

}  // namespace actrec
