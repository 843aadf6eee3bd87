#ifndef ACTREC_DATASET_HPP
#define ACTREC_DATASET_HPP

#include <optional>
#include <string>
#include <vector>

#include "actrec/scene.hpp"

namespace actrec {

struct ManifestEntry {
    std::string sequence_id;
    std::string frames_path;  // relative to the manifest's directory
    ActivityClass activity = ActivityClass::Walk;
    int n_frames = 0;
    std::uint64_t seed = 0;
    std::string noise_profile;  // "" = clean
};

struct DatasetManifest {
    std::vector<ManifestEntry> entries;

    const ManifestEntry& find(const std::string& sequence_id) const;
    std::vector<std::string> ids_of_class(ActivityClass c) const;

    void validate() const;  // unique ids
};

inline constexpr int kManifestFormatVersion = 1;

// Writes per_class_count sequences per class as FGY1 containers with ground
// truth sidecars plus manifest.json under root. The per-sequence seed is
// mix(master_seed, class ordinal, index), so outputs do not depend on
// generation order. `noise` of nullopt means clean frames.
DatasetManifest synth_dataset(const std::string& root, int per_class_count,
                              const SceneConfig& scene_template,
                              const std::optional<NoiseConfig>& noise, std::uint64_t master_seed,
                              const std::string& noise_profile_name = "");

void write_manifest(const std::string& path, const DatasetManifest& manifest);
// Checks that every referenced frame container exists.
DatasetManifest load_manifest(const std::string& path);

void write_ground_truth(const std::string& path, const GroundTruth& gt);
GroundTruth load_ground_truth(const std::string& path);

// Frames referenced from `manifest_path`'s directory.
FrameSequence load_entry_frames(const std::string& manifest_path, const ManifestEntry& entry);

std::string ground_truth_path_for(const std::string& frames_path);

}  // namespace actrec

#endif
