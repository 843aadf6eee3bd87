#include "actrec/dataset.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "actrec/rng.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace actrec {

namespace {

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw IoError("malformed json in " + path + ": " + e.what());
    }
    return doc;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << text;
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace

const ManifestEntry& DatasetManifest::find(const std::string& sequence_id) const {
    for (const auto& e : entries)
        if (e.sequence_id == sequence_id) return e;
    throw ValidationError("sequence not in manifest: " + sequence_id);
}

std::vector<std::string> DatasetManifest::ids_of_class(ActivityClass c) const {
    std::vector<std::string> ids;
    for (const auto& e : entries)
        if (e.activity == c) ids.push_back(e.sequence_id);
    return ids;
}

void DatasetManifest::validate() const {
    std::set<std::string> seen;
    for (const auto& e : entries)
        if (!seen.insert(e.sequence_id).second)
            throw ValidationError("duplicate sequence id: " + e.sequence_id);
}

std::string ground_truth_path_for(const std::string& frames_path) {
    fs::path p(frames_path);
    p.replace_extension(".gt.json");
    return p.string();
}

DatasetManifest synth_dataset(const std::string& root, int per_class_count,
                              const SceneConfig& scene_template,
                              const std::optional<NoiseConfig>& noise, std::uint64_t master_seed,
                              const std::string& noise_profile_name) {
    if (per_class_count < 1) throw InvalidConfig("per_class_count must be >= 1");
    scene_template.validate();
    if (noise) noise->validate();

    std::error_code ec;
    fs::create_directories(root, ec);
    if (ec) throw IoError("cannot create dataset directory: " + root);

    DatasetManifest manifest;
    for (ActivityClass activity : all_classes())
        for (int i = 0; i < per_class_count; ++i) {
            SceneConfig cfg = scene_template;
            cfg.activity = activity;
            cfg.seed = mix_seed(master_seed, static_cast<std::uint64_t>(class_id(activity)),
                                static_cast<std::uint64_t>(i));

            auto [frames, gt] = synth_sequence(cfg);
            if (noise) {
                NoiseConfig n = *noise;
                n.seed = mix_seed(cfg.seed, 0x4015EULL);
                frames = add_noise(frames, n);
            }

            char name[64];
            std::snprintf(name, sizeof name, "%s_%03d", class_name(activity).c_str(), i);

            ManifestEntry entry;
            entry.sequence_id = name;
            entry.frames_path = std::string(name) + ".fgy";
            entry.activity = activity;
            entry.n_frames = frames.n_frames();
            entry.seed = cfg.seed;
            entry.noise_profile = noise ? noise_profile_name : "";

            write_fgy1((fs::path(root) / entry.frames_path).string(), frames);
            write_ground_truth(
                (fs::path(root) / ground_truth_path_for(entry.frames_path)).string(), gt);
            manifest.entries.push_back(std::move(entry));
        }

    write_manifest((fs::path(root) / "manifest.json").string(), manifest);
    return manifest;
}

void write_manifest(const std::string& path, const DatasetManifest& manifest) {
    manifest.validate();
    json doc;
    doc["format_version"] = kManifestFormatVersion;
    doc["entries"] = json::array();
    for (const auto& e : manifest.entries) {
        json entry;
        entry["sequence_id"] = e.sequence_id;
        entry["frames"] = e.frames_path;
        entry["class_id"] = class_id(e.activity);
        entry["n_frames"] = e.n_frames;
        entry["seed"] = e.seed;
        entry["noise_profile"] = e.noise_profile;
        doc["entries"].push_back(std::move(entry));
    }
    write_text_file(path, doc.dump(2) + "\n");
}

DatasetManifest load_manifest(const std::string& path) {
    const json doc = read_json_file(path);
    if (!doc.contains("format_version") || doc["format_version"].get<int>() != kManifestFormatVersion)
        throw SchemaVersionMismatch("unsupported manifest format version in " + path);

    DatasetManifest manifest;
    const fs::path dir = fs::path(path).parent_path();
    try {
        for (const auto& entry : doc.at("entries")) {
            ManifestEntry e;
            e.sequence_id = entry.at("sequence_id").get<std::string>();
            e.frames_path = entry.at("frames").get<std::string>();
            e.activity = class_from_id(entry.at("class_id").get<int>());
            e.n_frames = entry.at("n_frames").get<int>();
            e.seed = entry.at("seed").get<std::uint64_t>();
            e.noise_profile = entry.at("noise_profile").get<std::string>();
            manifest.entries.push_back(std::move(e));
        }
    } catch (const json::exception& e) {
        throw IoError("malformed manifest " + path + ": " + e.what());
    }
    manifest.validate();
    for (const auto& e : manifest.entries)
        if (!fs::exists(dir / e.frames_path))
            throw IoError("manifest references missing file: " + e.frames_path);
    return manifest;
}

void write_ground_truth(const std::string& path, const GroundTruth& gt) {
    json doc;
    doc["format_version"] = kManifestFormatVersion;
    doc["class_id"] = class_id(gt.activity);
    doc["intervals"] = json::array();
    for (const auto& [start, end] : gt.event_intervals)
        doc["intervals"].push_back(json::array({start, end}));
    doc["track"] = json::array();
    for (const auto& box : gt.actor_track)
        doc["track"].push_back(json::array({box.x_min, box.y_min, box.x_max, box.y_max}));
    write_text_file(path, doc.dump(2) + "\n");
}

GroundTruth load_ground_truth(const std::string& path) {
    const json doc = read_json_file(path);
    GroundTruth gt;
    try {
        gt.activity = class_from_id(doc.at("class_id").get<int>());
        for (const auto& iv : doc.at("intervals"))
            gt.event_intervals.emplace_back(iv.at(0).get<int>(), iv.at(1).get<int>());
        for (const auto& b : doc.at("track"))
            gt.actor_track.push_back(BoundingBox{b.at(0).get<int>(), b.at(1).get<int>(),
                                                 b.at(2).get<int>(), b.at(3).get<int>()});
    } catch (const json::exception& e) {
        throw IoError("malformed ground truth " + path + ": " + e.what());
    }
    return gt;
}

FrameSequence load_entry_frames(const std::string& manifest_path, const ManifestEntry& entry) {
    return read_fgy1((fs::path(manifest_path).parent_path() / entry.frames_path).string());
}

}  // namespace actrec
