#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "pulseaf/audio.hpp"

namespace pulseaf {

struct ManifestEntry {
    std::string wav_path; // relative to the manifest's directory
    std::string subject_id;
    Label label = Label::Unlabeled;
    std::string scenario = "quiet";
    std::string truth_path; // optional, empty when absent
};

// Line-oriented JSON (one entry per line); appendable and streamable.
struct DatasetManifest {
    std::filesystem::path base_dir;
    std::vector<ManifestEntry> entries;

    std::filesystem::path resolve(const std::string& rel) const {
        const std::filesystem::path p(rel);
        return p.is_absolute() ? p : base_dir / p;
    }
};

void save_manifest(const std::filesystem::path& path,
                   const std::vector<ManifestEntry>& entries);

// Validates on load: subject ids nonempty, labels valid, WAV paths exist.
DatasetManifest load_manifest(const std::filesystem::path& path);

} // namespace pulseaf
