#include "pulseaf/manifest.hpp"

#include <fstream>

#include <json.hpp>

#include "pulseaf/errors.hpp"

namespace pulseaf {

void save_manifest(const std::filesystem::path& path,
                   const std::vector<ManifestEntry>& entries) {
    std::string out;
    for (const ManifestEntry& e : entries) {
        nlohmann::json j;
        j["wav_path"] = e.wav_path;
        j["subject_id"] = e.subject_id;
        j["label"] = to_string(e.label);
        j["scenario"] = e.scenario;
        if (!e.truth_path.empty()) j["truth_path"] = e.truth_path;
        out += j.dump();
        out += '\n';
    }
    write_file_atomic(path, out);
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) raise(ErrorKind::Io, "cannot open manifest: " + path.string());

    DatasetManifest manifest;
    manifest.base_dir = path.parent_path();

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            raise(ErrorKind::Io, "manifest line " + std::to_string(line_no) +
                                     " is not valid JSON: " + e.what());
        }
        ManifestEntry entry;
        entry.wav_path = j.at("wav_path").get<std::string>();
        entry.subject_id = j.at("subject_id").get<std::string>();
        entry.label = label_from_string(j.at("label").get<std::string>());
        entry.scenario = j.value("scenario", std::string("quiet"));
        entry.truth_path = j.value("truth_path", std::string());

        if (entry.subject_id.empty())
            raise(ErrorKind::Config,
                  "manifest line " + std::to_string(line_no) + ": empty subject id");
        if (!std::filesystem::exists(manifest.resolve(entry.wav_path)))
            raise(ErrorKind::Io, "manifest line " + std::to_string(line_no) +
                                     ": missing WAV " + entry.wav_path);
        if (!entry.truth_path.empty() &&
            !std::filesystem::exists(manifest.resolve(entry.truth_path)))
            raise(ErrorKind::Io, "manifest line " + std::to_string(line_no) +
                                     ": missing truth file " + entry.truth_path);
        manifest.entries.push_back(std::move(entry));
    }
    return manifest;
}

} // namespace pulseaf
