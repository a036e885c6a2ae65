#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace pulseaf {

enum class Label { NSR, AF, Unlabeled };

const char* to_string(Label label);
Label label_from_string(const std::string& text);

// A mono acoustic recording plus capture metadata.
struct AudioRecording {
    std::vector<double> samples; // full scale is [-1, 1]
    double sample_rate_hz = 48000.0;
    std::string subject_id;
    Label label = Label::Unlabeled;
    std::string scenario = "quiet";

    double duration_s() const {
        return static_cast<double>(samples.size()) / sample_rate_hz;
    }
};

// PCM signed 16-bit, mono, little-endian WAV. Samples are clamped to
// [-1, 1] and scaled by 32767 on write; read divides by 32767 so that a
// written 1.0 round-trips exactly.
void write_wav(const std::filesystem::path& path, const AudioRecording& rec);
AudioRecording read_wav(const std::filesystem::path& path);

// Sidecar JSON written next to each synthesized WAV:
// {subject_id, label, scenario, seed, truth_path}.
struct RecordingMeta {
    std::string subject_id;
    Label label = Label::Unlabeled;
    std::string scenario = "quiet";
    std::uint64_t seed = 0;
    std::string truth_path; // relative to the sidecar's directory; may be empty
};

void write_recording_meta(const std::filesystem::path& path,
                          const RecordingMeta& meta);
RecordingMeta read_recording_meta(const std::filesystem::path& path);

// Atomic text-file write: temp file in the same directory, then rename.
void write_file_atomic(const std::filesystem::path& path,
                       const std::string& contents);

} // namespace pulseaf
