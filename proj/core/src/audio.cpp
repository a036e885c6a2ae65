#include "pulseaf/audio.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "pulseaf/errors.hpp"

namespace pulseaf {

namespace {

void put_u32(std::string& out, std::uint32_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
    out.push_back(static_cast<char>((v >> 16) & 0xff));
    out.push_back(static_cast<char>((v >> 24) & 0xff));
}

void put_u16(std::string& out, std::uint16_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
}

std::uint32_t get_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) |
           (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t get_u16(const unsigned char* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

} // namespace

const char* to_string(Label label) {
    switch (label) {
        case Label::NSR: return "NSR";
        case Label::AF: return "AF";
        case Label::Unlabeled: return "unlabeled";
    }
    return "unlabeled";
}

Label label_from_string(const std::string& text) {
    if (text == "NSR") return Label::NSR;
    if (text == "AF") return Label::AF;
    if (text == "unlabeled") return Label::Unlabeled;
    raise(ErrorKind::Config, "unknown label: " + text);
}

void write_wav(const std::filesystem::path& path, const AudioRecording& rec) {
    const std::uint32_t n = static_cast<std::uint32_t>(rec.samples.size());
    const std::uint32_t rate = static_cast<std::uint32_t>(std::llround(rec.sample_rate_hz));
    const std::uint32_t data_bytes = n * 2;

    std::string out;
    out.reserve(44 + data_bytes);
    out += "RIFF";
    put_u32(out, 36 + data_bytes);
    out += "WAVEfmt ";
    put_u32(out, 16);
    put_u16(out, 1); // PCM
    put_u16(out, 1); // mono
    put_u32(out, rate);
    put_u32(out, rate * 2); // byte rate
    put_u16(out, 2);        // block align
    put_u16(out, 16);       // bits per sample
    out += "data";
    put_u32(out, data_bytes);
    for (double s : rec.samples) {
        const double clamped = std::clamp(s, -1.0, 1.0);
        const auto q = static_cast<std::int16_t>(std::lrint(clamped * 32767.0));
        put_u16(out, static_cast<std::uint16_t>(q));
    }
    write_file_atomic(path, out);
}

AudioRecording read_wav(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorKind::Io, "cannot open WAV file: " + path.string());
    std::string buf((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
    const auto* p = reinterpret_cast<const unsigned char*>(buf.data());
    if (buf.size() < 44 || std::memcmp(p, "RIFF", 4) != 0 ||
        std::memcmp(p + 8, "WAVE", 4) != 0)
        raise(ErrorKind::Io, "not a RIFF/WAVE file: " + path.string());

    AudioRecording rec;
    bool have_fmt = false;
    std::size_t pos = 12;
    while (pos + 8 <= buf.size()) {
        const std::uint32_t chunk_size = get_u32(p + pos + 4);
        const bool is_fmt = std::memcmp(p + pos, "fmt ", 4) == 0;
        const bool is_data = std::memcmp(p + pos, "data", 4) == 0;
        const std::size_t body = pos + 8;
        if (body + chunk_size > buf.size())
            raise(ErrorKind::Io, "truncated WAV chunk in " + path.string());
        if (is_fmt) {
            if (chunk_size < 16) raise(ErrorKind::Io, "malformed fmt chunk");
            const std::uint16_t format = get_u16(p + body);
            const std::uint16_t channels = get_u16(p + body + 2);
            const std::uint32_t rate = get_u32(p + body + 4);
            const std::uint16_t bits = get_u16(p + body + 14);
            if (format != 1 || channels != 1 || bits != 16)
                raise(ErrorKind::Io, "expected mono 16-bit PCM: " + path.string());
            rec.sample_rate_hz = static_cast<double>(rate);
            have_fmt = true;
        } else if (is_data) {
            if (!have_fmt) raise(ErrorKind::Io, "data chunk before fmt chunk");
            const std::size_t count = chunk_size / 2;
            rec.samples.resize(count);
            for (std::size_t i = 0; i < count; ++i) {
                const auto raw = static_cast<std::int16_t>(get_u16(p + body + 2 * i));
                rec.samples[i] = static_cast<double>(raw) / 32767.0;
            }
            return rec;
        }
        pos = body + chunk_size + (chunk_size % 2); // chunks are word-aligned
    }
    raise(ErrorKind::Io, "no data chunk found in " + path.string());
}

void write_recording_meta(const std::filesystem::path& path,
                          const RecordingMeta& meta) {
    nlohmann::json j;
    j["subject_id"] = meta.subject_id;
    j["label"] = to_string(meta.label);
    j["scenario"] = meta.scenario;
    j["seed"] = meta.seed;
    j["truth_path"] = meta.truth_path;
    write_file_atomic(path, j.dump(2) + "\n");
}

RecordingMeta read_recording_meta(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) raise(ErrorKind::Io, "cannot open metadata file: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        raise(ErrorKind::Io, "malformed metadata JSON: " + std::string(e.what()));
    }
    RecordingMeta meta;
    meta.subject_id = j.at("subject_id").get<std::string>();
    meta.label = label_from_string(j.at("label").get<std::string>());
    meta.scenario = j.value("scenario", std::string("quiet"));
    meta.seed = j.value("seed", std::uint64_t{0});
    meta.truth_path = j.value("truth_path", std::string());
    return meta;
}

void write_file_atomic(const std::filesystem::path& path,
                       const std::string& contents) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) raise(ErrorKind::Io, "cannot write file: " + tmp.string());
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!out) raise(ErrorKind::Io, "short write: " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) raise(ErrorKind::Io, "cannot rename into place: " + path.string());
}

} // namespace pulseaf
