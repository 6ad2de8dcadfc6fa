#include "somnoscat/record.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace somnoscat {

namespace fs = std::filesystem;

static_assert(std::endian::native == std::endian::little,
              "on-disk formats assume a little-endian host");

namespace {

const char* kChannelNames[kNumChannels] = {
    "F3-M2", "F4-M1",   "C3-M2",     "C4-M1", "O1-M2",   "O2-M1", "EOG-L",
    "ChinEMG", "Abdominal", "Chest", "Airflow", "SaO2",  "ECG"};

std::string channel_file(int idx) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "ch%02d.f32", idx + 1);
  return buf;
}

std::vector<char> read_all(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ParseError("cannot open " + p.string());
  std::vector<char> data((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
  return data;
}

void write_all(const fs::path& p, const void* data, std::size_t n) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw ParseError("cannot open " + p.string() + " for writing");
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
  if (!out) throw ParseError("write failed: " + p.string());
}

}  // namespace

const char* channel_name(Channel c) { return kChannelNames[static_cast<int>(c)]; }

Channel channel_from_index(int idx) {
  if (idx < 0 || idx >= kNumChannels)
    throw std::out_of_range("channel index out of range");
  return static_cast<Channel>(idx);
}

void PsgRecord::validate() const {
  if (fs != kSampleRate) {
    throw ParseError("record '" + id + "': expected fs=200, got " +
                     std::to_string(fs));
  }
  const std::size_t n = channels[0].size();
  for (int c = 0; c < kNumChannels; ++c) {
    if (channels[c].size() != n) {
      throw ParseError("record '" + id + "': channel " + kChannelNames[c] +
                       " length " + std::to_string(channels[c].size()) +
                       " != " + std::to_string(n));
    }
    for (double v : channels[c]) {
      if (!std::isfinite(v)) {
        throw ParseError("record '" + id + "': non-finite sample in channel " +
                         std::string(kChannelNames[c]));
      }
    }
  }
}

void AnnotationTrack::validate() const {
  if (labels.empty()) throw ParseError("empty track");
  for (std::int8_t v : labels) {
    if (v != -1 && v != 0 && v != 1)
      throw ParseError("annotation label out of {-1,0,1}: " + std::to_string(v));
  }
}

void PredictionTrack::validate() const {
  if (probs.empty()) throw ParseError("empty track");
  for (double p : probs) {
    if (!(p >= 0.0 && p <= 1.0))
      throw ParseError("prediction probability out of [0,1]: " + std::to_string(p));
  }
}

PsgRecord load_record(const fs::path& dir) {
  std::ifstream hdr(dir / "header.txt");
  if (!hdr) throw ParseError("missing header.txt in " + dir.string());

  PsgRecord rec;
  std::size_t declared_n = 0;
  int declared_channels = 0;
  std::string line;
  while (std::getline(hdr, line)) {
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::string key = line.substr(0, eq);
    std::string val = line.substr(eq + 1);
    if (key == "id") rec.id = val;
    else if (key == "fs") rec.fs = std::stod(val);
    else if (key == "n") declared_n = std::stoull(val);
    else if (key == "channels") declared_channels = std::stoi(val);
  }
  if (declared_channels != kNumChannels) {
    throw ParseError("record '" + rec.id + "': expected 13 channels, got " +
                     std::to_string(declared_channels));
  }

  for (int c = 0; c < kNumChannels; ++c) {
    fs::path p = dir / channel_file(c);
    if (!fs::exists(p)) {
      throw ParseError("record '" + rec.id + "': missing channel file " +
                       p.filename().string());
    }
    std::vector<char> raw = read_all(p);
    if (raw.size() % sizeof(float) != 0)
      throw ParseError("truncated float payload: " + p.string());
    std::size_t n = raw.size() / sizeof(float);
    if (n != declared_n) {
      throw ParseError("record '" + rec.id + "': header declares n=" +
                       std::to_string(declared_n) + " but " +
                       p.filename().string() + " has " + std::to_string(n) +
                       " samples");
    }
    const float* f = reinterpret_cast<const float*>(raw.data());
    rec.channels[c].assign(f, f + n);
  }
  rec.validate();
  return rec;
}

void store_record(const PsgRecord& record, const fs::path& dir) {
  record.validate();
  fs::create_directories(dir);
  {
    std::ofstream hdr(dir / "header.txt", std::ios::trunc);
    hdr << "id=" << record.id << "\n"
        << "fs=" << record.fs << "\n"
        << "n=" << record.length() << "\n"
        << "channels=" << kNumChannels << "\n";
    for (int c = 0; c < kNumChannels; ++c)
      hdr << "ch" << (c + 1) << "=" << kChannelNames[c] << "\n";
    if (!hdr) throw ParseError("failed to write header.txt in " + dir.string());
  }
  std::vector<float> buf;
  for (int c = 0; c < kNumChannels; ++c) {
    buf.assign(record.channels[c].begin(), record.channels[c].end());
    write_all(dir / channel_file(c), buf.data(), buf.size() * sizeof(float));
  }
}

AnnotationTrack load_annotations(const fs::path& file) {
  std::vector<char> raw = read_all(file);
  AnnotationTrack track;
  track.labels.assign(reinterpret_cast<const std::int8_t*>(raw.data()),
                      reinterpret_cast<const std::int8_t*>(raw.data()) + raw.size());
  track.validate();
  return track;
}

void store_annotations(const AnnotationTrack& track, const fs::path& file) {
  track.validate();
  write_all(file, track.labels.data(), track.labels.size());
}

PredictionTrack load_predictions(const fs::path& file) {
  std::vector<char> raw = read_all(file);
  if (raw.size() % sizeof(float) != 0)
    throw ParseError("truncated float payload: " + file.string());
  const float* f = reinterpret_cast<const float*>(raw.data());
  PredictionTrack track;
  track.probs.assign(f, f + raw.size() / sizeof(float));
  track.validate();
  return track;
}

void store_predictions(const PredictionTrack& track, const fs::path& file) {
  track.validate();
  std::vector<float> buf(track.probs.begin(), track.probs.end());
  write_all(file, buf.data(), buf.size() * sizeof(float));
}

}  // namespace somnoscat
