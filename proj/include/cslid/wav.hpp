// cslid/wav.hpp -- 16-bit little-endian PCM WAV reader/writer (mono).
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "cslid/util.hpp"

namespace cslid {

struct Waveform {
  std::vector<double> samples;  // in [-1, 1)
  int sample_rate = 8000;

  double duration_s() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

namespace wav_detail {

inline std::uint32_t read_u32le(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

inline std::uint16_t read_u16le(std::istream& is) {
  unsigned char b[2];
  is.read(reinterpret_cast<char*>(b), 2);
  return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
}

inline void write_u32le(std::ostream& os, std::uint32_t v) {
  char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
               static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  os.write(b, 4);
}

inline void write_u16le(std::ostream& os, std::uint16_t v) {
  char b[2] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff)};
  os.write(b, 2);
}

}  // namespace wav_detail

inline Waveform read_wav(const std::string& path) {
  using namespace wav_detail;
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open WAV file: " + path);
  char tag[4];
  is.read(tag, 4);
  if (!is || std::string(tag, 4) != "RIFF") throw DataError("not a RIFF file: " + path);
  read_u32le(is);  // riff size
  is.read(tag, 4);
  if (!is || std::string(tag, 4) != "WAVE") throw DataError("not a WAVE file: " + path);

  Waveform w;
  bool have_fmt = false, have_data = false;
  std::uint16_t channels = 0, bits = 0, format = 0;
  std::vector<char> payload;
  while (is.read(tag, 4)) {
    std::uint32_t size = read_u32le(is);
    std::string id(tag, 4);
    if (id == "fmt ") {
      format = read_u16le(is);
      channels = read_u16le(is);
      w.sample_rate = static_cast<int>(read_u32le(is));
      read_u32le(is);  // byte rate
      read_u16le(is);  // block align
      bits = read_u16le(is);
      if (size > 16) is.ignore(size - 16);
      have_fmt = true;
    } else if (id == "data") {
      payload.resize(size);
      is.read(payload.data(), size);
      if (!is) throw DataError("truncated WAV data chunk: " + path);
      have_data = true;
    } else {
      is.ignore(size + (size & 1));
    }
  }
  if (!have_fmt || !have_data) throw DataError("missing fmt/data chunk: " + path);
  if (format != 1) throw DataError("unsupported WAV encoding (PCM expected): " + path);
  if (channels != 1) throw DataError("only mono WAV is supported: " + path);
  if (bits != 16) throw DataError("only 16-bit PCM is supported: " + path);

  std::size_t n = payload.size() / 2;
  w.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::int16_t s = static_cast<std::int16_t>(
        static_cast<unsigned char>(payload[2 * i]) |
        (static_cast<unsigned char>(payload[2 * i + 1]) << 8));
    w.samples[i] = static_cast<double>(s) / 32768.0;
  }
  return w;
}

inline void write_wav(const std::string& path, const Waveform& w) {
  using namespace wav_detail;
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot open for writing: " + path);
  std::uint32_t data_size = static_cast<std::uint32_t>(w.samples.size() * 2);
  os.write("RIFF", 4);
  write_u32le(os, 36 + data_size);
  os.write("WAVE", 4);
  os.write("fmt ", 4);
  write_u32le(os, 16);
  write_u16le(os, 1);  // PCM
  write_u16le(os, 1);  // mono
  write_u32le(os, static_cast<std::uint32_t>(w.sample_rate));
  write_u32le(os, static_cast<std::uint32_t>(w.sample_rate * 2));
  write_u16le(os, 2);
  write_u16le(os, 16);
  os.write("data", 4);
  write_u32le(os, data_size);
  for (double s : w.samples) {
    double scaled = std::clamp(s, -1.0, 1.0 - 1.0 / 32768.0) * 32768.0;
    auto q = static_cast<std::int16_t>(std::lround(scaled));
    write_u16le(os, static_cast<std::uint16_t>(q));
  }
  if (!os) throw DataError("write failed: " + path);
}

}  // namespace cslid
