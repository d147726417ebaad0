// cslid/io.hpp -- little-endian binary records shared by checkpoints and
// feature files. A tensor record is {u64 name length, name bytes, u64 rank,
// dims as u64 LE, values as f32 LE}.
#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "cslid/tensor.hpp"
#include "cslid/util.hpp"

namespace cslid {

inline void write_u64(std::ostream& os, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  os.write(reinterpret_cast<const char*>(b), 8);
}

inline std::uint64_t read_u64(std::istream& is) {
  unsigned char b[8];
  is.read(reinterpret_cast<char*>(b), 8);
  if (!is) throw DataError("unexpected end of stream while reading u64");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

inline void write_f32(std::ostream& os, float v) {
  std::uint32_t bits;
  std::memcpy(&bits, &v, 4);
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xff);
  os.write(reinterpret_cast<const char*>(b), 4);
}

inline float read_f32(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  if (!is) throw DataError("unexpected end of stream while reading f32");
  std::uint32_t bits = 0;
  for (int i = 0; i < 4; ++i) bits |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  float v;
  std::memcpy(&v, &bits, 4);
  return v;
}

inline void write_tensor_record(std::ostream& os, const std::string& name,
                                const Tensor<float>& t) {
  write_u64(os, name.size());
  os.write(name.data(), static_cast<std::streamsize>(name.size()));
  write_u64(os, static_cast<std::uint64_t>(t.rank()));
  for (Index d : t.shape()) write_u64(os, static_cast<std::uint64_t>(d));
  for (Index i = 0; i < t.numel(); ++i) write_f32(os, t[i]);
}

struct NamedTensor {
  std::string name;
  Tensor<float> tensor;
};

inline NamedTensor read_tensor_record(std::istream& is) {
  NamedTensor out;
  std::uint64_t name_len = read_u64(is);
  if (name_len > (1u << 20)) throw DataError("tensor record: implausible name length");
  out.name.resize(name_len);
  is.read(out.name.data(), static_cast<std::streamsize>(name_len));
  if (!is) throw DataError("tensor record: truncated name");
  std::uint64_t rank = read_u64(is);
  if (rank > 8) throw DataError("tensor record: implausible rank");
  std::vector<Index> shape;
  for (std::uint64_t i = 0; i < rank; ++i)
    shape.push_back(static_cast<Index>(read_u64(is)));
  Tensor<float> t(shape);
  for (Index i = 0; i < t.numel(); ++i) t[i] = read_f32(is);
  out.tensor = std::move(t);
  return out;
}

// Feature files hold a single tensor record named after the utterance.
inline void write_feature_file(const std::string& path, const std::string& id,
                               const Tensor<float>& features) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot open for writing: " + path);
  write_tensor_record(os, id, features);
  if (!os) throw DataError("write failed: " + path);
}

inline Tensor<float> read_feature_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open feature file: " + path);
  NamedTensor rec = read_tensor_record(is);
  if (rec.tensor.rank() != 2) throw DataError("feature file is not a 2-d tensor: " + path);
  return std::move(rec.tensor);
}

}  // namespace cslid
