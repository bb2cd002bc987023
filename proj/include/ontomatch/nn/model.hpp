#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "ontomatch/nn/params.hpp"

namespace ontomatch::nn {

// Everything needed to score pairs with a trained network.
struct NnModel {
  Dims dims;
  Vocab vocab;
  CharVocab chars;
  ModelParams<float> params;
  bool use_features = true;  // false: the 32 feature inputs are fed as zeros
  std::uint64_t seed = 0;
};

inline constexpr int kModelLayoutVersion = 1;

// Archive layout: the 8 bytes "OMMODEL\0", a little-endian u64 manifest
// length, the JSON manifest (dims, vocabularies, array names and shapes),
// then every array as little-endian float32 in column-major order.
void write_nn_model(const NnModel& model, std::ostream& out);
void save_nn_model(const NnModel& model, const std::string& path);
// Throws ValidationError on a malformed archive or any shape mismatch.
NnModel read_nn_model(std::istream& in);
NnModel load_nn_model(const std::string& path);

// True when the file starts with the archive magic.
bool is_nn_model_file(const std::string& path);

}  // namespace ontomatch::nn
