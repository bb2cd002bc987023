#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ontomatch/nn/tensor.hpp"

namespace ontomatch::nn {

// Pretrained word vectors: column i of `vectors` belongs to words[i].
struct Embeddings {
  std::vector<std::string> words;
  Matrix<float> vectors;  // dim x words

  int dim() const { return static_cast<int>(vectors.rows()); }
  std::size_t size() const { return words.size(); }
};

// Text format: one word per line followed by space-separated numbers. A
// leading "<count> <dim>" header line is accepted and skipped. Every row must
// have the same width, and `expected_dim` when it is positive. Repeated words
// keep their first vector.
Embeddings parse_embeddings(std::istream& in, int expected_dim = 100);
Embeddings read_embeddings_file(const std::string& path, int expected_dim = 100);
void write_embeddings(const Embeddings& embeddings, std::ostream& out);
void write_embeddings_file(const Embeddings& embeddings, const std::string& path);

// Skip-gram with negative sampling over tokenized sentences.
struct SkipGramConfig {
  int dim = 100;
  int window = 5;
  int negatives = 5;
  int epochs = 5;
  int min_count = 1;
  double learning_rate = 0.025;
  std::uint64_t seed = 1;
};

Embeddings train_skipgram(const std::vector<std::vector<std::string>>& sentences, const SkipGramConfig& config = {});

}  // namespace ontomatch::nn
