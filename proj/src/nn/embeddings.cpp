#include "ontomatch/nn/embeddings.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <unordered_map>
#include <unordered_set>

#include "ontomatch/errors.hpp"
#include "ontomatch/io.hpp"
#include "ontomatch/log.hpp"
#include "ontomatch/random.hpp"

namespace ontomatch::nn {
namespace {

std::vector<std::string_view> split_spaces(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename Number>
bool parse_number(std::string_view s, Number& out) {
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

Embeddings parse_embeddings(std::istream& in, int expected_dim) {
  Embeddings out;
  std::vector<float> values;
  std::unordered_set<std::string> seen;
  int dim = expected_dim > 0 ? expected_dim : -1;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = split_spaces(line);
    if (fields.empty()) continue;
    if (line_no == 1 && fields.size() == 2) {
      long long count = 0;
      long long width = 0;
      if (parse_number(fields[0], count) && parse_number(fields[1], width)) {
        if (dim > 0 && width != dim) {
          throw ParseError("header declares dimension " + std::to_string(width) + ", expected " +
                               std::to_string(dim),
                           line_no);
        }
        dim = static_cast<int>(width);
        continue;
      }
    }
    const int width = static_cast<int>(fields.size()) - 1;
    if (width < 1) throw ParseError("embedding line has no vector", line_no);
    if (dim < 0) dim = width;
    if (width != dim) {
      throw ParseError("expected " + std::to_string(dim) + " numbers, found " + std::to_string(width), line_no);
    }
    std::string word(fields[0]);
    if (!seen.insert(word).second) {
      log_warning("embeddings: repeated word '" + word + "' ignored");
      continue;
    }
    for (int k = 1; k <= width; ++k) {
      float v = 0.0F;
      if (!parse_number(fields[static_cast<std::size_t>(k)], v) || !std::isfinite(v)) {
        throw ParseError("bad number '" + std::string(fields[static_cast<std::size_t>(k)]) + "'", line_no);
      }
      values.push_back(v);
    }
    out.words.push_back(std::move(word));
  }
  if (in.bad()) throw IoError("read error in embedding file");
  out.vectors = Eigen::Map<Matrix<float>>(values.data(), dim < 0 ? 0 : dim, static_cast<Index>(out.words.size()));
  return out;
}

Embeddings read_embeddings_file(const std::string& path, int expected_dim) {
  auto in = open_input(path);
  return parse_embeddings(in, expected_dim);
}

void write_embeddings(const Embeddings& embeddings, std::ostream& out) {
  char buf[32];
  for (std::size_t i = 0; i < embeddings.words.size(); ++i) {
    out << embeddings.words[i];
    for (Index r = 0; r < embeddings.vectors.rows(); ++r) {
      const auto res = std::to_chars(buf, buf + sizeof buf, embeddings.vectors(r, static_cast<Index>(i)));
      out << ' ' << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf));
    }
    out << '\n';
  }
}

void write_embeddings_file(const Embeddings& embeddings, const std::string& path) {
  auto out = open_output(path);
  write_embeddings(embeddings, out);
  check_written(out, path);
}

Embeddings train_skipgram(const std::vector<std::vector<std::string>>& sentences, const SkipGramConfig& config) {
  if (config.dim < 1 || config.window < 1 || config.negatives < 0 || config.epochs < 0) {
    throw ValidationError("skip-gram: invalid configuration");
  }
  std::map<std::string, std::size_t> counts;
  for (const auto& s : sentences) {
    for (const auto& w : s) ++counts[w];
  }
  Embeddings out;
  std::unordered_map<std::string, int> index;
  std::vector<double> freq;
  for (const auto& [w, c] : counts) {
    if (c < static_cast<std::size_t>(config.min_count)) continue;
    index.emplace(w, static_cast<int>(out.words.size()));
    out.words.push_back(w);
    freq.push_back(std::pow(static_cast<double>(c), 0.75));
  }
  const Index n = static_cast<Index>(out.words.size());
  Rng rng(config.seed);
  out.vectors.resize(config.dim, n);
  for (Index i = 0; i < out.vectors.size(); ++i) {
    out.vectors.data()[i] = static_cast<float>(rng.uniform(-0.5, 0.5) / config.dim);
  }
  Matrix<float> context = Matrix<float>::Zero(config.dim, n);
  if (n == 0) return out;

  // Cumulative unigram^0.75 table for negative draws.
  std::vector<double> cumulative(freq.size());
  double total = 0.0;
  for (std::size_t i = 0; i < freq.size(); ++i) cumulative[i] = (total += freq[i]);
  auto draw = [&] {
    const double u = rng.uniform01() * total;
    return static_cast<int>(std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
  };

  std::size_t total_steps = 0;
  for (const auto& s : sentences) total_steps += s.size();
  total_steps *= static_cast<std::size_t>(std::max(config.epochs, 1));
  std::size_t step = 0;
  Eigen::VectorXf grad(config.dim);
  std::vector<int> ids;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    for (const auto& s : sentences) {
      ids.clear();
      for (const auto& w : s) {
        const auto it = index.find(w);
        if (it != index.end()) ids.push_back(it->second);
      }
      for (std::size_t pos = 0; pos < ids.size(); ++pos, ++step) {
        const float lr = static_cast<float>(
            std::max(config.learning_rate * 1e-4,
                     config.learning_rate * (1.0 - static_cast<double>(step) / static_cast<double>(total_steps))));
        const int reach = 1 + static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(config.window)));
        for (int off = -reach; off <= reach; ++off) {
          const auto ctx_pos = static_cast<std::ptrdiff_t>(pos) + off;
          if (off == 0 || ctx_pos < 0 || ctx_pos >= static_cast<std::ptrdiff_t>(ids.size())) continue;
          auto in_vec = out.vectors.col(ids[static_cast<std::size_t>(ctx_pos)]);
          grad.setZero();
          for (int k = 0; k <= config.negatives; ++k) {
            const int target = k == 0 ? ids[pos] : draw();
            if (k > 0 && target == ids[pos]) continue;
            auto out_vec = context.col(target);
            const float label = k == 0 ? 1.0F : 0.0F;
            const float g = (label - 1.0F / (1.0F + std::exp(-in_vec.dot(out_vec)))) * lr;
            grad += g * out_vec;
            out_vec += g * in_vec;
          }
          in_vec += grad;
        }
      }
    }
  }
  return out;
}

}  // namespace ontomatch::nn
