#include "ontomatch/nn/model.hpp"

#include <bit>
#include <istream>
#include <ostream>

#include "json.hpp"
#include "ontomatch/errors.hpp"
#include "ontomatch/io.hpp"

namespace ontomatch::nn {
namespace {

constexpr char kMagic[8] = {'O', 'M', 'M', 'O', 'D', 'E', 'L', '\0'};
constexpr const char* kFormat = "ontomatch-siamese";

template <typename U>
U byteswap_if_big(U v) {
  if constexpr (std::endian::native == std::endian::big) {
    auto bytes = std::bit_cast<std::array<unsigned char, sizeof(U)>>(v);
    std::reverse(bytes.begin(), bytes.end());
    return std::bit_cast<U>(bytes);
  }
  return v;
}

void write_u64(std::ostream& out, std::uint64_t v) {
  v = byteswap_if_big(v);
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint64_t read_u64(std::istream& in) {
  std::uint64_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw ValidationError("model archive: truncated header");
  return byteswap_if_big(v);
}

nlohmann::json dims_to_json(const Dims& d) {
  return {{"word_dim", d.word_dim},
          {"char_dim", d.char_dim},
          {"filters_per_width", d.filters_per_width},
          {"filter_widths", d.filter_widths},
          {"name_hidden", d.name_hidden},
          {"text_hidden", d.text_hidden},
          {"ff1", d.ff1},
          {"ff2", d.ff2},
          {"combine", d.combine},
          {"n_features", d.n_features}};
}

Dims dims_from_json(const nlohmann::json& j) {
  Dims d;
  d.word_dim = j.at("word_dim").get<int>();
  d.char_dim = j.at("char_dim").get<int>();
  d.filters_per_width = j.at("filters_per_width").get<int>();
  d.filter_widths = j.at("filter_widths").get<std::array<int, 2>>();
  d.name_hidden = j.at("name_hidden").get<int>();
  d.text_hidden = j.at("text_hidden").get<int>();
  d.ff1 = j.at("ff1").get<int>();
  d.ff2 = j.at("ff2").get<int>();
  d.combine = j.at("combine").get<int>();
  d.n_features = j.at("n_features").get<int>();
  for (int v : {d.word_dim, d.char_dim, d.filters_per_width, d.filter_widths[0], d.filter_widths[1], d.name_hidden,
                d.text_hidden, d.ff1, d.ff2, d.combine}) {
    if (v < 1 || v > (1 << 20)) throw ValidationError("model archive: dimension out of range");
  }
  if (d.n_features != 32) throw ValidationError("model archive: expected 32 features");
  return d;
}

}  // namespace

void write_nn_model(const NnModel& model, std::ostream& out) {
  const auto shapes = expected_shapes(model.dims, model.vocab.size(), model.chars.size());
  nlohmann::json arrays = nlohmann::json::array();
  std::size_t i = 0;
  for_each_array(
      [&](std::string_view name, const auto& a) {
        if (shapes[i].first != name || shapes[i].second != ArrayShape{a.rows(), a.cols()}) {
          throw ValidationError("model has array '" + std::string(name) + "' with an unexpected shape");
        }
        arrays.push_back({{"name", name}, {"shape", {a.rows(), a.cols()}}});
        ++i;
      },
      model.params);
  std::vector<std::uint32_t> chars(model.chars.chars().begin(), model.chars.chars().end());
  const nlohmann::json manifest = {{"format", kFormat},
                                   {"layout_version", kModelLayoutVersion},
                                   {"dtype", "float32-le"},
                                   {"dims", dims_to_json(model.dims)},
                                   {"use_features", model.use_features},
                                   {"seed", model.seed},
                                   {"vocab", model.vocab.words()},
                                   {"chars", chars},
                                   {"arrays", arrays}};
  const std::string text = manifest.dump();
  out.write(kMagic, sizeof kMagic);
  write_u64(out, text.size());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for_each_array(
      [&](std::string_view, const auto& a) {
        if constexpr (std::endian::native == std::endian::little) {
          out.write(reinterpret_cast<const char*>(a.data()), static_cast<std::streamsize>(a.size() * sizeof(float)));
        } else {
          for (Index k = 0; k < a.size(); ++k) {
            const auto bits = byteswap_if_big(std::bit_cast<std::uint32_t>(a.data()[k]));
            out.write(reinterpret_cast<const char*>(&bits), sizeof bits);
          }
        }
      },
      model.params);
}

void save_nn_model(const NnModel& model, const std::string& path) {
  auto out = open_output(path, true);
  write_nn_model(model, out);
  check_written(out, path);
}

NnModel read_nn_model(std::istream& in) {
  char magic[sizeof kMagic] = {};
  in.read(magic, sizeof magic);
  if (!in || !std::equal(magic, magic + sizeof magic, kMagic)) {
    throw ValidationError("model archive: bad magic (not a neural model file)");
  }
  const std::uint64_t length = read_u64(in);
  if (length > (std::uint64_t{1} << 32)) throw ValidationError("model archive: manifest too large");
  std::string text(length, '\0');
  in.read(text.data(), static_cast<std::streamsize>(length));
  if (!in) throw ValidationError("model archive: truncated manifest");

  NnModel model;
  std::vector<std::pair<std::string, ArrayShape>> declared;
  try {
    const auto manifest = nlohmann::json::parse(text);
    if (manifest.at("format").get<std::string>() != kFormat) throw ValidationError("model archive: unknown format");
    if (manifest.at("layout_version").get<int>() != kModelLayoutVersion) {
      throw ValidationError("model archive: unsupported layout version");
    }
    if (manifest.at("dtype").get<std::string>() != "float32-le") throw ValidationError("model archive: bad dtype");
    model.dims = dims_from_json(manifest.at("dims"));
    model.use_features = manifest.at("use_features").get<bool>();
    model.seed = manifest.at("seed").get<std::uint64_t>();
    model.vocab = Vocab(manifest.at("vocab").get<std::vector<std::string>>());
    const auto chars = manifest.at("chars").get<std::vector<std::uint32_t>>();
    model.chars = CharVocab(std::vector<char32_t>(chars.begin(), chars.end()));
    for (const auto& a : manifest.at("arrays")) {
      const auto shape = a.at("shape").get<std::array<Index, 2>>();
      declared.push_back({a.at("name").get<std::string>(), {shape[0], shape[1]}});
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("model archive: bad manifest: ") + e.what());
  }

  const auto expected = expected_shapes(model.dims, model.vocab.size(), model.chars.size());
  if (declared.size() != expected.size()) throw ValidationError("model archive: wrong number of arrays");
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (declared[i].first != expected[i].first) {
      throw ValidationError("model archive: expected array '" + expected[i].first + "', found '" +
                            declared[i].first + "'");
    }
    if (declared[i].second != expected[i].second) {
      throw ValidationError("model archive: shape mismatch for '" + expected[i].first + "'");
    }
  }
  model.params = zero_params<float>(model.dims, model.vocab.size(), model.chars.size());
  for_each_array(
      [&](std::string_view name, auto& a) {
        in.read(reinterpret_cast<char*>(a.data()), static_cast<std::streamsize>(a.size() * sizeof(float)));
        if (!in) throw ValidationError("model archive: truncated data for '" + std::string(name) + "'");
        if constexpr (std::endian::native == std::endian::big) {
          for (Index k = 0; k < a.size(); ++k) {
            a.data()[k] = std::bit_cast<float>(byteswap_if_big(std::bit_cast<std::uint32_t>(a.data()[k])));
          }
        }
      },
      model.params);
  if (in.peek() != std::char_traits<char>::eof()) throw ValidationError("model archive: trailing bytes");
  if (!all_finite(model.params)) throw ValidationError("model archive: non-finite parameter");
  return model;
}

NnModel load_nn_model(const std::string& path) {
  auto in = open_input(path, true);
  return read_nn_model(in);
}

bool is_nn_model_file(const std::string& path) {
  auto in = open_input(path, true);
  char magic[sizeof kMagic] = {};
  in.read(magic, sizeof magic);
  return in && std::equal(magic, magic + sizeof magic, kMagic);
}

}  // namespace ontomatch::nn
