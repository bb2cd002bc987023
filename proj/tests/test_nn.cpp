#include <cmath>
#include <cstring>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "ontomatch/nn/embeddings.hpp"
#include "ontomatch/nn/grad_check.hpp"
#include "ontomatch/nn/model.hpp"
#include "ontomatch/nn/trainer.hpp"

using namespace ontomatch;
using namespace ontomatch::nn;

namespace {

Dims tiny_dims() {
  Dims d;
  d.word_dim = 6;
  d.char_dim = 3;
  d.filters_per_width = 4;
  d.name_hidden = 5;
  d.text_hidden = 4;
  d.ff1 = 7;
  d.ff2 = 5;
  d.combine = 6;
  return d;
}

template <typename T>
ModelParams<T> random_params(const Dims& d, int vocab, int chars, std::uint64_t seed) {
  Rng rng(seed);
  ModelParams<T> p = zero_params<T>(d, vocab, chars);
  init_params(p, d, rng);
  for (Index i = 0; i < p.word_vectors.size(); ++i) p.word_vectors.data()[i] = static_cast<T>(rng.uniform(-1, 1));
  // Positive biases keep most ReLUs away from their kink.
  for (auto* b : {&p.ff1.b, &p.ff2.b, &p.combine.b, &p.conv[0].b, &p.conv[1].b}) {
    for (Index i = 0; i < b->size(); ++i) (*b)(i) = static_cast<T>(rng.uniform(0, 0.3));
  }
  return p;
}

NameToken token(Rng& rng, int word, int length, int chars) {
  NameToken t;
  t.word = word;
  for (int i = 0; i < length; ++i) t.chars.push_back(2 + static_cast<int>(rng.uniform_index(chars - 2)));
  return t;
}

std::pair<EntityInput, EntityInput> random_pair(Rng& rng, int vocab, int chars) {
  auto word = [&] { return rng.bernoulli(0.15) ? -1 : static_cast<int>(rng.uniform_index(vocab)); };
  auto name = [&] {
    NameSeq s;
    const int n = 1 + static_cast<int>(rng.uniform_index(3));
    for (int i = 0; i < n; ++i) s.push_back(token(rng, word(), 1 + static_cast<int>(rng.uniform_index(8)), chars));
    return s;
  };
  auto text = [&](int max) {
    TextSeq s;
    const int n = 1 + static_cast<int>(rng.uniform_index(max));
    for (int i = 0; i < n; ++i) s.push_back(word());
    return s;
  };
  auto entity = [&] {
    EntityInput e;
    e.name = name();
    const int aliases = static_cast<int>(rng.uniform_index(3));
    for (int i = 0; i < aliases; ++i) e.aliases.push_back(name());
    if (e.aliases.empty()) e.aliases.push_back(e.name);
    if (rng.bernoulli(0.6)) e.definition = text(6);
    const int contexts = static_cast<int>(rng.uniform_index(3));
    for (int i = 0; i < contexts; ++i) e.contexts.push_back(text(5));
    return e;
  };
  EntityInput s = entity();
  EntityInput t = entity();
  return {s, t};
}

// Plain-loop LSTM over a sequence of input columns, gate order i, f, g, o.
template <typename T>
std::vector<double> lstm_oracle(const LstmParams<T>& p, const std::vector<std::vector<double>>& xs) {
  const Index h = p.wh.cols();
  std::vector<double> hs(static_cast<std::size_t>(h), 0.0), cs(static_cast<std::size_t>(h), 0.0);
  auto sig = [](double z) { return 1.0 / (1.0 + std::exp(-z)); };
  for (const auto& x : xs) {
    std::vector<double> z(static_cast<std::size_t>(4 * h));
    for (Index r = 0; r < 4 * h; ++r) {
      double acc = static_cast<double>(p.b(r));
      for (std::size_t k = 0; k < x.size(); ++k) acc += static_cast<double>(p.wx(r, static_cast<Index>(k))) * x[k];
      for (Index k = 0; k < h; ++k) acc += static_cast<double>(p.wh(r, k)) * hs[static_cast<std::size_t>(k)];
      z[static_cast<std::size_t>(r)] = acc;
    }
    std::vector<double> next(static_cast<std::size_t>(h));
    for (Index j = 0; j < h; ++j) {
      const auto u = static_cast<std::size_t>(j);
      const double i = sig(z[u]);
      const double f = sig(z[u + h]);
      const double g = std::tanh(z[u + 2 * h]);
      const double o = sig(z[u + 3 * h]);
      cs[u] = f * cs[u] + i * g;
      next[u] = o * std::tanh(cs[u]);
    }
    hs = next;
  }
  return hs;
}

// Char CNN by explicit loops: pad to the widest filter, convolve, max over
// positions, ReLU.
template <typename T>
std::vector<double> char_cnn_oracle(const ModelParams<T>& p, const Dims& d, std::vector<int> chars) {
  while (chars.size() < static_cast<std::size_t>(d.min_char_length())) chars.push_back(CharVocab::kPad);
  std::vector<double> out;
  for (int k = 0; k < 2; ++k) {
    const int width = d.filter_widths[static_cast<std::size_t>(k)];
    for (int f = 0; f < d.filters_per_width; ++f) {
      double best = -1e300;
      for (std::size_t pos = 0; pos + static_cast<std::size_t>(width) <= chars.size(); ++pos) {
        double acc = static_cast<double>(p.conv[static_cast<std::size_t>(k)].b(f));
        for (int w = 0; w < width; ++w) {
          for (int c = 0; c < d.char_dim; ++c) {
            acc += static_cast<double>(p.conv[static_cast<std::size_t>(k)].w(f, w * d.char_dim + c)) *
                   static_cast<double>(p.char_embed(c, chars[pos + static_cast<std::size_t>(w)]));
          }
        }
        best = std::max(best, acc);
      }
      out.push_back(std::max(best, 0.0));
    }
  }
  return out;
}

}  // namespace

TEST_CASE("zero parameters give zero encodings and probability one half") {
  const Dims d;
  const auto p = zero_params<double>(d, 5, 10);
  const NameSeq name = {{1, {2, 3, 4}}, {-1, {5}}};
  SeqTape<double> tape;
  const Vector<double> v = encode_name(p, d, name, {}, tape);
  CHECK(v.size() == 200);
  CHECK(v.isZero(0.0));
  SeqTape<double> text_tape;
  CHECK(encode_text(p, d, TextSeq{0, 1, -1}, {}, text_tape).isZero(0.0));
  const Vector<double> zero = Vector<double>::Zero(d.entity_dim());
  const Vector<double> f = Vector<double>::Constant(32, 0.7);
  CHECK(score(p, d, zero, zero, f) == 0.5);
}

TEST_CASE("shapes") {
  const Dims d;
  CHECK(d.name_output() == 200);
  CHECK(d.text_output() == 200);
  CHECK(d.entity_dim() == 800);
  CHECK(d.combine_input() == 288);
  CHECK(d.char_features() == 100);
  const auto p = random_params<float>(d, 30, 20, 1);
  Rng rng(2);
  for (int len : {1, 3, 17}) {
    NameSeq name;
    TextSeq text;
    for (int i = 0; i < len; ++i) {
      name.push_back(token(rng, i % 30, 1 + i % 9, 20));
      text.push_back(i % 30);
    }
    SeqTape<float> t1, t2;
    CHECK(encode_name(p, d, name, {}, t1).size() == 200);
    CHECK(encode_text(p, d, text, {}, t2).size() == 200);
  }
  SeqTape<float> t;
  CHECK_THROWS_AS(encode_name(p, d, NameSeq{}, {}, t), ValidationError);
  CHECK_THROWS_AS(encode_text(p, d, TextSeq{}, {}, t), ValidationError);
  const Vector<float> bad = Vector<float>::Zero(799);
  const Vector<float> good = Vector<float>::Zero(800);
  CHECK_THROWS_AS(score(p, d, bad, good, Vector<float>(Vector<float>::Zero(32))), ValidationError);
  CHECK_THROWS_AS(score(p, d, good, good, Vector<float>(Vector<float>::Zero(31))), ValidationError);
}

TEST_CASE("single LSTM step matches values from an external script") {
  Dims d = tiny_dims();
  d.word_dim = 1;
  d.text_hidden = 1;
  auto p = zero_params<double>(d, 2, 4);
  p.word_vectors(0, 0) = 1.0;
  p.word_vectors(0, 1) = -2.0;
  p.text_fwd.wx << 0.5, -0.3, 0.8, 0.2;
  p.text_bwd.wx << -0.5, 0.0, 0.4, 0.9;
  for (auto* l : {&p.text_fwd, &p.text_bwd}) {
    l->wh << 0.1, 0.2, 0.3, 0.4;
    l->b << 0.0, 1.0, 0.0, 0.0;
  }
  SeqTape<double> tape;
  const Vector<double> one = encode_text(p, d, TextSeq{0}, {}, tape);
  CHECK(one(0) == doctest::Approx(0.215150849293).epsilon(1e-10));
  CHECK(one(1) == doctest::Approx(0.101289209067).epsilon(1e-10));
  const Vector<double> two = encode_text(p, d, TextSeq{0, 1}, {}, tape);
  CHECK(two(0) == doctest::Approx(0.040979243377).epsilon(1e-10));
  CHECK(two(1) == doctest::Approx(-0.150775247551).epsilon(1e-10));
}

TEST_CASE("encoders agree with loop oracles on random parameters") {
  const Dims d = tiny_dims();
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto p = random_params<double>(d, 10, 12, seed);
    Rng rng(seed + 100);
    NameSeq name;
    for (int i = 0; i < 3; ++i) name.push_back(token(rng, i == 1 ? -1 : i, 1 + static_cast<int>(rng.uniform_index(7)), 12));
    std::vector<std::vector<double>> xs;
    for (const NameToken& t : name) {
      std::vector<double> x;
      for (int k = 0; k < d.word_dim; ++k) {
        x.push_back(t.word < 0 ? p.unk_vector(k) : p.word_vectors(k, t.word));
      }
      const auto c = char_cnn_oracle(p, d, t.chars);
      x.insert(x.end(), c.begin(), c.end());
      xs.push_back(x);
    }
    const auto fwd = lstm_oracle(p.name_fwd, xs);
    std::reverse(xs.begin(), xs.end());
    const auto bwd = lstm_oracle(p.name_bwd, xs);
    SeqTape<double> tape;
    const Vector<double> v = encode_name(p, d, name, {}, tape);
    for (int k = 0; k < d.name_hidden; ++k) {
      CHECK(v(k) == doctest::Approx(fwd[static_cast<std::size_t>(k)]).epsilon(1e-12));
      CHECK(v(d.name_hidden + k) == doctest::Approx(bwd[static_cast<std::size_t>(k)]).epsilon(1e-12));
    }
  }
}

TEST_CASE("context mean") {
  const Dims d = tiny_dims();
  const auto p = random_params<double>(d, 10, 12, 3);
  std::vector<SeqTape<double>> tapes;
  CHECK(encode_contexts(p, d, {}, {}, tapes).isZero(0.0));
  CHECK(encode_contexts(p, d, {}, {}, tapes).size() == d.text_output());
  SeqTape<double> tape;
  const Vector<double> u = encode_text(p, d, TextSeq{1, 2, 3}, {}, tape);
  const Vector<double> v = encode_text(p, d, TextSeq{4, -1}, {}, tape);
  CHECK(encode_contexts(p, d, {TextSeq{1, 2, 3}}, {}, tapes) == u);
  CHECK(encode_contexts(p, d, {TextSeq{1, 2, 3}, TextSeq{4, -1}}, {}, tapes).isApprox((u + v) / 2.0, 1e-15));
}

TEST_CASE("alias pair selection") {
  using V = Vector<double>;
  auto vec = [](double a, double b) {
    V v(2);
    v << a, b;
    return v;
  };
  CHECK(select_alias_pair<double>({vec(1, 2)}, {vec(1, 2)}) == std::pair<std::size_t, std::size_t>{0, 0});
  CHECK(select_alias_pair<double>({vec(0, 0), vec(1, 0)}, {vec(0.9, 0)}) == std::pair<std::size_t, std::size_t>{1, 0});
  CHECK(select_alias_pair<double>({vec(3, 3), vec(3, 3)}, {vec(3, 3), vec(3, 3)}) ==
        std::pair<std::size_t, std::size_t>{0, 0});
  CHECK_THROWS_AS(select_alias_pair<double>({}, {vec(0, 0)}), ValidationError);
}

TEST_CASE("entity embedding fallbacks and alias choice") {
  const Dims d = tiny_dims();
  const auto p = random_params<double>(d, 10, 12, 4);
  Rng rng(9);
  EntityInput bare;
  bare.name = {token(rng, 1, 4, 12), token(rng, 2, 6, 12)};
  bare.aliases = {bare.name};
  const EntityEncoding<double> enc = encode_entity(p, d, bare);
  const Vector<double> v = entity_vector(enc, 0);
  REQUIRE(v.size() == d.entity_dim());
  CHECK(v.segment(0, d.name_output()) == enc.name);
  CHECK(v.segment(d.name_output(), d.name_output()) == enc.name);
  CHECK(v.tail(2 * d.text_output()).isZero(0.0));

  // The target's second alias is the source name, so its encoding is
  // identical and the pair (0, 1) has distance zero.
  EntityInput target;
  target.name = {token(rng, 5, 5, 12)};
  target.aliases = {{token(rng, 6, 3, 12)}, bare.name, {token(rng, 7, 8, 12)}};
  const EntityEncoding<double> te = encode_entity(p, d, target);
  double best = 1e300;
  std::pair<std::size_t, std::size_t> arg{99, 99};
  for (std::size_t j = 0; j < te.aliases.size(); ++j) {
    const double dist = (enc.aliases[0] - te.aliases[j]).norm();
    if (dist < best) {
      best = dist;
      arg = {0, j};
    }
  }
  CHECK(arg == std::pair<std::size_t, std::size_t>{0, 1});
  CHECK(best == 0.0);
  const auto [vs, vt] = embed_entity_pair(enc, te);
  CHECK(vt.segment(d.name_output(), d.name_output()) == te.aliases[1]);
  CHECK(vs.size() == d.entity_dim());
}

TEST_CASE("make_entity_input") {
  const Vocab vocab({"carpal", "tunnel", "syndrome"});
  const CharVocab chars({U'a', U'c', U'l', U'n', U'p', U'r', U't', U'u'});
  RawEntity raw;
  raw.id = "E";
  raw.name = "Carpal Tunnel";
  raw.definition = "A syndrome.";
  raw.contexts = {"", "carpal pain", "!!"};
  const EntityInput in = make_entity_input(validate_entity(raw), vocab, chars);
  REQUIRE(in.name.size() == 2);
  CHECK(in.name[0].word == 0);
  CHECK(in.name[0].chars.front() == chars.find(U'c'));
  CHECK(in.aliases.size() == 1);
  CHECK(in.aliases[0] == in.name);
  CHECK(in.definition == TextSeq{-1, 2});
  CHECK(in.contexts == std::vector<TextSeq>{TextSeq{0, -1}});
  CHECK(chars.find(U'z') == CharVocab::kUnknown);
}

TEST_CASE("siamese head: shared subnetwork and a toy forward pass") {
  Dims d = tiny_dims();
  SUBCASE("the subnetwork output does not depend on the role") {
    const auto p = random_params<double>(d, 10, 12, 5);
    Rng rng(1);
    Vector<double> a(d.entity_dim()), b(d.entity_dim()), f(32);
    for (Index i = 0; i < a.size(); ++i) {
      a(i) = rng.uniform(-1, 1);
      b(i) = rng.uniform(-1, 1);
    }
    f.setConstant(0.5);
    PairTape<double> ab, ba;
    score(p, d, a, b, f, {}, ab);
    score(p, d, b, a, f, {}, ba);
    CHECK(ab.head_source.a2 == ba.head_target.a2);
    CHECK(ab.head_target.a2 == ba.head_source.a2);
  }
  SUBCASE("hand-computed toy") {
    d.name_hidden = 1;
    d.text_hidden = 1;
    d.ff1 = 2;
    d.ff2 = 1;
    d.combine = 1;
    d.n_features = 1;
    auto p = zero_params<double>(d, 1, 3);
    p.ff1.w(0, 0) = 1.0;
    p.ff1.w(1, 1) = -1.0;
    p.ff1.b << 0.0, 0.5;
    p.ff2.w << 1.0, 2.0;
    p.ff2.b << -0.1;
    p.combine.w << 0.5, -0.5, 1.0;
    p.out.w << 2.0;
    p.out.b << -1.0;
    Vector<double> vs = Vector<double>::Zero(8), vt = Vector<double>::Zero(8), f(1);
    vs(0) = 0.3;
    vs(1) = 0.2;
    vt(0) = -0.4;
    vt(1) = 1.0;
    f << 0.25;
    // h_s = 0.3 + 2 * 0.3 - 0.1 = 0.8, h_t = relu(-0.1) = 0,
    // logit = 2 * (0.5 * 0.8 + 0.25) - 1 = 0.3.
    CHECK(score(p, d, vs, vt, f) == doctest::Approx(1.0 / (1.0 + std::exp(-0.3))).epsilon(1e-15));
  }
}

TEST_CASE("binary cross entropy") {
  CHECK(bce_loss(0.5, 1) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(bce_loss(0.5, 0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(bce_loss(0.0, 1) == doctest::Approx(-std::log(1e-7)).epsilon(1e-12));
  CHECK(std::isfinite(bce_loss(1.0, 0)));
  CHECK(bce_loss(0.9, 1) == doctest::Approx(-std::log(0.9)).epsilon(1e-15));
  CHECK(bce_logit_gradient(0.75, 1) == doctest::Approx(-0.25));
  CHECK(bce_logit_gradient(1.0, 1) == 0.0);  // clamped region is flat
}

TEST_CASE("gradient check and its negative control") {
  const Dims d = tiny_dims();
  for (std::uint64_t inst = 0; inst < 4; ++inst) {
    const auto p = random_params<long double>(d, 10, 12, 100 + inst);
    Rng rng(200 + inst);
    const auto [s, t] = random_pair(rng, 10, 12);
    Vector<long double> f(32);
    for (int i = 0; i < 32; ++i) f(i) = rng.uniform01();
    const GradCheckResult r = grad_check(p, d, s, t, f, static_cast<int>(inst % 2));
    CAPTURE(r.worst_array);
    CHECK(r.max_relative_error < 1e-6);
    CHECK(r.per_array.size() == expected_shapes(d, 10, 12).size());
    GradCheckOptions corrupt;
    corrupt.corrupt = [](std::string_view array, Index, double& g) {
      if (array == "ff2.w") g = g * 1.5 + 1e-3;
    };
    const GradCheckResult bad = grad_check(p, d, s, t, f, static_cast<int>(inst % 2), corrupt);
    CHECK(bad.max_relative_error > 1e-2);
    CHECK(bad.worst_array == "ff2.w");
  }
}

TEST_CASE("training") {
  const Dims d = tiny_dims();
  Rng rng(3);
  std::vector<EntityInput> entities;
  for (int i = 0; i < 2; ++i) {
    auto [s, t] = random_pair(rng, 10, 12);
    entities.push_back(s);
    entities.push_back(t);
  }
  std::vector<PairExample> train = {{0, 1, 1, Vector<float>::Zero(32)}, {2, 3, 0, Vector<float>::Zero(32)}};
  TrainConfig config;
  config.learning_rate = 1e-2;
  config.max_epochs = 150;
  config.patience = 1000;
  config.dropout = 0.0;
  config.threads = 1;

  SUBCASE("two examples are fit") {
    TrainReport report;
    const auto p = train_network(random_params<float>(d, 10, 12, 1), d, entities, train, {}, config, &report);
    CHECK(report.epochs.back().train_loss < 0.1);
    const auto probs = predict_pairs(p, d, entities, train);
    CHECK(probs[0] > 0.5f);
    CHECK(probs[1] < 0.5f);
  }
  SUBCASE("bit-identical across runs and thread counts") {
    config.max_epochs = 5;
    config.dropout = 0.2;
    const auto a = train_network(random_params<float>(d, 10, 12, 1), d, entities, train, train, config);
    config.threads = 4;
    const auto b = train_network(random_params<float>(d, 10, 12, 1), d, entities, train, train, config);
    CHECK(bitwise_equal(a, b));
  }
  SUBCASE("non-finite loss is reported") {
    auto p = random_params<float>(d, 10, 12, 1);
    p.out.b(0) = std::numeric_limits<float>::quiet_NaN();
    CHECK_THROWS_AS(train_network(p, d, entities, train, {}, config), NumericError);
  }
}

TEST_CASE("pair_f1") {
  const std::vector<PairExample> pairs = {{0, 0, 1, {}}, {0, 0, 1, {}}, {0, 0, 0, {}}, {0, 0, 0, {}}};
  const std::vector<float> probs = {0.9f, 0.2f, 0.6f, 0.1f};
  CHECK(pair_f1(probs, pairs) == doctest::Approx(0.5));
}

TEST_CASE("model archive") {
  const Dims d = tiny_dims();
  NnModel m;
  m.dims = d;
  m.vocab = Vocab({"a", "b", "c"});
  m.chars = CharVocab({U'a', U'b', U'é'});
  m.params = random_params<float>(d, 3, m.chars.size(), 8);
  m.use_features = false;
  m.seed = 42;
  std::ostringstream out;
  write_nn_model(m, out);
  const std::string bytes = out.str();

  std::istringstream in(bytes);
  const NnModel back = read_nn_model(in);
  CHECK(back.dims == d);
  CHECK(back.vocab.words() == m.vocab.words());
  CHECK(back.chars.chars() == m.chars.chars());
  CHECK(back.use_features == false);
  CHECK(back.seed == 42);
  CHECK(bitwise_equal(back.params, m.params));

  auto reject = [](const std::string& b) {
    std::istringstream s(b);
    CHECK_THROWS_AS(read_nn_model(s), ValidationError);
  };
  reject(bytes.substr(0, bytes.size() - 1));
  reject(bytes + "x");
  reject("NOTMODEL" + bytes.substr(8));

  // Rewrite the manifest with a wrong shape for the first array.
  std::uint64_t length = 0;
  std::memcpy(&length, bytes.data() + 8, 8);
  auto manifest = nlohmann::json::parse(bytes.substr(16, length));
  manifest["arrays"][0]["shape"][0] = manifest["arrays"][0]["shape"][0].get<int>() + 1;
  const std::string text = manifest.dump();
  std::string patched = bytes.substr(0, 8);
  const std::uint64_t new_length = text.size();
  patched.append(reinterpret_cast<const char*>(&new_length), 8);
  patched += text;
  patched += bytes.substr(16 + length);
  reject(patched);
}

TEST_CASE("embedding files") {
  std::istringstream with_header("2 3\nfoo 1 2 3\nbar -1 0.5 1e-3\n");
  const Embeddings e = parse_embeddings(with_header, 3);
  REQUIRE(e.size() == 2);
  CHECK(e.dim() == 3);
  CHECK(e.vectors(2, 1) == doctest::Approx(1e-3));

  std::istringstream repeated("foo 1 2\nfoo 3 4\nbar 5 6\n");
  const Embeddings r = parse_embeddings(repeated, 2);
  CHECK(r.words == std::vector<std::string>{"foo", "bar"});
  CHECK(r.vectors(0, 0) == 1.0f);

  std::istringstream wrong_dim("foo 1 2\n");
  CHECK_THROWS_AS(parse_embeddings(wrong_dim, 3), ParseError);
  std::istringstream ragged("foo 1 2\nbar 1\n");
  CHECK_THROWS_AS(parse_embeddings(ragged, 0), ParseError);
  std::istringstream nan("foo nan 2\n");
  CHECK_THROWS_AS(parse_embeddings(nan, 2), ParseError);

  std::ostringstream out;
  write_embeddings(e, out);
  std::istringstream back(out.str());
  const Embeddings e2 = parse_embeddings(back, 3);
  CHECK(e2.words == e.words);
  CHECK(e2.vectors == e.vectors);
}

TEST_CASE("skip-gram places co-occurring words together") {
  std::vector<std::vector<std::string>> sentences;
  for (int i = 0; i < 200; ++i) {
    sentences.push_back({"red", "apple", "fruit"});
    sentences.push_back({"blue", "car", "engine"});
  }
  SkipGramConfig config;
  config.dim = 10;
  config.epochs = 5;
  const Embeddings a = train_skipgram(sentences, config);
  const Embeddings b = train_skipgram(sentences, config);
  CHECK(a.vectors == b.vectors);
  auto vec = [&](const std::string& w) {
    const auto it = std::find(a.words.begin(), a.words.end(), w);
    return Vector<float>(a.vectors.col(it - a.words.begin()));
  };
  auto cos = [](const Vector<float>& x, const Vector<float>& y) { return x.dot(y) / (x.norm() * y.norm()); };
  CHECK(cos(vec("apple"), vec("fruit")) > cos(vec("apple"), vec("engine")));
}
