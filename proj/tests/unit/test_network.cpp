#include <cmath>
#include <set>

#include "convbeers/backward.hpp"
#include "convbeers/checkpoint.hpp"
#include "convbeers/loss.hpp"
#include "convbeers/network.hpp"
#include "helpers.hpp"

using namespace convbeers;

namespace {

Tensor random_tensor(Rng& rng, int n, int h, int w) {
  Tensor t(n, 1, h, w);
  for (auto& v : t.values()) v = static_cast<float>(rng.uniform());
  return t;
}

}  // namespace

TEST_CASE("parameter count of the default network") {
  const NetworkShape s;
  CHECK(s.parameter_count() == 1'219'841);
  CHECK(NetworkParams(s).parameter_count() == 1'219'841);
  CHECK(s.layers() == 2 * s.blocks + 3);
}

TEST_CASE("layer naming covers every conv once") {
  const NetworkShape s{4, 3};
  std::set<std::string> names;
  for (int l = 0; l < s.layers(); ++l) names.insert(layer_name(s, l));
  CHECK(names.size() == static_cast<std::size_t>(s.layers()));
  CHECK(layer_name(s, 0) == "head");
  CHECK(layer_name(s, s.layers() - 1) == "tail");
  CHECK(layer_name(s, -1) == "input");
}

TEST_CASE("Kaiming init: seeded, zero biases, fan-in variance") {
  const NetworkParams a = init_params(7), b = init_params(7), c = init_params(8);
  CHECK(a.tensors()[2].values == b.tensors()[2].values);
  CHECK(a.tensors()[2].values != c.tensors()[2].values);
  for (int l = 0; l < a.layers(); ++l)
    for (float v : a.bias(l).values) CHECK(v == 0.f);
  // conv1 of block 0: fan-in 64 * 9.
  const auto& w = a.weight(1).values;
  double s2 = 0;
  for (float v : w) s2 += double(v) * v;
  CHECK(s2 / static_cast<double>(w.size()) == doctest::Approx(2.0 / (64 * 9)).epsilon(0.05));
}

TEST_CASE("damped init scales the residual branch ends") {
  const NetworkParams k = init_params(3), d = init_params(3, {}, InitScheme::kaiming_damped_residual);
  CHECK(d.weight(2).values[5] == doctest::Approx(0.1f * k.weight(2).values[5]));
  CHECK(d.weight(1).values[5] == k.weight(1).values[5]);
}

TEST_CASE("zero network is the identity") {
  Rng rng(3);
  const Tensor x = random_tensor(rng, 2, 12, 10);
  const Tensor y = forward(NetworkParams(NetworkShape{8, 2}), x);
  CHECK(std::equal(x.values().begin(), x.values().end(), y.values().begin()));
}

TEST_CASE("forward is independent of worker count") {
  Rng rng(4);
  const NetworkParams p = init_params(1, NetworkShape{8, 2});
  const Tensor x = random_tensor(rng, 3, 20, 17);
  const Tensor a = forward(p, x, 1), b = forward(p, x, 3);
  CHECK(std::equal(a.values().begin(), a.values().end(), b.values().begin()));
}

TEST_CASE("float and double engines agree") {
  Rng rng(5);
  const NetworkParams p = init_params(2, NetworkShape{8, 2});
  const Tensor x = random_tensor(rng, 1, 16, 16);
  const Tensor f = forward(p, x);
  const auto d = forward(p.cast<double>(), x.cast<double>());
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(f.data()[i] == doctest::Approx(d.data()[i]).epsilon(1e-5));
}

TEST_CASE("non-finite input is rejected") {
  Tensor x(1, 1, 8, 8);
  x.values()[3] = NAN;
  CHECK_THROWS_AS(forward(NetworkParams(NetworkShape{4, 1}), x), Error);
}

TEST_CASE("activation hook sees the input and every conv output") {
  const NetworkShape s{4, 2};
  std::vector<int> seen;
  const ActivationHook<float> hook = [&](int l, float*, std::size_t) { seen.push_back(l); };
  Tensor x(1, 1, 8, 8);
  forward(init_params(1, s), x, 1, &hook);
  REQUIRE(seen.size() == static_cast<std::size_t>(s.layers() + 1));
  CHECK(seen.front() == -1);
  CHECK(seen.back() == s.layers() - 1);
}

TEST_CASE("backward is deterministic across worker counts") {
  Rng rng(6);
  const NetworkParams p = init_params(4, NetworkShape{8, 2}, InitScheme::kaiming_damped_residual);
  const Tensor x = random_tensor(rng, 3, 12, 12), y = random_tensor(rng, 3, 12, 12);
  const auto a = backward(p, x, y, LossWeights{}, nullptr, 1);
  const auto b = backward(p, x, y, LossWeights{}, nullptr, 3);
  CHECK(a.loss.total == b.loss.total);
  for (std::size_t t = 0; t < a.grads.tensors().size(); ++t)
    CHECK(a.grads.tensors()[t].values == b.grads.tensors()[t].values);
}

TEST_CASE("backward loss equals the forward loss") {
  Rng rng(7);
  const NetworkParams p = init_params(4, NetworkShape{4, 1});
  const Tensor x = random_tensor(rng, 2, 10, 10), y = random_tensor(rng, 2, 10, 10);
  const auto r = backward(p, x, y, LossWeights{});
  CHECK(r.loss.total == doctest::Approx(loss_total(forward(p, x), y, LossWeights{}).total).epsilon(1e-6));
}

TEST_CASE("an Adam step on a quadratic-like loss reduces it") {
  Rng rng(8);
  NetworkParams p = init_params(4, NetworkShape{4, 1}, InitScheme::kaiming_damped_residual);
  const Tensor x = random_tensor(rng, 2, 12, 12);
  Tensor y = x;
  for (auto& v : y.values()) v += 0.2f;
  AdamState st;
  const double before = backward(p, x, y, LossWeights{1, 0, 0}).loss.total;
  for (int i = 0; i < 20; ++i) adam_step(p, backward(p, x, y, LossWeights{1, 0, 0}).grads, st, 1e-3);
  CHECK(st.step == 20);
  CHECK(backward(p, x, y, LossWeights{1, 0, 0}).loss.total < before);
}

TEST_CASE("checkpoint round trip is bit-exact and sized as declared") {
  const NetworkShape s{8, 2};
  const NetworkParams p = init_params(9, s);
  const auto bytes = encode_checkpoint(p);
  CHECK(bytes.size() == checkpoint_size(s));
  const NetworkParams q = decode_checkpoint(bytes);
  CHECK(q.shape().channels == 8);
  for (std::size_t t = 0; t < p.tensors().size(); ++t) {
    CHECK(q.tensors()[t].name == p.tensors()[t].name);
    CHECK(q.tensors()[t].values == p.tensors()[t].values);
  }
  testing::TempDir dir("ckpt");
  save_checkpoint(p, dir / "m.cbrs");
  CHECK(load_checkpoint(dir / "m.cbrs").tensors()[3].values == p.tensors()[3].values);
}

TEST_CASE("corrupt checkpoints are format errors") {
  auto bytes = encode_checkpoint(init_params(1, NetworkShape{4, 1}));
  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  CHECK(testing::error_code_of([&] { decode_checkpoint(bad_magic); }) == ErrorCode::format);
  auto bad_version = bytes;
  bad_version[4] = 9;
  CHECK(testing::error_code_of([&] { decode_checkpoint(bad_version); }) == ErrorCode::format);
  bytes.resize(bytes.size() - 3);
  CHECK(testing::error_code_of([&] { decode_checkpoint(bytes); }) == ErrorCode::format);
}
