#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "nn_oracle.hpp"
#include "sfcsim/errors.hpp"
#include "sfcsim/nn/adam.hpp"
#include "sfcsim/nn/checkpoint.hpp"
#include "sfcsim/nn/layers.hpp"
#include "sfcsim/nn/losses.hpp"
#include "sfcsim/rng.hpp"

using namespace sfcsim;
using namespace sfcsim::nn;

TEST_CASE("dense forward basics") {
  SUBCASE("identity weights, zero bias, linear") {
    DenseLayer l(3, 3, Activation::Linear);
    for (int i = 0; i < 3; ++i) l.w.at(i, i) = 1.0f;
    const std::vector<float> x = {0.5f, -1.25f, 2.0f};
    CHECK(l.forward(x) == x);
  }
  SUBCASE("relu of all-negative preactivations is zero") {
    DenseLayer l(2, 3, Activation::Relu);
    l.w.fill(-1.0f);
    l.b.fill(-0.5f);
    const auto y = l.forward(std::vector<float>{1.0f, 2.0f});
    for (float v : y) CHECK(v == 0.0f);
  }
  SUBCASE("1x1 layer w=2 b=1 x=3") {
    DenseLayer l(1, 1, Activation::Linear);
    l.w.at(0, 0) = 2.0f;
    l.b.at(0, 0) = 1.0f;
    CHECK(l.forward(std::vector<float>{3.0f})[0] == doctest::Approx(7.0f));
  }
  SUBCASE("shape mismatch throws") {
    DenseLayer l(3, 2, Activation::Linear);
    CHECK_THROWS_AS(l.forward(std::vector<float>{1.0f}), SimError);
  }
}

TEST_CASE("attention forward") {
  SUBCASE("identical tokens reproduce the value projection") {
    Rng rng(7);
    AttentionBlock blk(4);
    blk.init(rng);
    const std::vector<float> tok = {0.3f, -0.2f, 0.9f, 0.1f};
    const auto out = blk.forward({tok, tok, tok});
    const auto vproj = blk.wv.forward(tok);
    for (const auto& o : out) {
      REQUIRE(o.size() == vproj.size());
      for (size_t i = 0; i < o.size(); ++i) CHECK(o[i] == doctest::Approx(vproj[i]).epsilon(1e-5));
    }
  }
  SUBCASE("zero query projection gives uniform mixing") {
    Rng rng(8);
    AttentionBlock blk(3);
    blk.init(rng);
    blk.wq.w.zero();
    blk.wq.b.zero();
    const std::vector<std::vector<float>> tokens = {
        {1.0f, 0.0f, 0.0f}, {0.0f, 1.0f, 0.0f}, {0.0f, 0.0f, 1.0f}};
    const auto out = blk.forward(tokens);
    std::vector<float> mean(3, 0.0f);
    for (const auto& t : tokens) {
      const auto v = blk.wv.forward(t);
      for (size_t i = 0; i < 3; ++i) mean[i] += v[i] / 3.0f;
    }
    for (const auto& o : out) {
      for (size_t i = 0; i < 3; ++i) CHECK(o[i] == doctest::Approx(mean[i]).epsilon(1e-5));
    }
  }
  SUBCASE("two-token width-2 case matches the independently computed mixture") {
    AttentionBlock blk(2);
    blk.wq.w.data = {1.0f, 2.0f, 0.0f, 1.0f};
    blk.wq.b.data = {0.1f, -0.1f};
    blk.wk.w.data = {0.5f, 0.0f, 1.0f, 1.0f};
    blk.wk.b.data = {0.0f, 0.2f};
    blk.wv.w.data = {1.0f, -1.0f, 2.0f, 0.0f};
    blk.wv.b.data = {0.3f, 0.0f};
    const auto out = blk.forward({{0.2f, -0.4f}, {0.5f, 0.1f}});
    CHECK(out[0][0] == doctest::Approx(0.8166376679419606).epsilon(1e-5));
    CHECK(out[0][1] == doctest::Approx(0.6500869961741184).epsilon(1e-5));
    CHECK(out[1][0] == doctest::Approx(0.7957599030658067).epsilon(1e-5));
    CHECK(out[1][1] == doctest::Approx(0.7127202908025803).epsilon(1e-5));
  }
}

TEST_CASE("kl_gaussian closed form") {
  const std::vector<float> zero = {0.0f, 0.0f};
  CHECK(kl_gaussian(zero, zero) == 0.0);

  const std::vector<float> mu = {1.0f};
  const std::vector<float> lv = {0.0f};
  CHECK(kl_gaussian(mu, lv) == doctest::Approx(0.5));

  // random vectors against the double-precision evaluation
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<float> m(8), l(8);
    for (auto& x : m) x = static_cast<float>(rng.uniform_real(-2, 2));
    for (auto& x : l) x = static_cast<float>(rng.uniform_real(-2, 1.5));
    const double got = kl_gaussian(m, l);
    const double want = nn_oracle::kl_d(nn_oracle::to_d(m), nn_oracle::to_d(l));
    CHECK(got == doctest::Approx(want).epsilon(1e-6));
    CHECK(got >= 0.0);
  }
}

TEST_CASE("kl_gaussian is zero only at the prior") {
  Rng rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<float> m(4), l(4);
    bool at_prior = true;
    for (size_t i = 0; i < 4; ++i) {
      m[i] = static_cast<float>(rng.uniform_real(-1, 1));
      l[i] = static_cast<float>(rng.uniform_real(-1, 1));
      if (m[i] != 0.0f || l[i] != 0.0f) at_prior = false;
    }
    if (!at_prior) CHECK(kl_gaussian(m, l) > 0.0);
  }
}

TEST_CASE("reparameterize algebra") {
  const std::vector<float> mu = {0.5f, -1.0f, 2.0f};
  const std::vector<float> lv0 = {0.0f, 0.0f, 0.0f};
  const std::vector<float> zero = {0.0f, 0.0f, 0.0f};
  const std::vector<float> noise = {0.7f, -0.3f, 1.1f};

  SUBCASE("zero noise returns mu") { CHECK(reparameterize(mu, lv0, zero) == mu); }
  SUBCASE("unit variance adds the noise") {
    const auto z = reparameterize(mu, lv0, noise);
    for (size_t i = 0; i < 3; ++i) CHECK(z[i] == doctest::Approx(mu[i] + noise[i]));
  }
  SUBCASE("raising logvar by 2 ln 2 doubles the deviation") {
    const float shift = static_cast<float>(2.0 * std::log(2.0));
    const std::vector<float> lv2 = {shift, shift, shift};
    const auto z1 = reparameterize(mu, lv0, noise);
    const auto z2 = reparameterize(mu, lv2, noise);
    for (size_t i = 0; i < 3; ++i) {
      CHECK(z2[i] - mu[i] == doctest::Approx(2.0 * (z1[i] - mu[i])).epsilon(1e-5));
    }
  }
}

namespace {

// analytic gradient of mse(mlp(x), y) w.r.t. every parameter
std::vector<Matrix> analytic_mlp_grads(Mlp& mlp, const std::vector<float>& x,
                                       const std::vector<float>& y) {
  std::vector<Matrix*> params;
  mlp.collect_params(params);
  auto grads = make_like(params);
  MlpCache cache;
  const auto out = mlp.forward_cached(x, cache);
  mlp.backward(mse_grad(out, y), cache, grads);
  return grads;
}

}  // namespace

TEST_CASE("gradient check: dense stacks of every activation") {
  for (const auto act : {Activation::Relu, Activation::Linear, Activation::Sigmoid}) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      Rng rng(seed * 1000 + static_cast<std::uint64_t>(act));
      Mlp mlp = Mlp::make(4, {5, 3}, act, act, rng);
      std::vector<float> x(4), y(3);
      for (auto& v : x) v = static_cast<float>(rng.uniform_real(-1, 1));
      for (auto& v : y) v = static_cast<float>(rng.uniform_real(-1, 1));

      const auto analytic = analytic_mlp_grads(mlp, x, y);
      std::vector<Matrix*> params;
      mlp.collect_params(params);
      const auto fd = nn_oracle::finite_difference(params, [&] {
        return nn_oracle::mse_d(nn_oracle::mlp_d(mlp, nn_oracle::to_d(x)), nn_oracle::to_d(y));
      });
      const double err = nn_oracle::max_rel_err(analytic, fd);
      CAPTURE(static_cast<int>(act));
      CAPTURE(seed);
      CHECK(err < 1e-3);
    }
  }
}

TEST_CASE("gradient check: attention block") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Rng rng(seed * 77);
    AttentionBlock blk(4);
    blk.init(rng);
    std::vector<std::vector<float>> tokens(3, std::vector<float>(4));
    std::vector<std::vector<float>> targets(3, std::vector<float>(4));
    for (auto& t : tokens) {
      for (auto& v : t) v = static_cast<float>(rng.uniform_real(-1, 1));
    }
    for (auto& t : targets) {
      for (auto& v : t) v = static_cast<float>(rng.uniform_real(-1, 1));
    }

    std::vector<Matrix*> params;
    blk.collect_params(params);
    auto analytic = make_like(params);
    AttentionCache cache;
    const auto out = blk.forward_cached(tokens, cache);
    std::vector<std::vector<float>> dout(3);
    for (size_t i = 0; i < 3; ++i) {
      // mse over the concatenation of the three output tokens
      dout[i].resize(4);
      for (size_t e = 0; e < 4; ++e) {
        dout[i][e] = 2.0f * (out[i][e] - targets[i][e]) / 12.0f;
      }
    }
    blk.backward(dout, cache, analytic);

    const auto fd = nn_oracle::finite_difference(params, [&] {
      std::vector<nn_oracle::dvec> dtokens;
      for (const auto& t : tokens) dtokens.push_back(nn_oracle::to_d(t));
      const auto o = nn_oracle::attention_d(blk, dtokens);
      double sum = 0.0;
      for (size_t i = 0; i < 3; ++i) {
        for (size_t e = 0; e < 4; ++e) {
          const double d = o[i][e] - targets[i][e];
          sum += d * d;
        }
      }
      return sum / 12.0;
    });
    const double err = nn_oracle::max_rel_err(analytic, fd);
    CAPTURE(seed);
    CHECK(err < 1e-3);
  }
}

TEST_CASE("zero upstream gradient produces zero parameter gradients") {
  Rng rng(5);
  Mlp mlp = Mlp::make(3, {4, 2}, Activation::Relu, Activation::Linear, rng);
  std::vector<Matrix*> params;
  mlp.collect_params(params);
  auto grads = make_like(params);
  MlpCache cache;
  mlp.forward_cached(std::vector<float>{0.1f, -0.2f, 0.3f}, cache);
  mlp.backward(std::vector<float>{0.0f, 0.0f}, cache, grads);
  for (const auto& g : grads) {
    for (float v : g.data) CHECK(v == 0.0f);
  }
}

TEST_CASE("linear single-output layer has the closed-form mse gradient") {
  Rng rng(6);
  DenseLayer l(3, 1, Activation::Linear);
  l.init(rng);
  const std::vector<float> x = {0.4f, -0.9f, 1.3f};
  const std::vector<float> y = {0.25f};

  DenseCache cache;
  const auto out = l.forward_cached(x, cache);
  Matrix dw(1, 3), db(1, 1);
  l.backward(mse_grad(out, y), cache, dw, db);

  const float residual = out[0] - y[0];
  for (int i = 0; i < 3; ++i) {
    CHECK(dw.at(0, i) == doctest::Approx(2.0f * residual * x[static_cast<size_t>(i)]).epsilon(1e-5));
  }
  CHECK(db.at(0, 0) == doctest::Approx(2.0f * residual).epsilon(1e-5));
}

TEST_CASE("adam behaviour") {
  SUBCASE("zero gradient leaves parameters unchanged") {
    Matrix p(2, 2);
    p.data = {1.0f, -2.0f, 3.0f, -4.0f};
    const Matrix before = p;
    Adam adam({}, {&p});
    std::vector<Matrix> grads = {Matrix(2, 2)};
    adam.step({&p}, grads);
    CHECK(p == before);
  }
  SUBCASE("first step moves by about the learning rate") {
    Matrix p(1, 3);
    p.data = {0.0f, 1.0f, -1.0f};
    Adam adam({.lr = 0.01}, {&p});
    std::vector<Matrix> grads = {Matrix(1, 3)};
    grads[0].data = {0.5f, -2.0f, 7.0f};  // any nonzero magnitudes
    const Matrix before = p;
    adam.step({&p}, grads);
    for (size_t i = 0; i < 3; ++i) {
      const double moved = std::abs(p.data[i] - before.data[i]);
      CHECK(moved == doctest::Approx(0.01).epsilon(1e-3));
    }
  }
  SUBCASE("loss on a fixed quadratic decreases monotonically") {
    Matrix p(1, 4);
    p.data = {2.0f, -1.5f, 0.7f, 3.0f};
    const std::vector<float> target = {0.0f, 1.0f, -1.0f, 0.5f};
    Adam adam({.lr = 0.05}, {&p});
    auto loss = [&] {
      double s = 0.0;
      for (size_t i = 0; i < 4; ++i) {
        const double d = p.data[i] - target[i];
        s += d * d;
      }
      return s;
    };
    double prev = loss();
    for (int step = 0; step < 60; ++step) {
      std::vector<Matrix> grads = {Matrix(1, 4)};
      for (size_t i = 0; i < 4; ++i) grads[0].data[i] = 2.0f * (p.data[i] - target[i]);
      adam.step({&p}, grads);
      const double cur = loss();
      CHECK(cur < prev);
      prev = cur;
    }
  }
}

TEST_CASE("forward passes are pure") {
  Rng rng(13);
  Mlp mlp = Mlp::make(6, {8, 4}, Activation::Relu, Activation::Linear, rng);
  std::vector<float> x(6);
  for (auto& v : x) v = static_cast<float>(rng.uniform_real(-1, 1));
  const auto a = mlp.forward(x);
  const auto b = mlp.forward(x);
  CHECK(a == b);
}

TEST_CASE("checkpoint roundtrip is bit-exact") {
  Rng rng(14);
  Mlp mlp = Mlp::make(5, {7, 3}, Activation::Relu, Activation::Linear, rng);
  std::vector<Matrix*> params;
  mlp.collect_params(params);

  const std::string path = (std::filesystem::temp_directory_path() / "sfcsim_nn_test.ckpt").string();
  save_checkpoint(path, params);

  Rng rng2(15);
  Mlp other = Mlp::make(5, {7, 3}, Activation::Relu, Activation::Linear, rng2);
  std::vector<Matrix*> oparams;
  other.collect_params(oparams);
  load_checkpoint_into(path, oparams);
  for (size_t i = 0; i < params.size(); ++i) CHECK(params[i]->data == oparams[i]->data);

  SUBCASE("bad magic is rejected") {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    os << "not a checkpoint";
    os.close();
    CHECK_THROWS_AS(load_checkpoint(path), CheckpointError);
  }
  SUBCASE("shape mismatch is rejected") {
    Rng rng3(16);
    Mlp small = Mlp::make(2, {3}, Activation::Relu, Activation::Linear, rng3);
    std::vector<Matrix*> sparams;
    small.collect_params(sparams);
    CHECK_THROWS_AS(load_checkpoint_into(path, sparams), CheckpointError);
  }
  std::filesystem::remove(path);
}
