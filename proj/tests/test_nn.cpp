#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <vector>

#include "peec/checkpoint.hpp"
#include "peec/nn.hpp"
#include "peec/rng.hpp"

using namespace peec;

TEST_CASE("fan-in init stays inside its bound and is seed-deterministic") {
  ParamStore s1, s2;
  Rng r1(99), r2(99);
  Dense a = Dense::create(s1, "a", 16, 8, r1);
  Dense b = Dense::create(s2, "a", 16, 8, r2);
  for (double v : s1[a.W].value) CHECK(std::abs(v) <= 0.25);
  CHECK(s1[a.W].value == s2[b.W].value);
  CHECK(s1[a.b].value == std::vector<double>(8, 0.0));
}

TEST_CASE("lstm init sets only the forget-gate bias") {
  ParamStore store;
  Rng rng(3);
  Lstm cell = Lstm::create(store, "l", 4, 5, rng);
  const auto& b = store[cell.b].value;
  for (int j = 0; j < 5; ++j) CHECK(b[j] == 0.0);
  for (int j = 5; j < 10; ++j) CHECK(b[j] == 1.0);
  for (int j = 10; j < 20; ++j) CHECK(b[j] == 0.0);
}

TEST_CASE("dense tape forward matches tape-free infer") {
  ParamStore store;
  Rng rng(21);
  Dense d = Dense::create(store, "d", 4, 3, rng);
  store[d.b].value = {0.1, -0.2, 0.3};

  std::vector<double> x = {0.5, -1.0, 0.25, 2.0};
  Tape tape;
  ParamLeaves leaves(tape, store);
  Tensor y = d.forward(tape, leaves, tape.input(1, 4, x));

  std::vector<double> yi(3);
  d.infer(store, x.data(), yi.data());
  for (int j = 0; j < 3; ++j) CHECK(yi[j] == doctest::Approx(tape.val(y)[j]).epsilon(1e-15));
}

TEST_CASE("param store lookup and sizes") {
  ParamStore store;
  Rng rng(8);
  Dense d = Dense::create(store, "head", 3, 2, rng);
  CHECK(store.find("head.W") == d.W);
  CHECK(store.find("head.b") == d.b);
  CHECK(store.find("missing") == -1);
  CHECK(store.total_params() == 3 * 2 + 2);

  auto grads = store.zero_grads();
  REQUIRE(grads.size() == 2);
  CHECK(grads[0].size() == 6);
  CHECK(grads[1].size() == 2);
}

TEST_CASE("flatten and unflatten round-trip") {
  ParamStore store;
  Rng rng(17);
  Dense d = Dense::create(store, "d", 3, 4, rng);
  Lstm l = Lstm::create(store, "l", 4, 2, rng);
  (void)d;
  (void)l;

  std::vector<double> theta = flatten(store);
  CHECK(theta.size() == store.total_params());

  for (auto& v : theta) v += 0.5;
  unflatten(store, theta);
  CHECK(flatten(store) == theta);

  theta.pop_back();
  CHECK_THROWS_AS(unflatten(store, theta), std::invalid_argument);
}

TEST_CASE("adam defaults") {
  Adam opt;
  CHECK(opt.lr == 3e-4);
  CHECK(opt.beta1 == 0.9);
  CHECK(opt.beta2 == 0.999);
  CHECK(opt.eps == 1e-8);
}

TEST_CASE("adam first step moves by lr against the gradient sign") {
  ParamStore store;
  int blk = store.add("x", 1, 3);
  store[blk].value = {1.0, -2.0, 0.0};
  Adam opt;
  opt.lr = 0.01;
  opt.init(store);

  std::vector<std::vector<double>> grads = {{0.3, -4.0, 0.0}};
  opt.step(store, grads);

  // mhat/(sqrt(vhat)+eps) ~ sign(g) on the first step regardless of |g|
  CHECK(store[blk].value[0] == doctest::Approx(1.0 - 0.01).epsilon(1e-6));
  CHECK(store[blk].value[1] == doctest::Approx(-2.0 + 0.01).epsilon(1e-6));
  CHECK(store[blk].value[2] == 0.0);
}

TEST_CASE("adam with zero gradients leaves parameters untouched") {
  ParamStore store;
  int blk = store.add("x", 2, 2);
  store[blk].value = {1.0, 2.0, 3.0, 4.0};
  Adam opt;
  opt.init(store);
  auto grads = store.zero_grads();
  for (int i = 0; i < 10; ++i) opt.step(store, grads);
  CHECK(store[blk].value == std::vector<double>{1.0, 2.0, 3.0, 4.0});
}

TEST_CASE("adam rejects mismatched gradient layout") {
  ParamStore store;
  store.add("x", 1, 2);
  Adam opt;
  opt.init(store);
  std::vector<std::vector<double>> bad;
  CHECK_THROWS_AS(opt.step(store, bad), std::invalid_argument);
}

TEST_CASE("adam drives a quadratic bowl to the origin") {
  // f(x) = x^2 from x0 = 1 with lr = 3e-4. Per-step movement is capped near
  // lr, and the second-moment memory of earlier large gradients slows the
  // tail, so the reference run needs 5794 steps to reach |x| < 0.01.
  ParamStore store;
  int blk = store.add("x", 1, 1);
  store[blk].value = {1.0};
  Adam opt;
  opt.init(store);

  std::vector<std::vector<double>> grads(1, std::vector<double>(1));
  int steps = 0;
  while (std::abs(store[blk].value[0]) >= 0.01 && steps < 6000) {
    grads[0][0] = 2.0 * store[blk].value[0];
    opt.step(store, grads);
    ++steps;
  }
  CHECK(std::abs(store[blk].value[0]) < 0.01);
  CHECK(steps == 5794);
}

TEST_CASE("checkpoint round-trips parameters, optimizer state and extras") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "peec_ckpt_test";
  fs::create_directories(dir);
  std::string base = (dir / "ckpt_0007").string();

  ParamStore store;
  Rng rng(31);
  Dense d = Dense::create(store, "actor.head", 3, 2, rng);
  Lstm l = Lstm::create(store, "actor.lstm", 2, 2, rng);
  (void)d;
  (void)l;
  Adam opt;
  opt.init(store);
  auto grads = store.zero_grads();
  for (auto& g : grads)
    for (auto& v : g) v = 0.25;
  opt.step(store, grads);
  opt.step(store, grads);

  std::vector<CheckpointBlock> blocks;
  append_store_blocks(blocks, "actor", store);
  append_adam_blocks(blocks, "actor", store, opt);
  json extra = {{"episode", 7}, {"rng_state", "12345678"}};
  save_checkpoint(base, blocks, extra);
  CHECK(fs::exists(base + ".bin"));
  CHECK(fs::exists(base + ".json"));

  auto [loaded, extra2] = load_checkpoint(base);
  CHECK(extra2.at("episode").get<int>() == 7);
  CHECK(extra2.at("rng_state").get<std::string>() == "12345678");

  ParamStore store2;
  Rng rng2(999);
  Dense::create(store2, "actor.head", 3, 2, rng2);
  Lstm::create(store2, "actor.lstm", 2, 2, rng2);
  Adam opt2;
  opt2.init(store2);
  restore_store_blocks(loaded, "actor", store2);
  restore_adam_blocks(loaded, "actor", store2, opt2);

  // storage is float32, so loaded values are the f32 rounding of the originals
  for (int i = 0; i < store.count(); ++i) {
    REQUIRE(store2[i].value.size() == store[i].value.size());
    for (size_t j = 0; j < store[i].value.size(); ++j) {
      CHECK(store2[i].value[j] == static_cast<double>(static_cast<float>(store[i].value[j])));
    }
  }
  for (size_t i = 0; i < opt.m.size(); ++i) {
    for (size_t j = 0; j < opt.m[i].size(); ++j) {
      CHECK(opt2.m[i][j] == static_cast<double>(static_cast<float>(opt.m[i][j])));
      CHECK(opt2.v[i][j] == static_cast<double>(static_cast<float>(opt.v[i][j])));
    }
  }

  SUBCASE("missing blocks are an error") {
    ParamStore store3;
    Rng rng3(1);
    Dense::create(store3, "other.head", 3, 2, rng3);
    CHECK_THROWS(restore_store_blocks(loaded, "other", store3));
  }
  SUBCASE("shape mismatches are an error") {
    ParamStore store3;
    Rng rng3(1);
    Dense::create(store3, "actor.head", 3, 5, rng3);
    CHECK_THROWS(restore_store_blocks(loaded, "actor", store3));
  }

  fs::remove_all(dir);
}

TEST_CASE("rng state save and restore replays the same stream") {
  Rng rng = Rng::derive(42, "policy_p", 3);
  rng.u01();
  rng.normal();
  uint64_t cursor = rng.state();

  std::vector<double> first;
  for (int i = 0; i < 8; ++i) first.push_back(rng.u01());

  Rng replay;
  replay.set_state(cursor);
  for (int i = 0; i < 8; ++i) CHECK(replay.u01() == first[i]);
}

TEST_CASE("derived rng streams differ by purpose and index") {
  Rng a = Rng::derive(7, "reset", 0);
  Rng b = Rng::derive(7, "elimination", 0);
  Rng c = Rng::derive(7, "reset", 1);
  CHECK(a.next_u64() != b.next_u64());
  Rng a2 = Rng::derive(7, "reset", 0);
  CHECK(a2.next_u64() != c.next_u64());

  Rng a3 = Rng::derive(7, "reset", 0);
  Rng a4 = Rng::derive(7, "reset", 0);
  CHECK(a3.next_u64() == a4.next_u64());
}
