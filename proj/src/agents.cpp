#include "peec/agents.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace peec {

namespace {

double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

void relu_inplace(std::vector<double>& v) {
  for (double& x : v) x = std::max(0.0, x);
}

// tau * online + (1 - tau) * target, blockwise
void blend_into(RecurrentNet& target, const RecurrentNet& online, double tau) {
  for (int i = 0; i < online.store.count(); ++i) {
    const auto& src = online.store[i].value;
    auto& dst = target.store[i].value;
    for (size_t k = 0; k < dst.size(); ++k) dst[k] = tau * src[k] + (1.0 - tau) * dst[k];
  }
}

}  // namespace

RecurrentNet RecurrentNet::create(int in, int hidden, int out, Rng& rng) {
  RecurrentNet n;
  n.in = in;
  n.hidden = hidden;
  n.out = out;
  n.trunk = RecurrentTrunk::create(n.store, "trunk", in, hidden, rng);
  n.head = Dense::create(n.store, "head", hidden, out, rng);
  return n;
}

void RecurrentNet::copy_values_from(const RecurrentNet& other) {
  for (int i = 0; i < store.count(); ++i) store[i].value = other.store[i].value;
}

// ---------------------------------------------------------------- Td3Agent

Td3Agent::Td3Agent(Td3Settings s, Rng& init) : s_(s) {
  actor_ = RecurrentNet::create(s_.obs_dim, s_.hidden, 1, init);
  critic1_ = RecurrentNet::create(s_.obs_dim + 1, s_.hidden, 1, init);
  critic2_ = RecurrentNet::create(s_.obs_dim + 1, s_.hidden, 1, init);
  t_actor_ = RecurrentNet::create(s_.obs_dim, s_.hidden, 1, init);
  t_critic1_ = RecurrentNet::create(s_.obs_dim + 1, s_.hidden, 1, init);
  t_critic2_ = RecurrentNet::create(s_.obs_dim + 1, s_.hidden, 1, init);
  t_actor_.copy_values_from(actor_);
  t_critic1_.copy_values_from(critic1_);
  t_critic2_.copy_values_from(critic2_);
  opt_actor_.lr = opt_c1_.lr = opt_c2_.lr = s_.lr;
  opt_actor_.init(actor_.store);
  opt_c1_.init(critic1_.store);
  opt_c2_.init(critic2_.store);
}

double Td3Agent::act(const std::vector<double>& features, RecurrentState& state, Rng& rng,
                     bool explore) const {
  if (static_cast<int>(features.size()) != s_.obs_dim) {
    throw std::invalid_argument("Td3Agent::act: feature size mismatch");
  }
  std::vector<double> feat;
  actor_.trunk.infer(actor_.store, features.data(), state.h, state.c, feat);
  double y = 0.0;
  actor_.head.infer(actor_.store, feat.data(), &y);
  double a = std::tanh(y);
  if (explore) a += s_.exploration_noise * rng.normal();
  return std::clamp(a, -1.0, 1.0);
}

Td3Stats Td3Agent::update(const ReplayBuffer& buffer, Rng& rng) {
  Td3Stats st;
  if (buffer.windows() < static_cast<size_t>(s_.batch_size)) return st;
  const int B = s_.batch_size;
  const int L = static_cast<int>(buffer.window_len());
  const int D = s_.obs_dim;
  const int H = s_.hidden;

  std::vector<const ReplayWindow*> w(B);
  for (int b = 0; b < B; ++b) w[b] = &buffer.sample(rng);

  // batch-major copies of each observation row
  std::vector<std::vector<double>> obs_rows(L + 1, std::vector<double>(B * D));
  for (int t = 0; t <= L; ++t) {
    for (int b = 0; b < B; ++b) {
      std::copy(w[b]->obs.begin() + t * D, w[b]->obs.begin() + (t + 1) * D,
                obs_rows[t].begin() + b * D);
    }
  }

  // Target actions along each window, smoothing noise on the successor rows.
  // The target actor resumes from the stored behavior state; the target
  // critics have no stored state, so they replay the window from zero.
  std::vector<std::vector<double>> a_tgt(L + 1, std::vector<double>(B));
  for (int b = 0; b < B; ++b) {
    std::vector<double> h = w[b]->h0, c = w[b]->c0, feat;
    for (int t = 0; t <= L; ++t) {
      t_actor_.trunk.infer(t_actor_.store, w[b]->obs.data() + t * D, h, c, feat);
      double y = 0.0;
      t_actor_.head.infer(t_actor_.store, feat.data(), &y);
      a_tgt[t][b] = std::tanh(y);
    }
  }
  for (int b = 0; b < B; ++b) {
    for (int t = 1; t <= L; ++t) {
      double eps = std::clamp(s_.policy_noise * rng.normal(), -s_.noise_clip, s_.noise_clip);
      a_tgt[t][b] = std::clamp(a_tgt[t][b] + eps, -1.0, 1.0);
    }
  }

  std::vector<std::vector<double>> q_next(L + 1, std::vector<double>(B, 0.0));
  for (int b = 0; b < B; ++b) {
    std::vector<double> h1(H, 0.0), c1(H, 0.0), h2(H, 0.0), c2(H, 0.0), feat;
    std::vector<double> x(D + 1);
    for (int t = 1; t <= L; ++t) {
      std::copy(w[b]->obs.begin() + t * D, w[b]->obs.begin() + (t + 1) * D, x.begin());
      x[D] = a_tgt[t][b];
      double q1 = 0.0, q2 = 0.0;
      t_critic1_.trunk.infer(t_critic1_.store, x.data(), h1, c1, feat);
      t_critic1_.head.infer(t_critic1_.store, feat.data(), &q1);
      t_critic2_.trunk.infer(t_critic2_.store, x.data(), h2, c2, feat);
      t_critic2_.head.infer(t_critic2_.store, feat.data(), &q2);
      q_next[t][b] = std::min(q1, q2);
    }
  }

  std::vector<std::vector<double>> y(L, std::vector<double>(B));
  for (int t = 0; t < L; ++t) {
    for (int b = 0; b < B; ++b) {
      double cont = w[b]->done[t] ? 0.0 : 1.0;
      y[t][b] = w[b]->reward[t] + s_.gamma * cont * q_next[t + 1][b];
    }
  }

  {
    Tape tape;
    ParamLeaves p1(tape, critic1_.store), p2(tape, critic2_.store);
    Tensor h1 = tape.zeros(B, H), c1 = tape.zeros(B, H);
    Tensor h2 = tape.zeros(B, H), c2 = tape.zeros(B, H);
    Tensor loss1 = tape.fill(1, 1, 0.0), loss2 = tape.fill(1, 1, 0.0);
    std::vector<double> xa(B * (D + 1));
    for (int t = 0; t < L; ++t) {
      for (int b = 0; b < B; ++b) {
        std::copy(obs_rows[t].begin() + b * D, obs_rows[t].begin() + (b + 1) * D,
                  xa.begin() + b * (D + 1));
        xa[b * (D + 1) + D] = w[b]->action[t];
      }
      Tensor x = tape.input(B, D + 1, xa);
      Tensor q1 = critic1_.head.forward(tape, p1, critic1_.trunk.step(tape, p1, x, h1, c1));
      Tensor q2 = critic2_.head.forward(tape, p2, critic2_.trunk.step(tape, p2, x, h2, c2));
      Tensor yt = tape.input(B, 1, y[t]);
      loss1 = tape.add(loss1, tape.mean(tape.square(tape.sub(q1, yt))));
      loss2 = tape.add(loss2, tape.mean(tape.square(tape.sub(q2, yt))));
    }
    Tensor closs = tape.scale(tape.add(loss1, loss2), 1.0 / L);
    tape.backward(closs);
    auto g1 = critic1_.store.zero_grads();
    p1.accumulate_grads(tape, g1);
    opt_c1_.step(critic1_.store, g1);
    auto g2 = critic2_.store.zero_grads();
    p2.accumulate_grads(tape, g2);
    opt_c2_.step(critic2_.store, g2);
    st.critic_loss = tape.scalar(closs);
  }
  st.updated = true;
  ++critic_updates_;

  if (critic_updates_ % s_.policy_delay == 0) {
    Tape tape;
    ParamLeaves pa(tape, actor_.store), pc(tape, critic1_.store);
    std::vector<double> h0(B * H), c0(B * H);
    for (int b = 0; b < B; ++b) {
      std::copy(w[b]->h0.begin(), w[b]->h0.end(), h0.begin() + b * H);
      std::copy(w[b]->c0.begin(), w[b]->c0.end(), c0.begin() + b * H);
    }
    Tensor ha = tape.input(B, H, h0), ca = tape.input(B, H, c0);
    Tensor hc = tape.zeros(B, H), cc = tape.zeros(B, H);
    Tensor qsum = tape.fill(1, 1, 0.0);
    for (int t = 0; t < L; ++t) {
      Tensor x = tape.input(B, D, obs_rows[t]);
      Tensor act = tape.tanh(actor_.head.forward(tape, pa, actor_.trunk.step(tape, pa, x, ha, ca)));
      Tensor xc = tape.concat(x, act);
      Tensor q = critic1_.head.forward(tape, pc, critic1_.trunk.step(tape, pc, xc, hc, cc));
      qsum = tape.add(qsum, tape.mean(q));
    }
    Tensor aloss = tape.scale(qsum, -1.0 / L);
    tape.backward(aloss);
    auto ga = actor_.store.zero_grads();
    pa.accumulate_grads(tape, ga);
    opt_actor_.step(actor_.store, ga);
    st.actor_loss = tape.scalar(aloss);
    st.actor_updated = true;

    blend_into(t_actor_, actor_, s_.tau);
    blend_into(t_critic1_, critic1_, s_.tau);
    blend_into(t_critic2_, critic2_, s_.tau);
  }
  return st;
}

std::vector<double> Td3Agent::critic1_values(const std::vector<std::vector<double>>& obs,
                                             const std::vector<double>& actions) const {
  if (obs.size() != actions.size()) {
    throw std::invalid_argument("critic1_values: length mismatch");
  }
  std::vector<double> h(s_.hidden, 0.0), c(s_.hidden, 0.0), feat;
  std::vector<double> x(s_.obs_dim + 1), out;
  out.reserve(obs.size());
  for (size_t t = 0; t < obs.size(); ++t) {
    if (static_cast<int>(obs[t].size()) != s_.obs_dim) {
      throw std::invalid_argument("critic1_values: obs size mismatch");
    }
    std::copy(obs[t].begin(), obs[t].end(), x.begin());
    x[s_.obs_dim] = actions[t];
    critic1_.trunk.infer(critic1_.store, x.data(), h, c, feat);
    double q = 0.0;
    critic1_.head.infer(critic1_.store, feat.data(), &q);
    out.push_back(q);
  }
  return out;
}

void Td3Agent::checkpoint(std::vector<CheckpointBlock>& out, const std::string& prefix) const {
  append_store_blocks(out, prefix + "actor", actor_.store);
  append_adam_blocks(out, prefix + "actor", actor_.store, opt_actor_);
  append_store_blocks(out, prefix + "critic1", critic1_.store);
  append_adam_blocks(out, prefix + "critic1", critic1_.store, opt_c1_);
  append_store_blocks(out, prefix + "critic2", critic2_.store);
  append_adam_blocks(out, prefix + "critic2", critic2_.store, opt_c2_);
  append_store_blocks(out, prefix + "t_actor", t_actor_.store);
  append_store_blocks(out, prefix + "t_critic1", t_critic1_.store);
  append_store_blocks(out, prefix + "t_critic2", t_critic2_.store);
}

void Td3Agent::restore(const std::vector<CheckpointBlock>& blocks, const std::string& prefix) {
  restore_store_blocks(blocks, prefix + "actor", actor_.store);
  restore_adam_blocks(blocks, prefix + "actor", actor_.store, opt_actor_);
  restore_store_blocks(blocks, prefix + "critic1", critic1_.store);
  restore_adam_blocks(blocks, prefix + "critic1", critic1_.store, opt_c1_);
  restore_store_blocks(blocks, prefix + "critic2", critic2_.store);
  restore_adam_blocks(blocks, prefix + "critic2", critic2_.store, opt_c2_);
  restore_store_blocks(blocks, prefix + "t_actor", t_actor_.store);
  restore_store_blocks(blocks, prefix + "t_critic1", t_critic1_.store);
  restore_store_blocks(blocks, prefix + "t_critic2", t_critic2_.store);
}

json Td3Agent::extra_state() const {
  return json{{"adam_t_actor", opt_actor_.t},
              {"adam_t_critic1", opt_c1_.t},
              {"adam_t_critic2", opt_c2_.t},
              {"critic_updates", critic_updates_}};
}

void Td3Agent::set_extra_state(const json& j) {
  opt_actor_.t = j.at("adam_t_actor").get<int64_t>();
  opt_c1_.t = j.at("adam_t_critic1").get<int64_t>();
  opt_c2_.t = j.at("adam_t_critic2").get<int64_t>();
  critic_updates_ = j.at("critic_updates").get<long>();
}

// ---------------------------------------------------------------- PpoAgent

PpoAgent::PpoAgent(PpoSettings s, Rng& init) : s_(s) {
  actor_ = RecurrentNet::create(s_.obs_dim, s_.hidden, 2, init);
  critic_ = RecurrentNet::create(s_.obs_dim, s_.hidden, 1, init);
  opt_actor_.lr = opt_critic_.lr = s_.lr;
  opt_actor_.init(actor_.store);
  opt_critic_.init(critic_.store);
}

void PpoAgent::logits(const std::vector<double>& features, RecurrentState& st,
                      double out[2]) const {
  if (static_cast<int>(features.size()) != s_.obs_dim) {
    throw std::invalid_argument("PpoAgent: feature size mismatch");
  }
  std::vector<double> feat;
  actor_.trunk.infer(actor_.store, features.data(), st.h, st.c, feat);
  actor_.head.infer(actor_.store, feat.data(), out);
}

int PpoAgent::act(const std::vector<double>& features, PpoState& state, Rng& rng, double* logp,
                  double* value) const {
  double lg[2];
  logits(features, state.actor, lg);
  double m = std::max(lg[0], lg[1]);
  double z = std::exp(lg[0] - m) + std::exp(lg[1] - m);
  double lp0 = lg[0] - m - std::log(z);
  double lp1 = lg[1] - m - std::log(z);
  int a = rng.u01() < std::exp(lp0) ? 0 : 1;
  if (logp) *logp = a == 0 ? lp0 : lp1;
  std::vector<double> feat;
  critic_.trunk.infer(critic_.store, features.data(), state.critic.h, state.critic.c, feat);
  double v = 0.0;
  critic_.head.infer(critic_.store, feat.data(), &v);
  if (value) *value = v;
  return a;
}

int PpoAgent::act_argmax(const std::vector<double>& features, PpoState& state) const {
  double lg[2];
  logits(features, state.actor, lg);
  return lg[1] > lg[0] ? 1 : 0;
}

PpoStats PpoAgent::update(const RolloutBuffer& rollout) {
  PpoStats st;
  const auto& episodes = rollout.episodes();
  if (episodes.empty()) return st;

  std::vector<std::vector<double>> adv(episodes.size()), ret(episodes.size());
  size_t total = 0;
  for (size_t e = 0; e < episodes.size(); ++e) {
    std::vector<double> rewards, values;
    for (const auto& s : episodes[e].steps) {
      rewards.push_back(s.reward);
      values.push_back(s.value);
    }
    auto [a, r] = gae(rewards, values, s_.gamma, s_.lambda);
    adv[e] = std::move(a);
    ret[e] = std::move(r);
    total += rewards.size();
  }
  if (total == 0) return st;
  st.steps = static_cast<int>(total);

  double mean = 0.0;
  for (const auto& a : adv)
    for (double v : a) mean += v;
  mean /= static_cast<double>(total);
  double var = 0.0;
  for (const auto& a : adv)
    for (double v : a) var += (v - mean) * (v - mean);
  double sd = std::sqrt(var / static_cast<double>(total));
  if (sd > 1e-12) {
    for (auto& a : adv)
      for (double& v : a) v = (v - mean) / sd;
  }

  const int H = s_.hidden;
  for (int epoch = 0; epoch < s_.epochs; ++epoch) {
    Tape tape;
    ParamLeaves pa(tape, actor_.store), pc(tape, critic_.store);
    Tensor surr_sum = tape.fill(1, 1, 0.0);
    Tensor ent_sum = tape.fill(1, 1, 0.0);
    Tensor vloss_sum = tape.fill(1, 1, 0.0);
    for (size_t e = 0; e < episodes.size(); ++e) {
      Tensor h = tape.zeros(1, H), c = tape.zeros(1, H);
      Tensor hc = tape.zeros(1, H), cc = tape.zeros(1, H);
      for (size_t t = 0; t < episodes[e].steps.size(); ++t) {
        const PpoStep& step = episodes[e].steps[t];
        Tensor x = tape.input(1, s_.obs_dim, step.obs);
        Tensor lg = actor_.head.forward(tape, pa, actor_.trunk.step(tape, pa, x, h, c));
        Tensor lp = tape.log_softmax(lg);
        Tensor lpa = tape.take_per_row(lp, {step.action});
        Tensor ratio = tape.exp(tape.add_scalar(lpa, -step.logp));
        Tensor a_c = tape.fill(1, 1, adv[e][t]);
        Tensor s1 = tape.mul(ratio, a_c);
        Tensor s2 = tape.mul(tape.clamp(ratio, 1.0 - s_.clip, 1.0 + s_.clip), a_c);
        surr_sum = tape.add(surr_sum, tape.minimum(s1, s2));
        ent_sum = tape.add(ent_sum, tape.neg(tape.sum(tape.mul(tape.exp(lp), lp))));
        Tensor v = critic_.head.forward(tape, pc, critic_.trunk.step(tape, pc, x, hc, cc));
        vloss_sum = tape.add(vloss_sum, tape.square(tape.add_scalar(v, -ret[e][t])));
      }
    }
    double inv = 1.0 / static_cast<double>(total);
    Tensor surr = tape.scale(surr_sum, inv);
    Tensor ent = tape.scale(ent_sum, inv);
    Tensor vloss = tape.scale(vloss_sum, inv);
    if (epoch == 0) {
      st.surrogate_first = tape.scalar(surr);
      st.entropy_first = tape.scalar(ent);
      st.value_loss_first = tape.scalar(vloss);
    }
    Tensor loss = tape.add(tape.neg(surr),
                           tape.add(tape.scale(ent, -s_.entropy_coef),
                                    tape.scale(vloss, s_.value_coef)));
    tape.backward(loss);
    auto ga = actor_.store.zero_grads();
    pa.accumulate_grads(tape, ga);
    opt_actor_.step(actor_.store, ga);
    auto gc = critic_.store.zero_grads();
    pc.accumulate_grads(tape, gc);
    opt_critic_.step(critic_.store, gc);
  }
  st.updated = true;
  return st;
}

void PpoAgent::checkpoint(std::vector<CheckpointBlock>& out, const std::string& prefix) const {
  append_store_blocks(out, prefix + "actor", actor_.store);
  append_adam_blocks(out, prefix + "actor", actor_.store, opt_actor_);
  append_store_blocks(out, prefix + "critic", critic_.store);
  append_adam_blocks(out, prefix + "critic", critic_.store, opt_critic_);
}

void PpoAgent::restore(const std::vector<CheckpointBlock>& blocks, const std::string& prefix) {
  restore_store_blocks(blocks, prefix + "actor", actor_.store);
  restore_adam_blocks(blocks, prefix + "actor", actor_.store, opt_actor_);
  restore_store_blocks(blocks, prefix + "critic", critic_.store);
  restore_adam_blocks(blocks, prefix + "critic", critic_.store, opt_critic_);
}

json PpoAgent::extra_state() const {
  return json{{"adam_t_actor", opt_actor_.t}, {"adam_t_critic", opt_critic_.t}};
}

void PpoAgent::set_extra_state(const json& j) {
  opt_actor_.t = j.at("adam_t_actor").get<int64_t>();
  opt_critic_.t = j.at("adam_t_critic").get<int64_t>();
}

// ------------------------------------------------------------ OpponentModel

OpponentModel::OpponentModel(OppSettings s, Rng& init) : s_(s) {
  d1_ = Dense::create(store_, "d1", 3, s_.hidden, init);
  d2_ = Dense::create(store_, "d2", s_.hidden, s_.hidden, init);
  head_mu_ = Dense::create(store_, "mu", s_.hidden, 2, init);
  head_sigma_ = Dense::create(store_, "sigma", s_.hidden, 1, init);
  opt_.lr = s_.lr;
  opt_.init(store_);
}

Prediction OpponentModel::predict(const Vec2& last_observed, double elapsed) const {
  double x[3] = {last_observed.x, last_observed.y, elapsed / s_.elapsed_scale};
  std::vector<double> h1(s_.hidden), h2(s_.hidden);
  d1_.infer(store_, x, h1.data());
  relu_inplace(h1);
  d2_.infer(store_, h1.data(), h2.data());
  relu_inplace(h2);
  double mu[2];
  head_mu_.infer(store_, h2.data(), mu);
  double sraw = 0.0;
  head_sigma_.infer(store_, h2.data(), &sraw);
  return {Vec2{last_observed.x + mu[0], last_observed.y + mu[1]}, softplus(sraw) + s_.eps};
}

double OpponentModel::update(const std::vector<OppPair>& batch) {
  if (batch.empty()) return 0.0;
  const int B = static_cast<int>(batch.size());
  std::vector<double> xs(B * 3), deltas(B * 2);
  for (int b = 0; b < B; ++b) {
    xs[b * 3 + 0] = batch[b].anchor.x;
    xs[b * 3 + 1] = batch[b].anchor.y;
    xs[b * 3 + 2] = batch[b].elapsed / s_.elapsed_scale;
    deltas[b * 2 + 0] = batch[b].truth.x - batch[b].anchor.x;
    deltas[b * 2 + 1] = batch[b].truth.y - batch[b].anchor.y;
  }
  Tape tape;
  ParamLeaves p(tape, store_);
  Tensor x = tape.input(B, 3, xs);
  Tensor h1 = tape.relu(d1_.forward(tape, p, x));
  Tensor h2 = tape.relu(d2_.forward(tape, p, h1));
  Tensor mu = head_mu_.forward(tape, p, h2);
  Tensor sigma = tape.add_scalar(tape.softplus(head_sigma_.forward(tape, p, h2)), s_.eps);
  Tensor d = tape.input(B, 2, deltas);
  Tensor dist = tape.sqrt(tape.add_scalar(tape.row_sum(tape.square(tape.sub(mu, d))), 1e-12));
  Tensor denom = tape.add_scalar(tape.scale(sigma, 2.0), s_.eps);
  Tensor score = tape.add(tape.div(dist, denom),
                          tape.scale(tape.log(tape.add_scalar(sigma, s_.eps)), 0.5));
  Tensor loss = tape.mean(score);
  tape.backward(loss);
  auto g = store_.zero_grads();
  p.accumulate_grads(tape, g);
  opt_.step(store_, g);
  return tape.scalar(loss);
}

void OpponentModel::checkpoint(std::vector<CheckpointBlock>& out,
                               const std::string& prefix) const {
  append_store_blocks(out, prefix + "net", store_);
  append_adam_blocks(out, prefix + "net", store_, opt_);
}

void OpponentModel::restore(const std::vector<CheckpointBlock>& blocks,
                            const std::string& prefix) {
  restore_store_blocks(blocks, prefix + "net", store_);
  restore_adam_blocks(blocks, prefix + "net", store_, opt_);
}

json OpponentModel::extra_state() const { return json{{"adam_t", opt_.t}}; }

void OpponentModel::set_extra_state(const json& j) { opt_.t = j.at("adam_t").get<int64_t>(); }

}  // namespace peec
