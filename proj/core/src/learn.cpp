#include "faascamp/learn.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <string>

#include "faascamp/features.hpp"
#include "faascamp/rng.hpp"

namespace faascamp::learn {

namespace {

// Dot product with four explicit accumulators: fixed summation order (so runs
// are bit-reproducible) while still giving the compiler independent chains to
// vectorize.
double dot(const double* a, const double* b, int n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  int i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  for (; i < n; ++i) s0 += a[i] * b[i];
  return (s0 + s1) + (s2 + s3);
}

void axpy(double alpha, const double* x, double* y, int n) {
  for (int i = 0; i < n; ++i) y[i] += alpha * x[i];
}

// Numerically stable weighted BCE on the logit z.
double bce_from_logit(double z, double y) {
  const double abs_z = std::abs(z);
  return std::max(z, 0.0) - z * y + std::log1p(std::exp(-abs_z));
}

struct Workspace {
  std::vector<std::vector<double>> acts;    // acts[0] = input, acts[L] = logit
  std::vector<std::vector<double>> deltas;  // deltas[l] for layer l output

  explicit Workspace(const std::vector<int>& dims) {
    for (const int d : dims) {
      acts.emplace_back(static_cast<std::size_t>(d), 0.0);
    }
    for (std::size_t l = 1; l < dims.size(); ++l)
      deltas.emplace_back(static_cast<std::size_t>(dims[l]), 0.0);
  }
};

// Forward pass keeping activations; returns the output logit.
double forward_ws(const MlpModel& m, const TrainingSample& s, Workspace& ws) {
  const int in0 = m.layer_dims[0];
  if (static_cast<int>(s.features.size()) != in0)
    throw ModelError("sample width does not match model input");
  for (int i = 0; i < in0; ++i) ws.acts[0][static_cast<std::size_t>(i)] = s.features[static_cast<std::size_t>(i)];

  const int L = m.num_layers();
  for (int l = 0; l < L; ++l) {
    const int in = m.layer_dims[static_cast<std::size_t>(l)];
    const int out = m.layer_dims[static_cast<std::size_t>(l) + 1];
    const double* w = m.weights[static_cast<std::size_t>(l)].data();
    const double* b = m.biases[static_cast<std::size_t>(l)].data();
    const double* a = ws.acts[static_cast<std::size_t>(l)].data();
    double* next = ws.acts[static_cast<std::size_t>(l) + 1].data();
    const bool last = l + 1 == L;
    for (int o = 0; o < out; ++o) {
      const double z = b[o] + dot(w + static_cast<std::size_t>(o) * static_cast<std::size_t>(in), a, in);
      next[o] = last ? z : (z > 0.0 ? z : 0.0);
    }
  }
  return ws.acts.back()[0];
}

std::vector<double> sample_weights_for(std::span<const TrainingSample> samples) {
  std::vector<double> w(samples.size(), 1.0);

  bool any_grouped = false;
  for (const TrainingSample& s : samples) {
    if (s.group_id >= 0) {
      any_grouped = true;
      break;
    }
  }

  if (any_grouped) {
    // The lone positive of a decision group balances its group's negatives.
    std::map<std::int32_t, std::int64_t> group_size;
    for (const TrainingSample& s : samples) {
      if (s.group_id >= 0) ++group_size[s.group_id];
    }
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const TrainingSample& s = samples[i];
      if (s.label && s.group_id >= 0)
        w[i] = static_cast<double>(std::max<std::int64_t>(group_size[s.group_id] - 1, 0));
    }
  } else {
    std::int64_t pos = 0, neg = 0;
    for (const TrainingSample& s : samples) (s.label ? pos : neg) += 1;
    const double wpos = pos > 0 ? static_cast<double>(neg) / static_cast<double>(pos) : 1.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      if (samples[i].label) w[i] = wpos;
    }
  }
  return w;
}

double loss_and_gradients_impl(const MlpModel& m, std::span<const TrainingSample> batch,
                               std::span<const double> weights, Gradients* grads, Workspace& ws) {
  if (batch.size() != weights.size())
    throw ModelError("batch and weight counts differ");

  double weight_sum = 0.0;
  for (const double w : weights) weight_sum += w;
  if (weight_sum <= 0.0) return 0.0;

  const int L = m.num_layers();
  double loss = 0.0;
  for (std::size_t si = 0; si < batch.size(); ++si) {
    const double w = weights[si];
    if (w == 0.0) continue;
    const TrainingSample& s = batch[si];
    const double z = forward_ws(m, s, ws);
    const double y = s.label ? 1.0 : 0.0;
    loss += w * bce_from_logit(z, y);
    if (grads == nullptr) continue;

    const double p = 1.0 / (1.0 + std::exp(-z));
    ws.deltas[static_cast<std::size_t>(L - 1)][0] = w * (p - y) / weight_sum;

    for (int l = L - 1; l >= 0; --l) {
      const int in = m.layer_dims[static_cast<std::size_t>(l)];
      const int out = m.layer_dims[static_cast<std::size_t>(l) + 1];
      const double* delta = ws.deltas[static_cast<std::size_t>(l)].data();
      const double* a_prev = ws.acts[static_cast<std::size_t>(l)].data();
      double* dw = grads->dweights[static_cast<std::size_t>(l)].data();
      double* db = grads->dbiases[static_cast<std::size_t>(l)].data();
      const double* wmat = m.weights[static_cast<std::size_t>(l)].data();

      double* dprev = l > 0 ? ws.deltas[static_cast<std::size_t>(l) - 1].data() : nullptr;
      if (dprev != nullptr) std::fill(dprev, dprev + in, 0.0);

      for (int o = 0; o < out; ++o) {
        const double d = delta[o];
        if (d == 0.0) continue;
        db[o] += d;
        axpy(d, a_prev, dw + static_cast<std::size_t>(o) * static_cast<std::size_t>(in), in);
        if (dprev != nullptr)
          axpy(d, wmat + static_cast<std::size_t>(o) * static_cast<std::size_t>(in), dprev, in);
      }
      if (l > 0) {
        // ReLU gate: the hidden activation is zero exactly where its input was
        // clamped.
        const double* a_here = ws.acts[static_cast<std::size_t>(l)].data();
        double* d_here = ws.deltas[static_cast<std::size_t>(l) - 1].data();
        for (int i = 0; i < in; ++i) {
          if (a_here[i] <= 0.0) d_here[i] = 0.0;
        }
      }
    }
  }
  return loss / weight_sum;
}

Gradients make_gradients(const MlpModel& m) {
  Gradients g;
  for (int l = 0; l < m.num_layers(); ++l) {
    g.dweights.emplace_back(m.weights[static_cast<std::size_t>(l)].size(), 0.0);
    g.dbiases.emplace_back(m.biases[static_cast<std::size_t>(l)].size(), 0.0);
  }
  return g;
}

void zero_gradients(Gradients& g) {
  for (auto& v : g.dweights) std::fill(v.begin(), v.end(), 0.0);
  for (auto& v : g.dbiases) std::fill(v.begin(), v.end(), 0.0);
}

struct AdamState {
  std::vector<std::vector<double>> mw, vw, mb, vb;
  std::int64_t t = 0;

  explicit AdamState(const MlpModel& m) {
    for (int l = 0; l < m.num_layers(); ++l) {
      mw.emplace_back(m.weights[static_cast<std::size_t>(l)].size(), 0.0);
      vw.emplace_back(m.weights[static_cast<std::size_t>(l)].size(), 0.0);
      mb.emplace_back(m.biases[static_cast<std::size_t>(l)].size(), 0.0);
      vb.emplace_back(m.biases[static_cast<std::size_t>(l)].size(), 0.0);
    }
  }
};

void adam_step(MlpModel& m, const Gradients& g, AdamState& st, double lr) {
  constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
  ++st.t;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(st.t));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(st.t));

  auto update = [&](std::vector<double>& theta, const std::vector<double>& grad,
                    std::vector<double>& mo, std::vector<double>& ve) {
    for (std::size_t i = 0; i < theta.size(); ++i) {
      mo[i] = b1 * mo[i] + (1.0 - b1) * grad[i];
      ve[i] = b2 * ve[i] + (1.0 - b2) * grad[i] * grad[i];
      theta[i] -= lr * (mo[i] / c1) / (std::sqrt(ve[i] / c2) + eps);
    }
  };
  for (int l = 0; l < m.num_layers(); ++l) {
    update(m.weights[static_cast<std::size_t>(l)], g.dweights[static_cast<std::size_t>(l)],
           st.mw[static_cast<std::size_t>(l)], st.vw[static_cast<std::size_t>(l)]);
    update(m.biases[static_cast<std::size_t>(l)], g.dbiases[static_cast<std::size_t>(l)],
           st.mb[static_cast<std::size_t>(l)], st.vb[static_cast<std::size_t>(l)]);
  }
}

class CaptureObserver final : public sim::DecisionObserver {
 public:
  CaptureObserver(int num_workloads, int oracle_window, int cap, int stride,
                  std::int32_t& next_group, std::vector<TrainingSample>& out)
      : num_workloads_(num_workloads),
        oracle_window_(oracle_window),
        cap_(cap),
        stride_(std::max(stride, 1)),
        next_group_(next_group),
        out_(out) {}

  void on_eviction_decision(const features::SystemStateVector& sys,
                            std::span<const features::ContainerStateVector> containers,
                            std::span<const policy::EvictionCandidate> candidates,
                            const policy::DecisionContext& ctx,
                            int /*chosen_container_id*/) override {
    // Striding spreads the kept decisions across the whole stream instead of
    // front-loading the corpus with its opening minutes.
    const bool keep = seen_++ % stride_ == 0;
    if (!keep || (cap_ > 0 && captured_ >= cap_)) return;
    ++captured_;
    // The label is always the clairvoyant pick for this state, whatever
    // policy drives the rollout.
    const int best = policy::belady_select(
        candidates, policy::OracleContext{ctx.future, ctx.current_seq}, oracle_window_);
    const std::int32_t group = next_group_++;
    std::vector<double> row(features::kFeatureDim);
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      features::encode(sys, containers[i], num_workloads_, static_cast<int>(candidates.size()),
                       row);
      TrainingSample s;
      s.features.assign(row.begin(), row.end());
      s.label = candidates[i].container_id == best ? 1 : 0;
      s.group_id = group;
      out_.push_back(std::move(s));
    }
  }

 private:
  int num_workloads_;
  int oracle_window_;
  int cap_;
  int stride_;
  std::int64_t seen_ = 0;
  int captured_ = 0;
  std::int32_t& next_group_;
  std::vector<TrainingSample>& out_;
};

}  // namespace

std::vector<TrainingSample> generate_training_data(
    std::span<const std::vector<trace::InvocationEvent>> streams, const DataGenConfig& cfg) {
  if (cfg.rollout_policies.empty()) throw ModelError("no rollout policies configured");
  std::vector<TrainingSample> samples;
  std::int32_t next_group = 0;
  policy::PolicyParams pp;
  pp.belady_window = cfg.oracle_window;
  for (std::size_t i = 0; i < streams.size(); ++i) {
    const std::string& name = cfg.rollout_policies[i % cfg.rollout_policies.size()];
    const std::unique_ptr<policy::EvictionPolicy> rollout = policy::make_policy(name, pp);
    CaptureObserver obs(static_cast<int>(cfg.workloads.size()), cfg.oracle_window,
                        cfg.max_decisions_per_stream, cfg.capture_stride, next_group, samples);
    sim::run_simulation(streams[i], cfg.workloads, cfg.pool, *rollout, &obs);
  }
  return samples;
}

double loss_and_gradients(const MlpModel& model, std::span<const TrainingSample> batch,
                          std::span<const double> sample_weights, Gradients& out) {
  out = make_gradients(model);
  Workspace ws(model.layer_dims);
  return loss_and_gradients_impl(model, batch, sample_weights, &out, ws);
}

double batch_loss(const MlpModel& model, std::span<const TrainingSample> batch,
                  std::span<const double> sample_weights) {
  Workspace ws(model.layer_dims);
  return loss_and_gradients_impl(model, batch, sample_weights, nullptr, ws);
}

MlpModel train(std::span<const TrainingSample> samples, const TrainConfig& cfg,
               std::vector<int> layer_dims, TrainStats* stats, const MlpModel* init) {
  if (samples.empty()) throw ModelError("no training samples");
  if (cfg.epochs <= 0 || cfg.batch_size <= 0 || cfg.learning_rate <= 0.0)
    throw ModelError("bad training configuration");
  if (cfg.validation_fraction < 0.0 || cfg.validation_fraction >= 1.0)
    throw ModelError("validation fraction must be in [0, 1)");

  MlpModel model = init != nullptr ? *init : make_model(std::move(layer_dims), cfg.seed);
  const std::vector<double> weights = sample_weights_for(samples);

  // Whole decision groups go to one side of the split, so validation scores
  // unseen decisions rather than unseen rows of seen decisions.
  std::vector<std::size_t> order;
  std::vector<TrainingSample> val_rows;
  std::vector<double> val_w;
  if (cfg.validation_fraction > 0.0 && samples.size() > 1) {
    std::vector<std::vector<std::size_t>> groups;
    std::map<std::int64_t, std::size_t> slot_of;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const std::int64_t key =
          samples[i].group_id >= 0 ? samples[i].group_id : -static_cast<std::int64_t>(i) - 1;
      const auto [it, fresh] = slot_of.try_emplace(key, groups.size());
      if (fresh) groups.emplace_back();
      groups[it->second].push_back(i);
    }

    std::vector<std::size_t> group_order(groups.size());
    std::iota(group_order.begin(), group_order.end(), 0);
    Rng vrng = Rng(cfg.seed).split("val");
    vrng.shuffle(group_order);

    const auto n_val = std::clamp<std::size_t>(
        static_cast<std::size_t>(cfg.validation_fraction * static_cast<double>(groups.size())), 1,
        groups.size() - 1);
    for (std::size_t g = 0; g < group_order.size(); ++g) {
      for (const std::size_t i : groups[group_order[g]]) {
        if (g < n_val) {
          val_rows.push_back(samples[i]);
          val_w.push_back(weights[i]);
        } else {
          order.push_back(i);
        }
      }
    }
  } else {
    order.resize(samples.size());
    std::iota(order.begin(), order.end(), 0);
  }

  // Exact-pick accuracy is what the closed loop rewards, so prefer it as the
  // validation score whenever the held-out rows form decision groups.
  const bool val_by_accuracy =
      std::any_of(val_rows.begin(), val_rows.end(), [](const auto& s) { return s.group_id >= 0; });

  if (stats != nullptr) {
    stats->initial_loss = batch_loss(model, samples, weights);
    stats->epoch_loss.clear();
    stats->val_score.clear();
    stats->best_epoch = -1;
  }

  Workspace ws(model.layer_dims);
  Gradients grads = make_gradients(model);
  AdamState adam(model);
  Rng base(cfg.seed);

  std::vector<TrainingSample> batch;
  std::vector<double> batch_w;
  MlpModel best = model;
  double best_val = 0.0;
  int best_epoch = -1;
  int stale = 0;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    Rng erng = base.split("epoch", static_cast<std::uint64_t>(epoch));
    erng.shuffle(order);

    double epoch_loss_sum = 0.0;
    double epoch_weight = 0.0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      batch.clear();
      batch_w.clear();
      double wsum = 0.0;
      for (std::size_t k = start; k < end; ++k) {
        batch.push_back(samples[order[k]]);
        batch_w.push_back(weights[order[k]]);
        wsum += weights[order[k]];
      }
      if (wsum <= 0.0) continue;
      zero_gradients(grads);
      const double loss = loss_and_gradients_impl(model, batch, batch_w, &grads, ws);
      adam_step(model, grads, adam, cfg.learning_rate);
      epoch_loss_sum += loss * wsum;
      epoch_weight += wsum;
    }
    if (stats != nullptr)
      stats->epoch_loss.push_back(epoch_weight > 0.0 ? epoch_loss_sum / epoch_weight : 0.0);

    if (!val_rows.empty()) {
      const double vl = val_by_accuracy ? 1.0 - group_accuracy(model, val_rows)
                                        : batch_loss(model, val_rows, val_w);
      if (stats != nullptr) stats->val_score.push_back(vl);
      if (best_epoch < 0 || vl < best_val) {
        best_val = vl;
        best_epoch = epoch;
        best = model;
        stale = 0;
      } else if (cfg.patience > 0 && ++stale >= cfg.patience) {
        break;
      }
    }
  }

  if (!val_rows.empty()) {
    model = std::move(best);
    if (stats != nullptr) stats->best_epoch = best_epoch;
  }
  if (stats != nullptr) stats->final_loss = batch_loss(model, samples, weights);
  return model;
}

MlpModel retrain(const MlpModel& base, std::span<const TrainingSample> old_samples,
                 std::span<const TrainingSample> new_samples, RetrainStrategy strategy,
                 const RetrainConfig& cfg, TrainStats* stats) {
  if (strategy == RetrainStrategy::Scratch) {
    return train(new_samples, cfg.train, base.layer_dims, stats, nullptr);
  }

  // Mix: blend a seeded subsample of the old corpus with the new one and
  // continue from the existing parameters.
  const std::size_t keep = static_cast<std::size_t>(
      cfg.mix_old_fraction * static_cast<double>(old_samples.size()));
  std::vector<std::size_t> idx(old_samples.size());
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng = Rng(cfg.train.seed).split("mix");
  rng.shuffle(idx);

  std::vector<TrainingSample> corpus;
  corpus.reserve(keep + new_samples.size());
  for (std::size_t k = 0; k < keep && k < idx.size(); ++k)
    corpus.push_back(old_samples[idx[k]]);
  corpus.insert(corpus.end(), new_samples.begin(), new_samples.end());
  return train(corpus, cfg.train, base.layer_dims, stats, &base);
}

double evaluate_loss(const MlpModel& model, std::span<const TrainingSample> samples) {
  const std::vector<double> weights = sample_weights_for(samples);
  return batch_loss(model, samples, weights);
}

double group_accuracy(const MlpModel& model, std::span<const TrainingSample> samples) {
  std::map<std::int32_t, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].group_id >= 0) groups[samples[i].group_id].push_back(i);
  }
  if (groups.empty()) throw ModelError("group accuracy needs grouped samples");

  Workspace ws(model.layer_dims);
  std::int64_t correct = 0, total = 0;
  for (const auto& [gid, members] : groups) {
    std::size_t best = members.front();
    double best_z = -1e300;
    bool has_positive = false;
    for (const std::size_t i : members) {
      if (samples[i].label) has_positive = true;
      const double z = forward_ws(model, samples[i], ws);
      if (z > best_z) {
        best_z = z;
        best = i;
      }
    }
    if (!has_positive) continue;
    ++total;
    if (samples[best].label) ++correct;
  }
  return total > 0 ? static_cast<double>(correct) / static_cast<double>(total) : 0.0;
}

void save_samples_csv(const std::filesystem::path& path, std::span<const TrainingSample> samples) {
  std::ofstream out(path);
  if (!out) throw ModelError("cannot write " + path.string());

  out << "cur_workload,pii1,pii2";
  for (int k = 0; k < features::kHistoryLen; ++k) {
    char name[16];
    std::snprintf(name, sizeof(name), ",h%03d", k);
    out << name;
  }
  out << ",c_workload,idle_rank,frequency,freq_rank,alive_count,warm_count,past10,past50,past100,label\n";

  char buf[32];
  for (const TrainingSample& s : samples) {
    if (static_cast<int>(s.features.size()) != features::kFeatureDim)
      throw ModelError("sample width must be " + std::to_string(features::kFeatureDim));
    for (std::size_t i = 0; i < s.features.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.9g", static_cast<double>(s.features[i]));
      if (i > 0) out << ',';
      out << buf;
    }
    out << ',' << static_cast<int>(s.label) << '\n';
  }
  if (!out) throw ModelError("write failed for " + path.string());
}

std::vector<TrainingSample> load_samples_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open " + path.string());

  std::vector<TrainingSample> samples;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1 && line.rfind("cur_workload,", 0) == 0) continue;

    TrainingSample s;
    s.features.reserve(features::kFeatureDim);
    std::size_t start = 0;
    int col = 0;
    bool bad = false;
    while (start <= line.size()) {
      std::size_t comma = line.find(',', start);
      if (comma == std::string::npos) comma = line.size();
      const std::string_view field(line.data() + start, comma - start);
      double v = 0.0;
      const auto [p, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (ec != std::errc{} || p != field.data() + field.size() || field.empty()) {
        bad = true;
        break;
      }
      if (col < features::kFeatureDim) {
        s.features.push_back(static_cast<float>(v));
      } else {
        if (v != 0.0 && v != 1.0)
          throw ModelError(path.string() + ":" + std::to_string(line_no) + ": label must be 0 or 1");
        s.label = v != 0.0 ? 1 : 0;
      }
      ++col;
      start = comma + 1;
      if (comma == line.size()) break;
    }
    if (bad)
      throw ModelError(path.string() + ":" + std::to_string(line_no) + ": non-numeric field");
    if (col != features::kFeatureDim + 1)
      throw ModelError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                       std::to_string(features::kFeatureDim + 1) + " columns, got " +
                       std::to_string(col));
    samples.push_back(std::move(s));
  }
  return samples;
}

}  // namespace faascamp::learn
