#include "amrgen/transition_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "amrgen/errors.hpp"

namespace amrgen {

namespace {

constexpr const char* kModelMagic = "amrgen-transition-model";
constexpr int kModelVersion = 1;

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// -log(sigmoid(z)) for label 1, -log(1 - sigmoid(z)) for label 0
double logistic_loss(double z, bool positive) {
  const double softplus = std::log1p(std::exp(-std::abs(z))) + std::max(z, 0.0);
  return softplus - (positive ? z : 0.0);
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::array<double, kNumFeatures + 1> TransitionModel::scaled(const FeatureVector& f) const {
  const auto raw = f.values();
  std::array<double, kNumFeatures + 1> out{};
  for (std::size_t i = 0; i < kNumFeatures; ++i) out[i] = (raw[i] - mean[i]) / stdev[i];
  out[kNumFeatures] = 1.0;
  return out;
}

double TransitionModel::activation(const FeatureVector& f) const {
  const auto x = scaled(f);
  double z = 0.0;
  for (std::size_t i = 0; i <= kNumFeatures; ++i) z += weights[i] * x[i];
  return z;
}

TransitionModel TransitionModel::unscaled() const {
  TransitionModel out;
  double bias = weights[kNumFeatures];
  for (std::size_t i = 0; i < kNumFeatures; ++i) {
    out.weights[i] = weights[i] / stdev[i];
    bias -= weights[i] * mean[i] / stdev[i];
  }
  out.weights[kNumFeatures] = bias;
  return out;
}

void TransitionModel::write(std::ostream& out) const {
  out << kModelMagic << ' ' << kModelVersion << '\n';
  for (std::size_t i = 0; i < kNumFeatures; ++i) {
    out << kFeatureNames[i] << ' ' << format_double(weights[i]) << ' ' << format_double(mean[i]) << ' '
        << format_double(stdev[i]) << '\n';
  }
  out << kFeatureNames[kNumFeatures] << ' ' << format_double(weights[kNumFeatures]) << " 0 1\n";
}

void TransitionModel::write_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::ios_base::failure("cannot write " + path);
  write(out);
  if (!out) throw std::ios_base::failure("write failed: " + path);
}

TransitionModel TransitionModel::read(std::istream& in) {
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != kModelMagic) throw FormatError("model file: missing header");
  if (version != kModelVersion) throw FormatError("model file: unsupported version " + std::to_string(version));

  TransitionModel m;
  std::array<bool, kNumFeatures + 1> seen{};
  std::string name;
  double w = 0, mu = 0, sd = 0;
  while (in >> name) {
    if (!(in >> w >> mu >> sd)) throw FormatError("model file: bad line for " + name);
    const auto it = std::find_if(kFeatureNames.begin(), kFeatureNames.end(), [&](const char* n) { return name == n; });
    if (it == kFeatureNames.end()) throw FormatError("model file: unknown feature " + name);
    const auto i = static_cast<std::size_t>(it - kFeatureNames.begin());
    if (!std::isfinite(w) || !std::isfinite(mu) || !(sd > 0)) throw FormatError("model file: bad values for " + name);
    m.weights[i] = w;
    if (i < kNumFeatures) {
      m.mean[i] = mu;
      m.stdev[i] = sd;
    }
    seen[i] = true;
  }
  if (!std::all_of(seen.begin(), seen.end(), [](bool b) { return b; })) {
    throw FormatError("model file: missing feature lines");
  }
  return m;
}

TransitionModel TransitionModel::read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open " + path);
  return read(in);
}

double probability(const TransitionModel& model, const FeatureVector& f) { return sigmoid(model.activation(f)); }

double transition_cost(double p) {
  if (std::isnan(p)) p = kProbabilityClamp;
  p = std::clamp(p, kProbabilityClamp, 1.0 - kProbabilityClamp);
  return -std::log(p);
}

// ---------------------------------------------------------------------------
// Features

FeatureExtractor::FeatureExtractor(const AmrGraph& graph, const NgramLm& lm)
    : graph_(graph), lm_(lm), distances_(undirected_distances(graph)) {}

FeatureVector FeatureExtractor::operator()(const AgtspNode& from, const AgtspNode& to) const {
  static const std::vector<std::string> bos{NgramLm::kBos};
  static const std::vector<std::string> eos{NgramLm::kEos};

  const auto& context = from.is_start() ? bos : from.rule->translation();
  const auto& continuation = to.is_end() ? eos : to.rule->translation();

  FeatureVector f;
  f.lm_score = lm_.score_after(context, continuation);
  f.word_count = to.is_end() ? 0.0 : static_cast<double>(continuation.size());
  if (from.is_ordinary() && to.is_ordinary()) {
    const NodeId a = from.rule->root();
    const NodeId b = to.rule->root();
    f.path_length = static_cast<double>(distances_[a.index * graph_.size() + b.index]);
  }
  return f;
}

FeatureVector extract_features(const AgtspNode& from, const AgtspNode& to, const AmrGraph& graph, const NgramLm& lm) {
  return FeatureExtractor(graph, lm)(from, to);
}

// ---------------------------------------------------------------------------
// Training

double regularized_nll(const TransitionModel& model, std::span<const TransitionExample> examples, double l2) {
  double loss = 0.0;
  for (const auto& ex : examples) loss += logistic_loss(model.activation(ex.features), ex.positive);
  loss /= static_cast<double>(examples.size());
  for (std::size_t i = 0; i < kNumFeatures; ++i) loss += 0.5 * l2 * model.weights[i] * model.weights[i];
  return loss;
}

std::array<double, kNumFeatures + 1> regularized_nll_gradient(const TransitionModel& model,
                                                              std::span<const TransitionExample> examples,
                                                              double l2) {
  std::array<double, kNumFeatures + 1> g{};
  for (const auto& ex : examples) {
    const auto x = model.scaled(ex.features);
    double z = 0.0;
    for (std::size_t i = 0; i <= kNumFeatures; ++i) z += model.weights[i] * x[i];
    const double residual = sigmoid(z) - (ex.positive ? 1.0 : 0.0);
    for (std::size_t i = 0; i <= kNumFeatures; ++i) g[i] += residual * x[i];
  }
  for (auto& v : g) v /= static_cast<double>(examples.size());
  for (std::size_t i = 0; i < kNumFeatures; ++i) g[i] += l2 * model.weights[i];
  return g;
}

double accuracy(const TransitionModel& model, std::span<const TransitionExample> examples) {
  if (examples.empty()) return 0.0;
  std::size_t correct = 0;
  for (const auto& ex : examples) {
    if ((probability(model, ex.features) >= 0.5) == ex.positive) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(examples.size());
}

TransitionModel train_transition_model(std::span<const TransitionExample> examples, const TrainingOptions& options,
                                       TrainingReport* report) {
  const auto positives = std::count_if(examples.begin(), examples.end(), [](const auto& e) { return e.positive; });
  if (positives == 0 || static_cast<std::size_t>(positives) == examples.size()) {
    throw TrainingError("training examples contain a single label (" + std::to_string(positives) + " positive of " +
                        std::to_string(examples.size()) + ")");
  }
  if (options.l2 < 0) throw std::invalid_argument("l2 must be non-negative");

  TransitionModel model;
  if (options.standardize) {
    const double n = static_cast<double>(examples.size());
    for (std::size_t i = 0; i < kNumFeatures; ++i) {
      double sum = 0.0;
      for (const auto& ex : examples) sum += ex.features.values()[i];
      const double mu = sum / n;
      double var = 0.0;
      for (const auto& ex : examples) {
        const double d = ex.features.values()[i] - mu;
        var += d * d;
      }
      const double sd = std::sqrt(var / n);
      model.mean[i] = mu;
      model.stdev[i] = sd > 1e-12 ? sd : 1.0;
    }
  }

  std::vector<std::size_t> index(examples.size());
  std::iota(index.begin(), index.end(), 0);
  std::mt19937_64 rng(options.seed);
  std::vector<TransitionExample> batch;

  double prev = regularized_nll(model, examples, options.l2);
  std::vector<double> losses;
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    if (options.batch_size == 0 || options.batch_size >= examples.size()) {
      const auto g = regularized_nll_gradient(model, examples, options.l2);
      for (std::size_t i = 0; i <= kNumFeatures; ++i) model.weights[i] -= options.learning_rate * g[i];
    } else {
      // Fisher-Yates with the raw engine output so the permutation does not
      // depend on the standard library's distribution implementations.
      for (std::size_t i = index.size() - 1; i > 0; --i) std::swap(index[i], index[rng() % (i + 1)]);
      for (std::size_t start = 0; start < index.size(); start += options.batch_size) {
        batch.clear();
        for (std::size_t k = start; k < std::min(start + options.batch_size, index.size()); ++k) {
          batch.push_back(examples[index[k]]);
        }
        const auto g = regularized_nll_gradient(model, batch, options.l2);
        for (std::size_t i = 0; i <= kNumFeatures; ++i) model.weights[i] -= options.learning_rate * g[i];
      }
    }

    const double loss = regularized_nll(model, examples, options.l2);
    if (!std::isfinite(loss)) {
      throw TrainingError("non-finite training loss at epoch " + std::to_string(epoch + 1));
    }
    if (loss > prev + 1e-12 * std::max(1.0, std::abs(prev))) {
      std::ostringstream msg;
      msg.precision(12);
      msg << "training loss increased at epoch " << epoch + 1 << " (" << prev << " -> " << loss
          << "); learning rate " << options.learning_rate << " is too large";
      throw TrainingError(msg.str());
    }
    losses.push_back(loss);
    const bool converged = prev - loss < options.tolerance;
    prev = loss;
    if (converged) break;
  }

  if (report) {
    report->losses = std::move(losses);
    report->accuracy = accuracy(model, examples);
  }
  return model;
}

void write_examples_tsv(std::ostream& out, std::span<const TransitionExample> examples) {
  out << "label\tlm_score\tword_count\tpath_length\n";
  for (const auto& ex : examples) {
    out << (ex.positive ? "yes" : "no") << '\t' << format_double(ex.features.lm_score) << '\t'
        << format_double(ex.features.word_count) << '\t' << format_double(ex.features.path_length) << '\n';
  }
}

}  // namespace amrgen
