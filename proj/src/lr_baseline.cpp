#include "ontomatch/lr_baseline.hpp"

#include <cmath>
#include <sstream>

#include "json.hpp"
#include "ontomatch/errors.hpp"
#include "ontomatch/io.hpp"

namespace ontomatch {
namespace {

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + e^z), stable for large |z|.
double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

}  // namespace

double lr_objective(const LrModel& model, const FeatureMatrix& x, const Eigen::VectorXd& y) {
  const Eigen::VectorXd z = (x * model.weights).array() + model.bias;
  double loss = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) loss += softplus(z(i)) - y(i) * z(i);
  return loss / static_cast<double>(z.size()) + 0.5 * model.l2_lambda * model.weights.squaredNorm();
}

Eigen::VectorXd lr_gradient(const LrModel& model, const FeatureMatrix& x, const Eigen::VectorXd& y) {
  const Eigen::VectorXd z = (x * model.weights).array() + model.bias;
  Eigen::VectorXd residual = z.unaryExpr(&sigmoid) - y;
  const double n = static_cast<double>(z.size());
  Eigen::VectorXd g(kFeatureCount + 1);
  g.head<kFeatureCount>() = x.transpose() * residual / n + model.l2_lambda * model.weights;
  g(kFeatureCount) = residual.sum() / n;
  return g;
}

LrModel train_lr(const FeatureMatrix& x, const Eigen::VectorXd& y, const LrTrainConfig& config,
                 LrTrainReport* report) {
  if (x.rows() != y.size()) throw ValidationError("feature and label counts differ");
  const auto positives = (y.array() == 1.0).count();
  const auto negatives = (y.array() == 0.0).count();
  if (positives + negatives != y.size()) throw ValidationError("labels must be 0 or 1");
  if (positives == 0 || negatives == 0) throw ValidationError("logistic regression needs both labels");

  LrModel model;
  model.l2_lambda = config.l2_lambda;
  double loss = lr_objective(model, x, y);
  LrTrainReport local;
  local.initial_loss = loss;

  constexpr double kArmijo = 1e-4;
  double step = 1.0;
  int it = 0;
  for (; it < config.max_iterations; ++it) {
    const Eigen::VectorXd g = lr_gradient(model, x, y);
    if (g.lpNorm<Eigen::Infinity>() < config.gradient_tolerance) {
      local.converged = true;
      break;
    }
    const double g2 = g.squaredNorm();
    step = std::min(step * 2.0, 1e6);
    LrModel trial = model;
    double trial_loss = loss;
    bool accepted = false;
    while (step > 1e-20) {
      trial.weights = model.weights - step * g.head<kFeatureCount>();
      trial.bias = model.bias - step * g(kFeatureCount);
      trial_loss = lr_objective(trial, x, y);
      if (trial_loss <= loss - kArmijo * step * g2) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // no descent possible at double precision
    model = trial;
    loss = trial_loss;
    local.loss_history.push_back(loss);
  }
  local.iterations = it;
  local.final_loss = loss;
  if (report) *report = std::move(local);
  return model;
}

LrModel train_lr(std::span<const FeatureVector> features, std::span<const int> labels,
                 const LrTrainConfig& config, LrTrainReport* report) {
  if (features.size() != labels.size()) throw ValidationError("feature and label counts differ");
  FeatureMatrix x(static_cast<Eigen::Index>(features.size()), kFeatureCount);
  Eigen::VectorXd y(static_cast<Eigen::Index>(labels.size()));
  for (std::size_t i = 0; i < features.size(); ++i) {
    x.row(static_cast<Eigen::Index>(i)) = features[i].transpose();
    y(static_cast<Eigen::Index>(i)) = labels[i];
  }
  return train_lr(x, y, config, report);
}

double predict_lr(const LrModel& model, const FeatureVector& features) {
  return sigmoid(model.weights.dot(features) + model.bias);
}

double predict_lr(const LrModel& model, std::span<const double> features) {
  if (features.size() != static_cast<std::size_t>(kFeatureCount)) {
    throw ValidationError("expected " + std::to_string(kFeatureCount) + " features, got " +
                          std::to_string(features.size()));
  }
  return predict_lr(model, FeatureVector(Eigen::Map<const FeatureVector>(features.data())));
}

std::string lr_to_json(const LrModel& model) {
  nlohmann::ordered_json j;
  j["weights"] = std::vector<double>(model.weights.data(), model.weights.data() + kFeatureCount);
  j["bias"] = model.bias;
  j["l2_lambda"] = model.l2_lambda;
  return j.dump(2);
}

LrModel lr_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("malformed LR model: ") + e.what());
  }
  LrModel model;
  try {
    const auto w = j.at("weights").get<std::vector<double>>();
    if (w.size() != static_cast<std::size_t>(kFeatureCount)) {
      throw ValidationError("LR model must have " + std::to_string(kFeatureCount) + " weights");
    }
    model.weights = Eigen::Map<const FeatureVector>(w.data());
    model.bias = j.at("bias").get<double>();
    model.l2_lambda = j.at("l2_lambda").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed LR model: ") + e.what());
  }
  if (!model.weights.allFinite() || !std::isfinite(model.bias)) throw ValidationError("LR model is not finite");
  return model;
}

void save_lr(const LrModel& model, const std::string& path) {
  auto out = open_output(path);
  out << lr_to_json(model) << '\n';
  check_written(out, path);
}

LrModel load_lr(const std::string& path) {
  auto in = open_input(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return lr_from_json(ss.str());
}

}  // namespace ontomatch
