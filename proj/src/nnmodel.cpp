#include "distill/nnmodel.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace distill {

namespace {

Eigen::MatrixXd gaussian_matrix(int rows, int cols, double scale, Rng& rng) {
  std::normal_distribution<double> normal(0.0, scale);
  Eigen::MatrixXd m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = normal(rng);
  return m;
}

}  // namespace

ResidualMLP::ResidualMLP(int d, int layers, int width, Rng& rng)
    : d_(d), layers_(layers), width_(width) {
  if (d < 1 || layers < 1 || width < 1)
    throw std::invalid_argument("ResidualMLP: bad architecture");
  W_.push_back(gaussian_matrix(width, d, 1.0 / std::sqrt(static_cast<double>(d)), rng));
  b_.push_back(Eigen::VectorXd::Zero(width));
  for (int i = 1; i < layers; ++i) {
    W_.push_back(gaussian_matrix(width, width,
                                 1.0 / std::sqrt(static_cast<double>(width)), rng));
    b_.push_back(Eigen::VectorXd::Zero(width));
  }
  w_out_ = gaussian_matrix(width, 1, 1.0 / std::sqrt(static_cast<double>(width)), rng);
  b_out_ = 0.0;
}

void ResidualMLP::forward(const Eigen::MatrixXd& X, Eigen::VectorXd& logits_out,
                          Eigen::MatrixXd& phi_out) const {
  if (X.rows() != d_) throw std::invalid_argument("forward: dimension mismatch");
  const Eigen::Index n = X.cols();
  phi_out.resize(representation_dim(), n);
  Eigen::MatrixXd z = ((W_[0] * X).colwise() + b_[0]).array().tanh();
  phi_out.topRows(width_) = z;
  for (int i = 1; i < layers_; ++i) {
    z += (((W_[static_cast<std::size_t>(i)] * z).colwise() +
           b_[static_cast<std::size_t>(i)])
              .array()
              .tanh())
             .matrix();
    phi_out.middleRows(static_cast<Eigen::Index>(i) * width_, width_) = z;
  }
  logits_out = (w_out_.transpose() * z).transpose();
  logits_out.array() += b_out_;
}

Eigen::VectorXd ResidualMLP::logits(const Eigen::MatrixXd& X) const {
  Eigen::VectorXd out;
  Eigen::MatrixXd phi;
  forward(X, out, phi);
  return out;
}

std::uint8_t ResidualMLP::predict(const BitInput& x) const {
  return logit(x) > 0.0 ? 1 : 0;
}

double ResidualMLP::logit(const BitInput& x) const {
  return logits(to_matrix({x}))(0);
}

Eigen::VectorXd ResidualMLP::representation(const BitInput& x) const {
  Eigen::VectorXd lg;
  Eigen::MatrixXd phi;
  forward(to_matrix({x}), lg, phi);
  return phi.col(0);
}

namespace {

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = rows > 0 ? static_cast<Eigen::Index>(j[0].size()) : 0;
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index jj = 0; jj < cols; ++jj)
      m(i, jj) = j[static_cast<std::size_t>(i)][static_cast<std::size_t>(jj)].get<double>();
  return m;
}

}  // namespace

std::string ResidualMLP::to_json() const {
  nlohmann::json j;
  j["d"] = d_;
  j["layers"] = layers_;
  j["width"] = width_;
  j["activation"] = "tanh";
  nlohmann::json ws = nlohmann::json::array(), bs = nlohmann::json::array();
  for (const auto& w : W_) ws.push_back(matrix_to_json(w));
  for (const auto& b : b_) bs.push_back(matrix_to_json(b));
  j["W"] = std::move(ws);
  j["b"] = std::move(bs);
  j["w_out"] = matrix_to_json(w_out_);
  j["b_out"] = b_out_;
  return j.dump();
}

ResidualMLP ResidualMLP::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  ResidualMLP m;
  m.d_ = j.at("d").get<int>();
  m.layers_ = j.at("layers").get<int>();
  m.width_ = j.at("width").get<int>();
  for (const auto& w : j.at("W")) m.W_.push_back(matrix_from_json(w));
  for (const auto& b : j.at("b")) m.b_.push_back(matrix_from_json(b));
  m.w_out_ = matrix_from_json(j.at("w_out"));
  m.b_out_ = j.at("b_out").get<double>();
  return m;
}

Eigen::MatrixXd to_matrix(const std::vector<BitInput>& xs) {
  if (xs.empty()) return {};
  const int d = xs.front().dim();
  Eigen::MatrixXd X(d, static_cast<Eigen::Index>(xs.size()));
  for (std::size_t j = 0; j < xs.size(); ++j)
    for (int i = 0; i < d; ++i)
      X(i, static_cast<Eigen::Index>(j)) = static_cast<double>(xs[j][i]);
  return X;
}

std::string LabeledDataset::to_csv() const {
  std::ostringstream out;
  if (!provenance.empty()) out << "# provenance: " << provenance << "\n";
  const int d = inputs.empty() ? 0 : inputs.front().dim();
  for (int i = 0; i < d; ++i) out << "x" << i << ",";
  out << "label\n";
  for (std::size_t r = 0; r < inputs.size(); ++r) {
    for (int i = 0; i < d; ++i) out << static_cast<int>(inputs[r][i]) << ",";
    out << static_cast<int>(labels[r]) << "\n";
  }
  return out.str();
}

LabeledDataset LabeledDataset::from_csv(const std::string& text) {
  LabeledDataset ds;
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  const std::string tag = "# provenance: ";
  if (line.rfind(tag, 0) == 0) {
    ds.provenance = line.substr(tag.size());
    std::getline(in, line);  // header
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::uint8_t> vals;
    std::istringstream row(line);
    std::string cell;
    while (std::getline(row, cell, ','))
      vals.push_back(static_cast<std::uint8_t>(std::stoi(cell)));
    if (vals.empty()) continue;
    ds.labels.push_back(vals.back());
    vals.pop_back();
    ds.inputs.emplace_back(std::move(vals));
  }
  return ds;
}

LabeledDataset gen_dataset(const BoolFn& target, const std::string& provenance,
                           int n, const DistributionSampler& dist, Rng& rng) {
  if (n < 1) throw std::invalid_argument("gen_dataset: n must be >= 1");
  LabeledDataset ds;
  ds.provenance = provenance;
  ds.inputs = dist.draw(n, rng);
  ds.labels.reserve(static_cast<std::size_t>(n));
  for (const auto& x : ds.inputs) ds.labels.push_back(target(x));
  return ds;
}

double loss_and_gradients(const ResidualMLP& model, const Eigen::MatrixXd& X,
                          const Eigen::VectorXd& y,
                          std::vector<Eigen::MatrixXd>& gW,
                          std::vector<Eigen::VectorXd>& gb,
                          Eigen::VectorXd& gw_out, double& gb_out) {
  const int L = model.num_layers();
  const Eigen::Index n = X.cols();
  const double inv_n = 1.0 / static_cast<double>(n);

  // Forward pass, keeping pre-activations and layer states.
  std::vector<Eigen::MatrixXd> pre(static_cast<std::size_t>(L));
  std::vector<Eigen::MatrixXd> state(static_cast<std::size_t>(L));
  pre[0] = (model.weights()[0] * X).colwise() + model.biases()[0];
  state[0] = pre[0].array().tanh().matrix();
  for (int i = 1; i < L; ++i) {
    pre[static_cast<std::size_t>(i)] =
        (model.weights()[static_cast<std::size_t>(i)] * state[static_cast<std::size_t>(i - 1)])
            .colwise() +
        model.biases()[static_cast<std::size_t>(i)];
    state[static_cast<std::size_t>(i)] =
        state[static_cast<std::size_t>(i - 1)] +
        pre[static_cast<std::size_t>(i)].array().tanh().matrix();
  }
  Eigen::VectorXd logits =
      (model.output_weights().transpose() * state[static_cast<std::size_t>(L - 1)])
          .transpose();
  logits.array() += model.output_bias();

  // Logistic loss, written to stay finite for large |logit|.
  Eigen::ArrayXd z = logits.array();
  Eigen::ArrayXd ya = y.array();
  double loss =
      ((z.max(0.0) - z * ya + (1.0 + (-z.abs()).exp()).log()).sum()) * inv_n;

  Eigen::ArrayXd p = 1.0 / (1.0 + (-z).exp());
  Eigen::VectorXd dlogit = ((p - ya) * inv_n).matrix();

  gW.assign(static_cast<std::size_t>(L), Eigen::MatrixXd());
  gb.assign(static_cast<std::size_t>(L), Eigen::VectorXd());
  gw_out = state[static_cast<std::size_t>(L - 1)] * dlogit;
  gb_out = dlogit.sum();

  // d(loss)/d(state_i), propagated through the skip connections.
  Eigen::MatrixXd dz = model.output_weights() * dlogit.transpose();
  for (int i = L - 1; i >= 1; --i) {
    Eigen::MatrixXd dpre =
        dz.array() *
        (1.0 - pre[static_cast<std::size_t>(i)].array().tanh().square());
    gW[static_cast<std::size_t>(i)] =
        dpre * state[static_cast<std::size_t>(i - 1)].transpose();
    gb[static_cast<std::size_t>(i)] = dpre.rowwise().sum();
    dz += model.weights()[static_cast<std::size_t>(i)].transpose() * dpre;
  }
  Eigen::MatrixXd dpre0 =
      dz.array() * (1.0 - pre[0].array().tanh().square());
  gW[0] = dpre0 * X.transpose();
  gb[0] = dpre0.rowwise().sum();
  return loss;
}

ResidualMLP train(const LabeledDataset& data, const TrainConfig& cfg,
                  TrainReport* report) {
  if (data.inputs.empty()) throw std::invalid_argument("train: empty dataset");
  const int n = data.size();
  const int d = data.inputs.front().dim();
  Rng rng(cfg.seed);
  ResidualMLP model(d, cfg.layers, cfg.width, rng);

  Eigen::MatrixXd X = to_matrix(data.inputs);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) y(i) = static_cast<double>(data.labels[i]);

  // Adam state.
  const int L = cfg.layers;
  auto zeros_like_W = [&] {
    std::vector<Eigen::MatrixXd> v;
    for (const auto& w : model.weights()) v.push_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
    return v;
  };
  auto zeros_like_b = [&] {
    std::vector<Eigen::VectorXd> v;
    for (const auto& b : model.biases()) v.push_back(Eigen::VectorXd::Zero(b.size()));
    return v;
  };
  auto mW = zeros_like_W(), vW = zeros_like_W();
  auto mb = zeros_like_b(), vb = zeros_like_b();
  Eigen::VectorXd mwo = Eigen::VectorXd::Zero(cfg.width), vwo = Eigen::VectorXd::Zero(cfg.width);
  double mbo = 0.0, vbo = 0.0;
  const double beta1 = 0.9, beta2 = 0.999, adam_eps = 1e-8;
  long step = 0;

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::vector<Eigen::MatrixXd> gW;
  std::vector<Eigen::VectorXd> gb;
  Eigen::VectorXd gwo;
  double gbo = 0.0;
  TrainReport local;
  TrainReport& rep = report ? *report : local;

  int epochs_run = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (int start = 0; start < n; start += cfg.batch_size) {
      const int bs = std::min(cfg.batch_size, n - start);
      Eigen::MatrixXd Xb(d, bs);
      Eigen::VectorXd yb(bs);
      for (int j = 0; j < bs; ++j) {
        Xb.col(j) = X.col(order[static_cast<std::size_t>(start + j)]);
        yb(j) = y(order[static_cast<std::size_t>(start + j)]);
      }
      double loss = loss_and_gradients(model, Xb, yb, gW, gb, gwo, gbo);
      if (!std::isfinite(loss))
        throw TrainingFailure("training diverged: non-finite loss at step " +
                              std::to_string(step));
      rep.step_losses.push_back(loss);

      ++step;
      const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step));
      const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step));
      auto adam_mat = [&](Eigen::MatrixXd& param, Eigen::MatrixXd& m1,
                          Eigen::MatrixXd& m2, const Eigen::MatrixXd& g) {
        m1 = beta1 * m1 + (1.0 - beta1) * g;
        m2 = beta2 * m2.array().matrix() + (1.0 - beta2) * g.array().square().matrix();
        param.array() -= cfg.step_size * (m1.array() / bc1) /
                         ((m2.array() / bc2).sqrt() + adam_eps);
      };
      for (int i = 0; i < L; ++i) {
        adam_mat(model.weights()[static_cast<std::size_t>(i)],
                 mW[static_cast<std::size_t>(i)], vW[static_cast<std::size_t>(i)],
                 gW[static_cast<std::size_t>(i)]);
        Eigen::MatrixXd bparam = model.biases()[static_cast<std::size_t>(i)];
        Eigen::MatrixXd bm = mb[static_cast<std::size_t>(i)];
        Eigen::MatrixXd bv = vb[static_cast<std::size_t>(i)];
        adam_mat(bparam, bm, bv, gb[static_cast<std::size_t>(i)]);
        model.biases()[static_cast<std::size_t>(i)] = bparam;
        mb[static_cast<std::size_t>(i)] = bm;
        vb[static_cast<std::size_t>(i)] = bv;
      }
      Eigen::MatrixXd wo = model.output_weights(), wom = mwo, wov = vwo;
      adam_mat(wo, wom, wov, gwo);
      model.output_weights() = wo;
      mwo = wom;
      vwo = wov;
      mbo = beta1 * mbo + (1.0 - beta1) * gbo;
      vbo = beta2 * vbo + (1.0 - beta2) * gbo * gbo;
      model.output_bias() -= cfg.step_size * (mbo / bc1) / (std::sqrt(vbo / bc2) + adam_eps);
    }
    ++epochs_run;

    Eigen::VectorXd lg = model.logits(X);
    int correct = 0;
    for (int i = 0; i < n; ++i)
      if ((lg(i) > 0.0 ? 1.0 : 0.0) == y(i)) ++correct;
    rep.train_accuracy = static_cast<double>(correct) / static_cast<double>(n);
    if (rep.train_accuracy >= cfg.target_accuracy) break;
  }
  rep.epochs_run = epochs_run;
  return model;
}

RepresentationOracle make_oracle(const ResidualMLP& model,
                                 std::optional<double> norm_bound,
                                 std::uint64_t bound_seed) {
  RepresentationOracle oracle;
  oracle.m = model.representation_dim();
  ResidualMLP copy = model;
  oracle.features = [copy](const std::vector<BitInput>& xs) {
    Eigen::VectorXd lg;
    Eigen::MatrixXd phi;
    copy.forward(to_matrix(xs), lg, phi);
    return phi;
  };
  if (norm_bound) {
    oracle.norm_bound = *norm_bound;
  } else {
    Rng rng(bound_seed);
    DistributionSampler unif = DistributionSampler::uniform(model.input_dim());
    auto xs = unif.draw(10000, rng);
    Eigen::MatrixXd phi = oracle.features(xs);
    oracle.norm_bound = 1.05 * phi.colwise().norm().maxCoeff();
  }
  return oracle;
}

}  // namespace distill
